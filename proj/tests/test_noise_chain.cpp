#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "dryfric/error.hpp"
#include "dryfric/noise_chain.hpp"

using namespace dryfric;

namespace {

Model chain_model(double delta, double L = 4.0, double mu_s = 1.0) {
  Params p;
  p.delta = delta;
  p.L_eta = L;
  p.mu_s = mu_s;
  p.mu_d = std::min(0.25, mu_s);
  return Model(p);
}

}  // namespace

TEST_SUITE("noise_chain") {

TEST_CASE("alpha by value") {
  Params p;
  p.delta = 0.5;
  CHECK(noise_chain::alpha(0.0, p) == 0.5);
  CHECK(noise_chain::alpha(0.5, p) == doctest::Approx(0.4375));
  CHECK(noise_chain::alpha(4.0, p) == 0.0);
  CHECK(noise_chain::alpha(-4.0, p) == 1.0);
  CHECK_THROWS_AS(noise_chain::alpha(0.3, p), InvalidArgument);
  CHECK_THROWS_AS(noise_chain::alpha(4.5, p), InvalidArgument);
}

TEST_CASE("generator rows sum to zero") {
  for (double delta : {0.5, 0.25, 0.0625}) {
    const auto gen = noise_chain::chain_generator(chain_model(delta));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(gen.Q.rows());
    CHECK((gen.Q * ones).cwiseAbs().maxCoeff() < 1e-9 * gen.rate);
  }
}

TEST_CASE("three-state chain") {
  const Model m = chain_model(0.5, 0.5, 0.25);
  REQUIRE(m.N() == 1);
  const Eigen::MatrixXd Q(noise_chain::chain_generator(m).Q);
  CHECK(Q.rows() == 3);
  CHECK(Q.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  const auto g = noise_chain::invariant_measure(m);
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(0.5));
  CHECK(g[2] == doctest::Approx(0.25));
}

TEST_CASE("invariant measure solves g^T Q = 0 against a dense null space") {
  const Model m = chain_model(0.25);
  const auto gen = noise_chain::chain_generator(m);
  const Eigen::MatrixXd Qt = Eigen::MatrixXd(gen.Q).transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Qt);
  Eigen::VectorXd null = lu.kernel().col(0);
  null /= null.sum();
  const auto g = noise_chain::invariant_measure(m);
  for (int n = 0; n < null.size(); ++n) CHECK(g[n] == doctest::Approx(null[n]).epsilon(1e-9));

  Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
  CHECK((Qt * gv).cwiseAbs().maxCoeff() < 1e-10 * gen.rate);
}

TEST_CASE("detailed balance across every edge") {
  const Model m = chain_model(0.125);
  const auto g = noise_chain::invariant_measure(m);
  for (int i = -m.N(); i < m.N(); ++i) {
    const double flux_up = g[i + m.N()] * m.alpha(i);
    const double flux_down = g[i + m.N() + 1] * (1.0 - m.alpha(i + 1));
    CHECK(flux_up == doctest::Approx(flux_down).epsilon(1e-10));
  }
  CHECK(std::accumulate(g.begin(), g.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("band mass at delta = 1/2") {
  CHECK(noise_chain::band_mass(chain_model(0.5)) == doctest::Approx(0.789886474609376).epsilon(1e-12));
}

TEST_CASE("second moment tends to one") {
  const Model m = chain_model(1.0 / 32);
  const auto g = noise_chain::invariant_measure(m);
  double m2 = 0.0;
  for (int i = -m.N(); i <= m.N(); ++i) m2 += g[i + m.N()] * m.eta(i) * m.eta(i);
  CHECK(std::abs(m2 - 1.0) < 0.02);
}

TEST_CASE("generator acting on eta^2 approximates the Ornstein-Uhlenbeck generator") {
  // Q phi(eta) -> phi'' - eta phi' = 2 - 2 eta^2 for phi = eta^2.
  for (double delta : {0.125, 0.0625}) {
    const Model m = chain_model(delta);
    const Eigen::MatrixXd Q(noise_chain::chain_generator(m).Q);
    Eigen::VectorXd phi(Q.rows());
    for (int i = -m.N(); i <= m.N(); ++i) phi[i + m.N()] = m.eta(i) * m.eta(i);
    const Eigen::VectorXd q = Q * phi;
    for (int i : {-8, -3, 0, 5, 8}) {
      const double eta = m.eta(i);
      CHECK(std::abs(q[i + m.N()] - (2.0 - 2.0 * eta * eta)) < 4.0 * delta);
    }
  }
}

TEST_CASE("sample_jump") {
  const Model m = chain_model(0.5);
  Rng rng = make_stream(7, 0);
  for (int t = 0; t < 100; ++t) {
    CHECK(noise_chain::sample_jump(m, m.N(), rng) == m.N() - 1);
    CHECK(noise_chain::sample_jump(m, -m.N(), rng) == -m.N() + 1);
  }
  const int draws = 100000;
  int up = 0;
  for (int t = 0; t < draws; ++t) up += noise_chain::sample_jump(m, 0, rng) == 1;
  CHECK(std::abs(up / double(draws) - 0.5) < 0.005);
}

}  // TEST_SUITE
