#include "doctest.h"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <string>

#include "dryfric/error.hpp"
#include "dryfric/kolmogorov.hpp"
#include "dryfric/noise_chain.hpp"

using namespace dryfric;
namespace kol = dryfric::kolmogorov;
using kol::Vec;

namespace {

// N = 2, k = 1: 5 eta points, 45 nodes at p = 2.
Model tiny_model(double mu_d = 0.25) {
  Params p;
  p.mu_s = 0.5;
  p.mu_d = mu_d;
  p.delta = 0.5;
  p.L_eta = 1.0;
  return Model(p);
}

Model standard_model(double delta, double mu_d = 0.25) {
  Params p;
  p.delta = delta;
  p.mu_d = mu_d;
  return Model(p);
}

Vec random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

double max_abs(const Vec& x) { return x.lpNorm<Eigen::Infinity>(); }

Vec gamma_reflect(const kol::Grid& g, const Vec& f) {
  Vec out(f.size());
  for (int n = 0; n < static_cast<int>(g.size()); ++n)
    out[n] = f[g.node(-g.eta_index(n), -g.v_index(n))];
  return out;
}

}  // namespace

TEST_SUITE("kolmogorov") {

TEST_CASE("grid numbering") {
  const kol::Grid g(tiny_model(), 2);
  CHECK(g.I() == 5);
  CHECK(g.J() == 9);
  CHECK(g.size() == 45);
  for (int n = 0; n < 45; ++n) CHECK(g.node(g.eta_index(n), g.v_index(n)) == n);
  CHECK(g.is_static(g.node(1, 0)));
  CHECK_FALSE(g.is_static(g.node(2, 0)));
  CHECK_FALSE(g.is_static(g.node(0, 1)));
  CHECK(g.mode(g.s_plus()) == Mode::positive);
  CHECK(g.mode(g.s_minus()) == Mode::negative);
  CHECK(g.v(3) == doctest::Approx(0.75));
  CHECK_THROWS_AS(kol::Grid(tiny_model(), 0), InvalidArgument);
}

TEST_CASE("generator rows sum to zero and off-diagonals are nonnegative") {
  for (const Model& m : {tiny_model(), tiny_model(0.5), standard_model(0.25)}) {
    const auto op = kol::assemble(m, 4);
    const Vec ones = Vec::Ones(op.M.cols());
    CHECK(max_abs(op.M * ones) < 1e-10 * m.jump_rate());
    for (int c = 0; c < op.M.outerSize(); ++c)
      for (kol::SpMat::InnerIterator it(op.M, c); it; ++it)
        if (it.row() != it.col()) CHECK(it.value() >= 0.0);
  }
}

TEST_CASE("constant right-hand side") {
  const auto op = kol::assemble(standard_model(0.5), 8);
  const double lambda = 0.3;
  const auto sol = kol::resolvent_solve(op, lambda, Vec::Ones(op.M.rows()));
  CHECK(max_abs(sol.u.array() - 1.0 / lambda) < 1e-10 / lambda);
  CHECK(sol.report.factorizations == 1);
  CHECK(sol.report.solves == 1);
  CHECK_THROWS_AS(kol::Resolvent(op, 0.0), InvalidArgument);
}

TEST_CASE("dense exponential is row-stochastic") {
  const auto op = kol::assemble(tiny_model(), 2);
  const Eigen::MatrixXd M(op.M);
  for (double t : {0.05, 0.5, 3.0}) {
    const Eigen::MatrixXd P = (t * M).exp();
    CHECK(max_abs(P.rowwise().sum().array() - 1.0) < 1e-10);
    CHECK(P.minCoeff() > -1e-12);
  }
}

TEST_CASE("factorization is reused across right-hand sides") {
  const auto op = kol::assemble(standard_model(0.5), 8);
  const auto det = kol::stationary_statistics_det(op, 1e-6);
  CHECK(det.report.factorizations == 1);
  CHECK(det.report.solves == 4);
  CHECK(det.nodes == op.grid.size());
}

TEST_CASE("absorbing exits") {
  const Model m = tiny_model();
  const auto mop = kol::modified_assemble(m, 2);
  REQUIRE(mop.M.rows() == 47);
  CHECK_THROWS_AS(kol::ModifiedSolver(kol::assemble(m, 2), 0.0), InvalidArgument);
  CHECK_THROWS_AS(kol::Resolvent(mop, 1.0), InvalidArgument);

  kol::ModifiedSolver s0(mop, 0.0);
  const auto n = static_cast<Eigen::Index>(mop.grid.size());
  CHECK(max_abs(s0.h_plus().head(n) + s0.h_minus().head(n) - Vec::Ones(n)) < 1e-10);
  CHECK(s0.h_plus()[mop.s_prime_plus()] == 1.0);
  CHECK(s0.h_plus()[mop.s_prime_minus()] == 0.0);
  CHECK(s0.h_minus()[mop.s_prime_minus()] == 1.0);
  const Vec w = s0.w(Vec::Ones(n));
  CHECK(w[mop.s_prime_plus()] == 0.0);
  CHECK(w[mop.s_prime_minus()] == 0.0);

  kol::ModifiedSolver s1(mop, 0.8);
  CHECK(s1.h_plus()[mop.grid.s_plus()] + s1.h_minus()[mop.grid.s_plus()] < 1.0);
}

TEST_CASE("representation formula reproduces the resolvent") {
  for (double mu_d : {0.25, 0.5}) {
    const Model m = tiny_model(mu_d);
    const auto op = kol::assemble(m, 2);
    const auto mop = kol::modified_assemble(m, 2);
    const auto n = static_cast<Eigen::Index>(op.grid.size());
    for (double lambda : {0.05, 0.7, 4.0}) {
      kol::ModifiedSolver s(mop, lambda);
      kol::Resolvent R(op, lambda);
      const Vec w1 = s.w(Vec::Ones(n));
      for (unsigned seed : {1u, 2u, 3u}) {
        const Vec f = random_vector(n, seed);
        const Vec u_rep = kol::representation_u_lambda(op.grid, s.h_plus(), s.h_minus(), s.w(f), w1, lambda);
        const Vec u = R.solve(f);
        CHECK(max_abs(u_rep - u) < 1e-8 * std::max(1.0, max_abs(u)));
      }
      // f = 1
      CHECK(kol::pi_lambda(op.grid, w1, w1) == doctest::Approx(1.0));
      CHECK(std::abs(kol::mu_lambda(op.grid, w1, s.h_plus(), s.h_minus())) < 1e-12);
      // odd f
      const Vec v = op.grid.sample(flow::Functional::velocity);
      CHECK(std::abs(kol::pi_lambda(op.grid, s.w(v), w1)) < 1e-12);
    }
  }
}

TEST_CASE("w is gamma-symmetric") {
  const Model m = tiny_model();
  const auto mop = kol::modified_assemble(m, 2);
  kol::ModifiedSolver s(mop, 0.4);
  const auto& g = mop.grid;
  const Vec f = random_vector(static_cast<Eigen::Index>(g.size()), 9);
  CHECK(s.w(f)[g.s_minus()] == doctest::Approx(s.w(gamma_reflect(g, f))[g.s_plus()]).epsilon(1e-10));
}

TEST_CASE("mean excursion length by two routes") {
  for (const Model& m : {tiny_model(), standard_model(0.5)}) {
    const auto op = kol::assemble(m, 4);
    const auto mop = kol::modified_assemble(m, 4);
    const auto ps = kol::p_stick_systems(op);
    kol::ModifiedSolver s0(mop, 0.0);
    const auto n = static_cast<Eigen::Index>(op.grid.size());
    const Vec w1 = s0.w(Vec::Ones(n));
    CHECK(w1[op.grid.s_plus()] == doctest::Approx(ps.expected_tau1).epsilon(1e-8));

    // P_stick as the time ratio and as the w0 ratio
    const Vec stick = op.grid.sample(flow::Functional::stick_indicator);
    const double ratio = s0.w(stick)[op.grid.s_plus()] / w1[op.grid.s_plus()];
    CHECK(ps.p_stick == doctest::Approx(ratio).epsilon(1e-8));
    CHECK(ps.p_stick > 0.0);
    CHECK(ps.p_stick < 1.0);
  }
}

TEST_CASE("strip exit time against a hand-built birth-death solve") {
  Params p;
  p.mu_d = 1.0;
  p.delta = 0.25;
  const Model m(p);
  const auto Q = kol::strip_generator(m);
  const int k = m.k_mu_s();
  REQUIRE(Q.rows() == 2 * k + 1);
  // first-step analysis: W_i = 1/Lambda + a_i W_{i+1} + (1 - a_i) W_{i-1}
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2 * k + 1, 2 * k + 1);
  for (int i = -k; i <= k; ++i) {
    if (i < k) A(i + k, i + k + 1) = -m.alpha(i);
    if (i > -k) A(i + k, i + k - 1) = -(1.0 - m.alpha(i));
  }
  const Vec W = A.fullPivLu().solve(Vec::Constant(2 * k + 1, 1.0 / m.jump_rate()));
  const auto ps = kol::p_stick_systems(kol::assemble(m, 2));
  CHECK(max_abs(ps.W_strip - W) < 1e-12);
}

TEST_CASE("stationary averages from w0 agree with the resolvent") {
  const Model m = standard_model(0.5);
  const auto op = kol::assemble(m, 16);
  const auto mop = kol::modified_assemble(m, 16);
  const auto det = kol::stationary_statistics_det(op, 1e-6);
  kol::ModifiedSolver s0(mop, 0.0);
  const flow::Functional fs[] = {flow::Functional::stick_indicator, flow::Functional::v_squared,
                                 flow::Functional::band_indicator, flow::Functional::eta_squared};
  const Vec pi = kol::stationary_measure_grid(op);
  CHECK(pi.sum() == doctest::Approx(1.0));
  CHECK(pi.minCoeff() >= 0.0);
  for (int s = 0; s < 4; ++s) {
    const Vec f = op.grid.sample(fs[s]);
    CHECK(std::abs(kol::stationary_average_w0(op.grid, s0, f) - det.at_s_plus[s]) < 1e-4);
    CHECK(std::abs(pi.dot(f) - det.at_s_plus[s]) < 1e-4);
    CHECK(std::abs(det.at_s_plus[s] - det.at_s_minus[s]) < 1e-6 * std::abs(det.at_s_plus[s]));
  }
  kol::ModifiedSolver s1(mop, 0.1);
  CHECK_THROWS_AS(kol::stationary_average_w0(op.grid, s1, Vec::Ones(op.grid.size())), InvalidArgument);
}

TEST_CASE("eta marginal of the grid measure is close to the chain law") {
  const Model m = standard_model(0.5);
  const auto g = noise_chain::invariant_measure(m);
  double prev = 1.0;
  for (int p : {8, 32}) {
    const auto op = kol::assemble(m, p);
    const Vec pi = kol::stationary_measure_grid(op);
    std::vector<double> marg(g.size(), 0.0);
    for (int n = 0; n < pi.size(); ++n) marg[op.grid.eta_index(n) + m.N()] += pi[n];
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(marg[i] - g[i]));
    MESSAGE("p = " << p << ": max marginal error " << err);
    CHECK(err < 0.02);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("odd statistics vanish") {
  const auto op = kol::assemble(standard_model(0.5), 16);
  kol::Resolvent R(op, 1e-6);
  const Vec u = R.solve(op.grid.sample(flow::Functional::velocity));
  CHECK(std::abs(1e-6 * u[op.grid.node(0, 0)]) < 1e-6);
}

TEST_CASE("stationary statistics at large p") {
  SUBCASE("delta = 1/2") {
    const auto det = kol::stationary_statistics_det(standard_model(0.5), 256);
    CHECK(det.at_s_plus[0] == doctest::Approx(0.2898).epsilon(0.01));
    CHECK(det.at_s_plus[2] == doctest::Approx(0.789886).epsilon(1e-3));
  }
  SUBCASE("delta = 1/4") {
    const auto ps = kol::p_stick_systems(kol::assemble(standard_model(0.25), 256));
    CHECK(ps.p_stick == doctest::Approx(0.1972).epsilon(0.01));
  }
}

TEST_CASE("harmonic measure of the static row") {
  const Model m = standard_model(0.5);
  const auto op = kol::assemble(m, 8);
  const Vec P = kol::harmonic_measure_at(op, op.grid.s_plus());
  CHECK(P.size() == 2 * m.k_mu_s() + 1);
  CHECK(P.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(P.minCoeff() >= -1e-14);
  // the adjoint row agrees with the column of the forward solves
  const auto H = kol::harmonic_measures(op);
  CHECK(max_abs(H.row(op.grid.s_plus()).transpose() - P) < 1e-10);
  CHECK(max_abs(H.rowwise().sum().array() - 1.0) < 1e-9);
}

TEST_CASE("stick duration transform") {
  const Model m = standard_model(0.5);
  const auto op = kol::assemble(m, 8);
  const auto mop = kol::modified_assemble(m, 8);
  const kol::StickLaplace F(op);
  CHECK(F(1e-10) == doctest::Approx(1.0).epsilon(1e-8));
  double last = 1.0;
  for (double l : {0.1, 1.0, 10.0, 100.0}) {
    CHECK(F(l) < last);
    last = F(l);
  }

  // -F'(0) equals the mean stick time, by Richardson on one-sided differences
  const double h = 1e-4;
  auto D = [&](double s) { return (1.0 - F(s)) / s; };
  const double slope = 2.0 * D(h / 2) - D(h);
  const auto ps = kol::p_stick_systems(op);
  kol::ModifiedSolver s0(mop, 0.0);
  const double mean_stick = s0.w(Vec::Ones(op.grid.size()))[op.grid.s_plus()] - ps.W_hat[op.grid.s_plus()];
  CHECK(std::abs(slope - mean_stick) < 1e-6);

  CHECK(kol::laplace_stick(op, 2.0) == doctest::Approx(F(2.0)));
}

TEST_CASE("slide duration transform by two routes") {
  for (const Model& m : {tiny_model(), tiny_model(0.5), standard_model(0.5)}) {
    const auto op = kol::assemble(m, 4);
    const auto mop = kol::modified_assemble(m, 4);
    double last = 1.0;
    for (double l : {0.01, 0.3, 2.0, 15.0}) {
      const auto s = kol::laplace_slid(op, mop, l);
      CHECK(std::abs(s.via_G - s.via_w) < 1e-8);
      CHECK(s.via_G > 0.0);
      CHECK(s.via_G < last);
      last = s.via_G;
    }
  }
}

TEST_CASE("f(0+) extrapolation on closed forms") {
  const auto grid = kol::geometric_grid(8.0, 3, 8);
  CHECK(grid.size() == 6);
  CHECK(grid.front() == 64.0);
  const double theta = 2.5;
  const auto ex = kol::f0_from_laplace([&](double l) { return theta / (theta + l); }, grid);
  CHECK(ex.value == doctest::Approx(theta).epsilon(1e-6));
  CHECK(ex.monotone_tail);
  const auto un = kol::f0_from_laplace([](double l) { return -std::expm1(-l) / l; }, grid);
  CHECK(un.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(kol::f0_from_laplace([](double) { return 1.0; }, {1.0, 2.0}), InvalidArgument);
}

TEST_CASE("f_stick(0+) on the grid") {
  const Model m = standard_model(0.125);
  const auto op = kol::assemble(m, 16);
  const kol::StickLaplace F(op);
  const auto est = kol::f0_from_laplace(F, kol::geometric_grid(m.jump_rate(), 3, 8));
  MESSAGE("f_stick(0+) extrapolated " << est.value << ", exact on grid " << F.density_at_zero());
  CHECK(est.value == doctest::Approx(F.density_at_zero()).epsilon(1e-3));
  CHECK(F.density_at_zero() == doctest::Approx(5.32).epsilon(0.25));

  const auto slide = kol::f0_from_laplace([&](double l) { return kol::laplace_slid_G(op, l); },
                                          kol::geometric_grid(m.jump_rate(), 3, 8));
  MESSAGE("f_slide(0+) extrapolated " << slide.value);
  CHECK(std::abs(slide.value) < 0.05 * F.density_at_zero());
}

TEST_CASE("power spectral density against integrated autocovariance") {
  const Model m = tiny_model();
  const auto op = kol::assemble(m, 2);
  const Vec pi = kol::stationary_measure_grid(op);
  const std::vector<double> omega{-1.5, 0.0, 0.7, 1.5, 4.0};
  const auto S = kol::psd(op, pi, omega);
  CHECK(S[0] == doctest::Approx(S[3]).epsilon(1e-10));

  // S(w) = 2 Re int_0^inf pi(v e^{tM} v) e^{-iwt} dt, trapezoid rule
  const Eigen::MatrixXd M(op.M);
  const Vec v = op.grid.sample(flow::Functional::velocity);
  const double h = 0.002, T = 60.0;
  const Eigen::MatrixXd step = (h * M).exp();
  const auto steps = static_cast<int>(T / h);
  std::vector<double> C(steps + 1);
  Vec x = v;
  for (int s = 0; s <= steps; ++s) {
    C[s] = pi.cwiseProduct(v).dot(x);
    x = step * x;
  }
  CHECK(std::abs(C.back()) < 1e-10);
  for (std::size_t q = 0; q < omega.size(); ++q) {
    double re = 0.0;
    for (int s = 0; s <= steps; ++s) re += (s == 0 || s == steps ? 0.5 : 1.0) * C[s] * std::cos(omega[q] * s * h);
    const double ref = 2.0 * h * re;
    CHECK(S[q] == doctest::Approx(ref).epsilon(1e-4));
    CHECK(S[q] >= -1e-8);
  }
}

TEST_CASE("kappa") {
  const double u_star = 0.3, c = 0.7;
  auto first = [&](double p) { return u_star + c / p; };
  auto second = [&](double p) { return u_star + c / (p * p); };
  CHECK(kol::kappa(first(32), first(64), first(128)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(kol::kappa(second(32), second(64), second(128)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(kol::kappa(1.0, 2.0, 2.0), NumericError);
  CHECK_THROWS_AS(kol::kappa(Vec::Ones(2), Vec::Ones(3), Vec::Ones(2)), InvalidArgument);
}

TEST_CASE("kappa of the stationary statistics") {
  const Model m = standard_model(0.5);
  const auto ks = kol::kappa_statistics(m, {8, 16});
  REQUIRE(ks.size() == 2);
  // by hand for S1 at p = 8
  std::array<Vec, 3> u;
  std::array<kol::Grid, 3> grids{kol::Grid(m, 4), kol::Grid(m, 8), kol::Grid(m, 16)};
  for (int q = 0; q < 3; ++q) {
    const auto op = kol::assemble(m, grids[q].p());
    kol::Resolvent R(op, 1e-6);
    u[q] = 1e-6 * R.solve(op.grid.sample(flow::Functional::stick_indicator));
  }
  const double k = kol::kappa(u[0], kol::restrict_to(grids[1], u[1], grids[0]),
                              kol::restrict_to(grids[2], u[2], grids[0]));
  CHECK(ks.at(8)[0] == doctest::Approx(k).epsilon(1e-12));
  for (const auto& [p, row] : ks)
    for (double x : row) CHECK(std::isfinite(x));
  CHECK_THROWS_AS(kol::kappa_statistics(m, {3}), InvalidArgument);
}

TEST_CASE("restriction to a coarser grid") {
  const Model m = tiny_model();
  const kol::Grid fine(m, 4), coarse(m, 2);
  const Vec vf = fine.sample(flow::Functional::velocity);
  const Vec r = kol::restrict_to(fine, vf, coarse);
  CHECK(max_abs(r - coarse.sample(flow::Functional::velocity)) == 0.0);
  CHECK_THROWS_AS(kol::restrict_to(coarse, coarse.sample(flow::Functional::one), fine), InvalidArgument);
  CHECK_THROWS_AS(kol::restrict_to(kol::Grid(m, 3), kol::Grid(m, 3).sample(flow::Functional::one), coarse),
                  InvalidArgument);
}

TEST_CASE("memory refusal reports the grid size") {
  kol::AssembleOptions tight;
  tight.memory_budget_bytes = 1e6;
  try {
    kol::assemble(standard_model(0.5), 256, tight);
    FAIL("expected a refusal");
  } catch (const ResourceError& e) {
    const std::string what = e.what();
    CHECK(what.find("N_p = " + std::to_string(kol::Grid(standard_model(0.5), 256).size())) != std::string::npos);
    CHECK(what.find("bytes") != std::string::npos);
  }
  CHECK(kol::estimated_bytes(1000) == doctest::Approx(360000.0));
}

}  // TEST_SUITE
