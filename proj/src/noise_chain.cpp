#include "dryfric/noise_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dryfric/error.hpp"

namespace dryfric::noise_chain {

double alpha(double eta, const Params& params) {
  const Model model(params);
  const double x = eta / params.delta;
  const double i = std::round(x);
  if (std::abs(x - i) > 1e-9 * std::max(1.0, std::abs(x)))
    throw InvalidArgument("eta is not a lattice point");
  if (std::abs(i) > model.N()) throw InvalidArgument("eta lies outside the truncated lattice");
  return model.alpha(static_cast<int>(i));
}

ChainGenerator chain_generator(const Model& model) {
  const int n = model.N();
  const int size = 2 * n + 1;
  const double rate = model.jump_rate();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(3 * size);
  for (int i = -n; i <= n; ++i) {
    const int row = i + n;
    const double up = model.alpha(i);
    if (up > 0.0) entries.emplace_back(row, row + 1, rate * up);
    if (up < 1.0) entries.emplace_back(row, row - 1, rate * (1.0 - up));
    entries.emplace_back(row, row, -rate);
  }
  ChainGenerator gen;
  gen.Q.resize(size, size);
  gen.Q.setFromTriplets(entries.begin(), entries.end());
  gen.rate = rate;
  gen.N = n;
  return gen;
}

std::vector<double> invariant_measure(const Model& model) {
  const int n = model.N();
  std::vector<double> log_g(2 * n + 1, 0.0);
  for (int i = -n; i < n; ++i) {
    log_g[i + n + 1] = log_g[i + n] + std::log(model.alpha(i)) - std::log1p(-model.alpha(i + 1));
  }
  const double top = *std::max_element(log_g.begin(), log_g.end());
  std::vector<double> g(log_g.size());
  std::transform(log_g.begin(), log_g.end(), g.begin(),
                 [top](double lg) { return std::exp(lg - top); });
  const double total = std::accumulate(g.begin(), g.end(), 0.0);
  for (double& x : g) x /= total;
  return g;
}

double band_mass(const Model& model) {
  const auto g = invariant_measure(model);
  double m = 0.0;
  for (int i = -model.k_mu_s(); i <= model.k_mu_s(); ++i) m += g[static_cast<std::size_t>(i + model.N())];
  return m;
}

}  // namespace dryfric::noise_chain
