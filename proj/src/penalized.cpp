#include "dryfric/penalized.hpp"

#include <algorithm>
#include <cmath>

#include "dryfric/error.hpp"

namespace dryfric::sim {

PenalizedPath simulate_penalized_reference(const Params& params, const PenalizedOptions& options,
                                           Rng& rng) {
  if (std::abs(params.mu_d - params.mu_s) > 1e-12 * params.mu_s)
    throw InvalidArgument("the penalized reference requires mu_d == mu_s");
  if (!(options.dt > 0.0) || !(options.T > 0.0) || !(options.p > 0.0))
    throw InvalidArgument("the penalized reference requires dt, T, p > 0");
  if (!(params.tau > 0.0)) throw InvalidArgument("tau must be > 0");

  const double mu = params.mu_s;
  const double p = options.p;
  const double dt = options.dt;
  const double decay = dt / params.tau;
  const double kick = options.noise ? std::sqrt(2.0 * dt / params.tau) : 0.0;
  const auto steps = static_cast<std::size_t>(std::llround(options.T / dt));

  PenalizedPath out;
  out.steps = steps;
  double eta = options.eta0;
  double v = options.v0;
  double sum_v2 = 0.0, sum_eta2 = 0.0;
  std::size_t counted = 0;
  std::normal_distribution<double> normal;
  auto record = [&](std::size_t k) {
    out.t.push_back(static_cast<double>(k) * dt);
    out.eta.push_back(eta);
    out.v.push_back(v);
  };
  if (options.record_stride > 0) record(0);
  out.sup_abs_v = std::abs(v);

  for (std::size_t k = 0; k < steps; ++k) {
    const double friction = std::abs(v) > 1.0 / p ? mu * (v > 0.0 ? 1.0 : -1.0) : mu * p * v;
    const double v_next = v + dt * (eta - v - friction);
    const double eta_next = options.noise ? eta - decay * eta + kick * normal(rng) : eta;
    v = v_next;
    eta = eta_next;
    out.sup_abs_v = std::max(out.sup_abs_v, std::abs(v));
    if (static_cast<double>(k + 1) * dt > options.burn_in) {
      sum_v2 += v * v;
      sum_eta2 += eta * eta;
      ++counted;
    }
    if (options.record_stride > 0 && (k + 1) % options.record_stride == 0) record(k + 1);
  }
  if (counted > 0) {
    out.mean_v_squared = sum_v2 / static_cast<double>(counted);
    out.mean_eta_squared = sum_eta2 / static_cast<double>(counted);
  }
  return out;
}

double penalized_sup_difference(const Params& params, double p, double q, double T, double dt,
                                std::uint64_t seed) {
  PenalizedOptions a;
  a.p = p;
  a.T = T;
  a.dt = dt;
  a.record_stride = 1;
  PenalizedOptions b = a;
  b.p = q;
  Rng ra = make_stream(seed, 0);
  Rng rb = make_stream(seed, 0);
  const PenalizedPath pa = simulate_penalized_reference(params, a, ra);
  const PenalizedPath pb = simulate_penalized_reference(params, b, rb);
  double sup = 0.0;
  for (std::size_t k = 0; k < pa.v.size(); ++k) sup = std::max(sup, std::abs(pa.v[k] - pb.v[k]));
  return sup;
}

}  // namespace dryfric::sim
