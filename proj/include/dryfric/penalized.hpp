#pragma once

#include <cstddef>
#include <vector>

#include "dryfric/model.hpp"
#include "dryfric/rng.hpp"

namespace dryfric::sim {

/// Reference solver for mu_d = mu_s = mu: Ornstein-Uhlenbeck forcing (Euler-
/// Maruyama) driving the Moreau-Yosida penalized ODE
///   v' + mu * phi_p'(v) = eta - v,  phi_p'(v) = sign(v) if |v| > 1/p else p v,
/// integrated with explicit Euler.
struct PenalizedOptions {
  double p = 1e3;
  double T = 1.0;
  double dt = 1e-4;
  double eta0 = 0.0;
  double v0 = 0.0;
  bool noise = true;              ///< false freezes eta at eta0
  double burn_in = 0.0;           ///< time excluded from the averages
  std::size_t record_stride = 0;  ///< keep every k-th step; 0 keeps none
};

struct PenalizedPath {
  std::vector<double> t;
  std::vector<double> eta;
  std::vector<double> v;
  double mean_v_squared = 0.0;  ///< time average after burn-in
  double mean_eta_squared = 0.0;
  double sup_abs_v = 0.0;
  std::size_t steps = 0;
};

PenalizedPath simulate_penalized_reference(const Params& params, const PenalizedOptions& options,
                                           Rng& rng);

/// sup_t |v^p(t) - v^q(t)| for two penalizations driven by the same noise.
double penalized_sup_difference(const Params& params, double p, double q, double T, double dt,
                                std::uint64_t seed);

}  // namespace dryfric::sim
