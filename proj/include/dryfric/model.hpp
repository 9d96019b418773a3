#pragma once

#include <cstdint>

namespace dryfric {

/// Physical and lattice configuration of the noisy dry-friction process.
///
/// The forcing eta lives on the lattice delta*Z truncated to [-N delta, N delta]
/// with N = floor(L_eta / delta). Velocities obey
///   dv/dt = -nu*mu_d + eta - v      (dynamic phase, nu = +-1)
/// and dv/dt = 0 in the static phase (nu = 0).
struct Params {
  double mu_s = 1.0;   ///< static friction threshold
  double mu_d = 0.25;  ///< dynamic friction force, 0 < mu_d <= mu_s
  double tau = 1.0;    ///< correlation time of the forcing
  double delta = 0.5;  ///< lattice spacing of eta
  double L_eta = 4.0;  ///< truncation half-width of the eta lattice
  std::uint64_t seed = 1;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

enum class Mode : int { negative = -1, stuck = 0, positive = 1 };

constexpr int sign_of(Mode m) noexcept { return static_cast<int>(m); }
constexpr Mode flipped(Mode m) noexcept { return static_cast<Mode>(-static_cast<int>(m)); }

/// Point of the state space. eta is always i*delta; it is never stored.
struct State {
  int i = 0;
  Mode nu = Mode::stuck;
  double v = 0.0;
};

/// Index bookkeeping for the eta lattice.
struct LatticeIndexing {
  int N = 0;        ///< lattice is {-N, ..., N}
  int k_mu_s = 0;   ///< largest index with eta_k <= mu_s
  int k_d = 0;      ///< largest index with eta_k < mu_d
};

/// Validated parameters plus the derived lattice quantities.
class Model {
 public:
  explicit Model(const Params& params);

  const Params& params() const noexcept { return params_; }
  const LatticeIndexing& lattice() const noexcept { return lattice_; }

  int N() const noexcept { return lattice_.N; }
  int k_mu_s() const noexcept { return lattice_.k_mu_s; }
  double delta() const noexcept { return params_.delta; }
  double eta(int i) const noexcept { return i * params_.delta; }
  double eta_max() const noexcept { return lattice_.N * params_.delta; }

  /// Total jump rate of the forcing chain, 2 / (tau delta^2).
  double jump_rate() const noexcept { return rate_; }

  /// Probability that the forcing jumps from index i to i+1.
  double alpha(int i) const noexcept;

  bool in_static_band(int i) const noexcept {
    return i >= -lattice_.k_mu_s && i <= lattice_.k_mu_s;
  }

  /// Exit points of the static phase: (+-eta_{k+1}, +-1, 0).
  State s_plus() const noexcept { return {lattice_.k_mu_s + 1, Mode::positive, 0.0}; }
  State s_minus() const noexcept { return {-lattice_.k_mu_s - 1, Mode::negative, 0.0}; }

  /// Mode of a lattice point (i, v); uses the index so ties on mu_s are exact.
  Mode theta(int i, double v) const noexcept;

 private:
  Params params_;
  LatticeIndexing lattice_;
  double rate_;
};

Mode theta(double eta, double v, const Params& params) noexcept;

/// Vector field B(eta, nu, v) with b(eta, v) = eta - v.
double drift(double eta, Mode nu, double v, const Params& params) noexcept;

/// Bound eta_N - mu_d on the velocity of trajectories started inside it.
double v_max(const Params& params);

int lattice_half_count(const Params& params) noexcept;

}  // namespace dryfric
