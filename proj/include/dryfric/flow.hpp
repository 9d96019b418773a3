#pragma once

#include <array>
#include <limits>

#include "dryfric/model.hpp"

namespace dryfric::flow {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Functionals f(eta, nu, v) whose time integrals are accumulated along paths.
/// The first five enter the stationary statistics; velocity and eta are odd
/// functionals used for symmetry checks.
enum class Functional : int {
  one = 0,
  v_squared,
  eta_squared,
  stick_indicator,  ///< 1{nu = 0, |eta| <= mu_s}
  band_indicator,   ///< 1{|eta| <= mu_s}
  velocity,
  eta,
};
inline constexpr int kFunctionalCount = 7;
using FunctionalValues = std::array<double, kFunctionalCount>;

inline constexpr int index_of(Functional f) noexcept { return static_cast<int>(f); }

struct FlowSegment {
  double eta = 0.0;
  Mode nu = Mode::stuck;
  double v0 = 0.0;
  double duration = 0.0;
};

/// Phi_{eta,nu}(t, v): exponential relaxation toward eta - nu*mu_d, frozen at 0
/// in the static phase.
double flow(double eta, Mode nu, double t, double v, double mu_d) noexcept;

/// First time the flow reaches v = 0, or kInfinity when it never does.
double hitting_time(double eta, Mode nu, double v, double mu_d) noexcept;
double hitting_time(const State& state, const Model& model) noexcept;

/// Exact integral of f along the flow over [0, seg.duration].
double segment_integral(Functional f, const FlowSegment& seg, const Params& params) noexcept;

/// All functionals at once; one exponential evaluation per segment.
void accumulate_segment(const FlowSegment& seg, const Params& params, FunctionalValues& acc) noexcept;

}  // namespace dryfric::flow
