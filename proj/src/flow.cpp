#include "dryfric/flow.hpp"

#include <cmath>

namespace dryfric::flow {

namespace {

bool in_band(double eta, const Params& params) noexcept {
  return std::abs(eta) <= params.mu_s * (1.0 + 1e-12);
}

}  // namespace

double flow(double eta, Mode nu, double t, double v, double mu_d) noexcept {
  if (nu == Mode::stuck) return 0.0;
  const double target = eta - sign_of(nu) * mu_d;
  return target + (v - target) * std::exp(-t);
}

double hitting_time(double eta, Mode nu, double v, double mu_d) noexcept {
  if (nu == Mode::positive && v > 0.0 && eta - mu_d < 0.0) return std::log1p(v / (mu_d - eta));
  if (nu == Mode::negative && v < 0.0 && eta + mu_d > 0.0) return std::log1p(-v / (eta + mu_d));
  return kInfinity;
}

double hitting_time(const State& state, const Model& model) noexcept {
  return hitting_time(model.eta(state.i), state.nu, state.v, model.params().mu_d);
}

void accumulate_segment(const FlowSegment& seg, const Params& params, FunctionalValues& acc) noexcept {
  const double T = seg.duration;
  if (!(T > 0.0)) return;
  const double eta = seg.eta;
  const bool band = in_band(eta, params);
  acc[index_of(Functional::one)] += T;
  acc[index_of(Functional::eta_squared)] += eta * eta * T;
  acc[index_of(Functional::eta)] += eta * T;
  if (band) acc[index_of(Functional::band_indicator)] += T;
  if (seg.nu == Mode::stuck) {
    if (band) acc[index_of(Functional::stick_indicator)] += T;
    return;
  }
  // v(s) = a + c e^{-s}
  const double a = eta - sign_of(seg.nu) * params.mu_d;
  const double c = seg.v0 - a;
  const double one_minus_e1 = -std::expm1(-T);
  const double one_minus_e2 = one_minus_e1 * (2.0 - one_minus_e1);  // 1 - e^{-2T}
  acc[index_of(Functional::v_squared)] += a * a * T + 2.0 * a * c * one_minus_e1 + 0.5 * c * c * one_minus_e2;
  acc[index_of(Functional::velocity)] += a * T + c * one_minus_e1;
}

double segment_integral(Functional f, const FlowSegment& seg, const Params& params) noexcept {
  FunctionalValues acc{};
  accumulate_segment(seg, params, acc);
  return acc[index_of(f)];
}

}  // namespace dryfric::flow
