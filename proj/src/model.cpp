#include "dryfric/model.hpp"

#include <cmath>
#include <sstream>

#include "dryfric/error.hpp"

namespace dryfric {

namespace {

// Relative slack used when comparing lattice points to real thresholds, so
// that mu_s = 1, delta = 2^-k puts eta = mu_s inside the static band.
constexpr double kTieSlack = 1e-12;

int largest_index_at_most(double threshold, double delta) {
  return static_cast<int>(std::floor(threshold / delta * (1.0 + kTieSlack)));
}

}  // namespace

int lattice_half_count(const Params& params) noexcept {
  if (!(params.delta > 0.0) || !(params.L_eta > 0.0)) return 0;
  return static_cast<int>(std::floor(params.L_eta / params.delta * (1.0 + kTieSlack)));
}

void Params::validate() const {
  std::ostringstream why;
  if (!(mu_s > 0.0)) why << "mu_s must be > 0; ";
  if (!(mu_d > 0.0)) why << "mu_d must be > 0; ";
  if (mu_d > mu_s) why << "mu_d must not exceed mu_s; ";
  if (!(tau > 0.0)) why << "tau must be > 0; ";
  if (!(delta > 0.0)) why << "delta must be > 0; ";
  if (!(L_eta > 0.0)) why << "L_eta must be > 0; ";
  if (why.str().empty()) {
    const int n = lattice_half_count(*this);
    const double eta_n = n * delta;
    if (n < 1) {
      why << "L_eta/delta must be at least 1; ";
    } else {
      if (!(eta_n > mu_s * (1.0 + kTieSlack)))
        why << "eta_N = " << eta_n << " must exceed mu_s = " << mu_s << "; ";
      // alpha(eta) = (1 - eta*delta/2)/2 must stay in (0,1) on interior points.
      if ((n - 1) * delta * delta >= 2.0 * (1.0 - kTieSlack))
        why << "delta too large for L_eta: interior jump probabilities leave [0,1]; ";
    }
  }
  const std::string msg = why.str();
  if (!msg.empty()) throw ConfigError("invalid parameters: " + msg.substr(0, msg.size() - 2));
}

Model::Model(const Params& params) : params_(params) {
  params_.validate();
  lattice_.N = lattice_half_count(params_);
  lattice_.k_mu_s = largest_index_at_most(params_.mu_s, params_.delta);
  // largest k with eta_k < mu_d (strict)
  int kd = static_cast<int>(std::ceil(params_.mu_d / params_.delta * (1.0 - kTieSlack))) - 1;
  lattice_.k_d = kd;
  rate_ = 2.0 / (params_.tau * params_.delta * params_.delta);
}

double Model::alpha(int i) const noexcept {
  if (i >= lattice_.N) return 0.0;
  if (i <= -lattice_.N) return 1.0;
  return 0.5 * (1.0 - eta(i) * params_.delta / 2.0);
}

Mode Model::theta(int i, double v) const noexcept {
  if (v > 0.0) return Mode::positive;
  if (v < 0.0) return Mode::negative;
  if (i > lattice_.k_mu_s) return Mode::positive;
  if (i < -lattice_.k_mu_s) return Mode::negative;
  return Mode::stuck;
}

Mode theta(double eta, double v, const Params& params) noexcept {
  if (v > 0.0) return Mode::positive;
  if (v < 0.0) return Mode::negative;
  if (eta > params.mu_s) return Mode::positive;
  if (eta < -params.mu_s) return Mode::negative;
  return Mode::stuck;
}

double drift(double eta, Mode nu, double v, const Params& params) noexcept {
  switch (nu) {
    case Mode::negative: return params.mu_d + eta - v;
    case Mode::positive: return -params.mu_d + eta - v;
    case Mode::stuck: break;
  }
  return 0.0;
}

double v_max(const Params& params) {
  params.validate();
  return lattice_half_count(params) * params.delta - params.mu_d;
}

}  // namespace dryfric
