#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dryfric/pdmp_sim.hpp"

namespace dryfric::stats {

/// Point estimate with a normal-approximation 95% interval.
struct EstimateWithCI {
  double value = 0.0;
  double stderr_ = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  std::size_t n = 0;

  static EstimateWithCI from(double value, double stderr_value, std::size_t n);
  bool covers(double x) const noexcept { return lo95 <= x && x <= hi95; }
};

/// Ratio of sample means Xbar/Ybar with a delta-method standard error,
/// sigma^2 = g^T C g, g = (1/Ybar, -Xbar/Ybar^2), C the empirical covariance.
EstimateWithCI ratio_estimate(std::span<const double> x, std::span<const double> y);

/// The four stationary statistics of the friction process.
enum class Statistic : int {
  p_stick = 0,   ///< S1: fraction of time in the static phase
  v_squared,     ///< S2: E[v^2]
  band,          ///< S3: P(|eta| <= mu_s)
  eta_squared,   ///< S4: E[eta^2]
};
inline constexpr int kStatisticCount = 4;
const char* statistic_name(Statistic s) noexcept;
flow::Functional functional_of(Statistic s) noexcept;

using StatisticTable = std::array<EstimateWithCI, kStatisticCount>;

/// S1..S4 from excursions via the regenerative ratio with Y = tau1.
StatisticTable stationary_statistics(std::span<const sim::Excursion> excursions);

/// Fraction of time spent sliding, X = tau_hat1.
EstimateWithCI dynamic_fraction(std::span<const sim::Excursion> excursions);

/// Uniform-bin histogram normalized so that sum(density)*width + tail = 1.
struct DurationHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
  std::vector<double> density;
  double tail_mass = 0.0;  ///< fraction of samples outside [lo, hi)
  std::size_t n = 0;

  std::size_t bins() const noexcept { return counts.size(); }
  double width() const noexcept { return (hi - lo) / static_cast<double>(counts.size()); }
};

DurationHistogram make_histogram(std::span<const double> samples, std::size_t nbins, double lo,
                                 double hi);

/// Empirical quantile (linear interpolation between order statistics).
double quantile(std::vector<double> samples, double q);

struct DurationHistograms {
  DurationHistogram stick;
  DurationHistogram slide;
  DurationHistogram excursion;
};

/// Histograms of tau1 - tau_hat1, tau_hat1 and tau1. Without an explicit
/// upper limit each uses [0, 99.5th percentile] of its own samples.
DurationHistograms duration_histograms(std::span<const sim::Excursion> excursions,
                                       std::size_t nbins = 200,
                                       std::optional<double> upper = std::nullopt);

struct F0Estimate {
  double first_bin = 0.0;   ///< density of the first bin
  double two_bin = 0.0;     ///< linear extrapolation of the first two bins to 0
};

/// Density at 0+ of a duration histogram. Throws NumericError if the first
/// bins are empty.
F0Estimate f0_estimate(const DurationHistogram& hist);

/// Histogram resolving the neighbourhood of 0: `nbins` bins over
/// [0, quantile(q)].
DurationHistogram near_zero_histogram(std::span<const double> samples, double q, std::size_t nbins);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Lag-1 sample autocorrelation.
double lag1_autocorrelation(std::span<const double> x);

/// Welch estimate of the two-sided spectral density
///   S(omega) = integral of E[x_0 x_t] e^{-i omega t} dt
/// at arbitrary angular frequencies: Hann-windowed segments of `segment`
/// samples with 50% overlap, each contributing dt |sum w x e^{-i omega t}|^2 / sum w^2.
std::vector<double> welch_psd(std::span<const double> x, double dt, std::size_t segment,
                              std::span<const double> omega);

/// Mean of window averages with a batch-means standard error.
EstimateWithCI batch_means(std::span<const double> window_values);

}  // namespace dryfric::stats
