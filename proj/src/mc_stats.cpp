#include "dryfric/mc_stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "dryfric/error.hpp"

namespace dryfric::stats {

EstimateWithCI EstimateWithCI::from(double value, double stderr_value, std::size_t n) {
  EstimateWithCI e;
  e.value = value;
  e.stderr_ = stderr_value;
  e.lo95 = value - 1.96 * stderr_value;
  e.hi95 = value + 1.96 * stderr_value;
  e.n = n;
  return e;
}

EstimateWithCI ratio_estimate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("ratio_estimate: X and Y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("ratio_estimate: needs at least two samples");
  const double nd = static_cast<double>(n);
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / nd;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / nd;
  if (ybar == 0.0) throw InvalidArgument("ratio_estimate: mean of Y is zero");
  // centred second moments, accumulated after the means for stability
  double cxx = 0.0, cxy = 0.0, cyy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = x[k] - xbar;
    const double dy = y[k] - ybar;
    cxx += dx * dx;
    cxy += dx * dy;
    cyy += dy * dy;
  }
  cxx /= nd;
  cxy /= nd;
  cyy /= nd;
  const double g1 = 1.0 / ybar;
  const double g2 = -xbar / (ybar * ybar);
  const double sigma2 = std::max(0.0, g1 * g1 * cxx + 2.0 * g1 * g2 * cxy + g2 * g2 * cyy);
  return EstimateWithCI::from(xbar / ybar, std::sqrt(sigma2 / nd), n);
}

const char* statistic_name(Statistic s) noexcept {
  switch (s) {
    case Statistic::p_stick: return "S1_p_stick";
    case Statistic::v_squared: return "S2_v_squared";
    case Statistic::band: return "S3_band";
    case Statistic::eta_squared: return "S4_eta_squared";
  }
  return "unknown";
}

flow::Functional functional_of(Statistic s) noexcept {
  switch (s) {
    case Statistic::p_stick: return flow::Functional::stick_indicator;
    case Statistic::v_squared: return flow::Functional::v_squared;
    case Statistic::band: return flow::Functional::band_indicator;
    case Statistic::eta_squared: return flow::Functional::eta_squared;
  }
  return flow::Functional::one;
}

namespace {

std::vector<double> column(std::span<const sim::Excursion> ex, auto&& get) {
  std::vector<double> out;
  out.reserve(ex.size());
  for (const auto& e : ex) out.push_back(get(e));
  return out;
}

}  // namespace

StatisticTable stationary_statistics(std::span<const sim::Excursion> excursions) {
  const auto y = column(excursions, [](const sim::Excursion& e) { return e.tau1; });
  StatisticTable table;
  for (int s = 0; s < kStatisticCount; ++s) {
    const flow::Functional f = functional_of(static_cast<Statistic>(s));
    const auto x = column(excursions, [f](const sim::Excursion& e) { return e.integral(f); });
    table[static_cast<std::size_t>(s)] = ratio_estimate(x, y);
  }
  return table;
}

EstimateWithCI dynamic_fraction(std::span<const sim::Excursion> excursions) {
  const auto x = column(excursions, [](const sim::Excursion& e) { return e.tau_hat1; });
  const auto y = column(excursions, [](const sim::Excursion& e) { return e.tau1; });
  return ratio_estimate(x, y);
}

DurationHistogram make_histogram(std::span<const double> samples, std::size_t nbins, double lo,
                                 double hi) {
  if (nbins == 0 || !(hi > lo)) throw InvalidArgument("histogram needs nbins > 0 and hi > lo");
  DurationHistogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(nbins, 0);
  h.n = samples.size();
  std::size_t outside = 0;
  const double scale = static_cast<double>(nbins) / (hi - lo);
  for (double s : samples) {
    if (s < lo || s >= hi) {
      ++outside;
      continue;
    }
    auto b = static_cast<std::size_t>((s - lo) * scale);
    h.counts[std::min(b, nbins - 1)]++;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, h.n));
  h.tail_mass = static_cast<double>(outside) / n;
  h.density.resize(nbins);
  const double w = h.width();
  for (std::size_t b = 0; b < nbins; ++b) h.density[b] = static_cast<double>(h.counts[b]) / (n * w);
  return h;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw InvalidArgument("quantile of an empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(lo), samples.end());
  const double a = samples[lo];
  if (hi == lo) return a;
  const double b = *std::min_element(samples.begin() + static_cast<std::ptrdiff_t>(lo) + 1, samples.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

DurationHistograms duration_histograms(std::span<const sim::Excursion> excursions, std::size_t nbins,
                                       std::optional<double> upper) {
  if (excursions.empty()) throw InvalidArgument("duration_histograms needs at least one excursion");
  const auto stick = column(excursions, [](const sim::Excursion& e) { return e.stick_time(); });
  const auto slide = column(excursions, [](const sim::Excursion& e) { return e.tau_hat1; });
  const auto total = column(excursions, [](const sim::Excursion& e) { return e.tau1; });
  auto build = [&](const std::vector<double>& s) {
    double hi = upper ? *upper : quantile(s, 0.995);
    if (!(hi > 0.0)) hi = *std::max_element(s.begin(), s.end()) + 1.0;
    return make_histogram(s, nbins, 0.0, hi);
  };
  return {build(stick), build(slide), build(total)};
}

F0Estimate f0_estimate(const DurationHistogram& hist) {
  if (hist.bins() < 2 || hist.counts[0] == 0 || hist.counts[1] == 0)
    throw NumericError("f0_estimate: the first histogram bins are empty");
  F0Estimate e;
  e.first_bin = hist.density[0];
  // line through the bin centres w/2 and 3w/2, evaluated at 0
  e.two_bin = 1.5 * hist.density[0] - 0.5 * hist.density[1];
  return e;
}

DurationHistogram near_zero_histogram(std::span<const double> samples, double q, std::size_t nbins) {
  const double hi = quantile(std::vector<double>(samples.begin(), samples.end()), q);
  if (!(hi > 0.0)) throw NumericError("near_zero_histogram: degenerate quantile");
  return make_histogram(samples, nbins, 0.0, hi);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  // Kolmogorov distribution with the Stephens small-sample correction
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

double lag1_autocorrelation(std::span<const double> x) {
  if (x.size() < 3) throw InvalidArgument("lag1_autocorrelation needs at least three samples");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - mean;
    den += d * d;
    if (k + 1 < x.size()) num += d * (x[k + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

std::vector<double> welch_psd(std::span<const double> x, double dt, std::size_t segment,
                              std::span<const double> omega) {
  if (segment < 4 || x.size() < segment) throw InvalidArgument("welch_psd: segment longer than the record");
  const std::size_t hop = segment / 2;
  std::vector<double> w(segment);
  double w2 = 0.0;
  for (std::size_t m = 0; m < segment; ++m) {
    w[m] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(m) / static_cast<double>(segment)));
    w2 += w[m] * w[m];
  }
  std::vector<double> out(omega.size(), 0.0);
  std::size_t count = 0;
  for (std::size_t start = 0; start + segment <= x.size(); start += hop, ++count) {
    for (std::size_t q = 0; q < omega.size(); ++q) {
      // rotate a phasor instead of calling sin/cos per sample
      const std::complex<double> step = std::polar(1.0, -omega[q] * dt);
      std::complex<double> phase = 1.0, acc = 0.0;
      for (std::size_t m = 0; m < segment; ++m) {
        acc += w[m] * x[start + m] * phase;
        phase *= step;
      }
      out[q] += dt * std::norm(acc) / w2;
    }
  }
  for (double& v : out) v /= static_cast<double>(count);
  return out;
}

EstimateWithCI batch_means(std::span<const double> w) {
  if (w.size() < 2) throw InvalidArgument("batch_means needs at least two windows");
  const double n = static_cast<double>(w.size());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : w) ss += (x - mean) * (x - mean);
  return EstimateWithCI::from(mean, std::sqrt(ss / (n - 1.0) / n), w.size());
}

}  // namespace dryfric::stats
