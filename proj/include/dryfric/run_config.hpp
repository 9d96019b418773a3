#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dryfric/model.hpp"

namespace dryfric {

/// Everything a subcommand needs. Loaded from one JSON document whose keys
/// are exactly the field names below; unknown keys are rejected.
struct RunConfig {
  Params params;

  // Monte Carlo
  std::size_t n_excursions = 100000;
  unsigned threads = 1;
  std::size_t nbins = 200;

  // deterministic solves; an empty `deltas` means params.delta only
  std::vector<double> deltas;
  std::vector<int> p{256};
  std::vector<double> lambda{1e-6};
  double memory_budget = 4.0 * 1024 * 1024 * 1024;

  // durations: f(0+) from lambda F(lambda) on lambda = Lambda 2^e,
  // e in [f0_exp_lo, f0_exp_hi]; MC bins have width f0_bin_width / Lambda
  int f0_exp_lo = 3;
  int f0_exp_hi = 8;
  bool durations_mc = true;
  double f0_bin_width = 0.5;
  std::vector<double> laplace_lambdas;  // empty: Lambda 2^e, e in [-8, 8]

  // power spectral density
  std::vector<double> omega;  // empty: 64 symmetric points in [-omega_max, omega_max]
  double omega_max = 8.0;
  bool psd_mc = false;
  double psd_T = 1e4;
  double psd_dt = 0.05;
  double psd_segment = 25.0;

  // extrapolation
  std::string grid_csv;
  std::vector<std::pair<int, int>> targets;  // empty: {7..9}x{5} and {5..9}x{6}

  // order study
  std::vector<int> kappa_p{64, 128, 256};

  std::string output_dir = ".";

  /// Canonical JSON of every setting that can change a result.
  std::string canonical;
  std::string hash() const;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  std::vector<double> delta_list() const;
  std::vector<double> omega_grid() const;
  std::vector<std::pair<int, int>> target_cells() const;
};

/// Parses JSON text, then applies "key=value" overrides; value is read as
/// JSON when it parses, otherwise as a string. Throws ConfigError.
RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// The configuration with nothing overridden.
RunConfig default_config();

}  // namespace dryfric
