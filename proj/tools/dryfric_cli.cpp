// Command line front end. Everything goes through the C API of libdryfric.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dryfric/dryfric.h"

namespace {

struct ConfigDeleter {
  void operator()(dryfric_config* c) const { dryfric_config_free(c); }
};
using ConfigPtr = std::unique_ptr<dryfric_config, ConfigDeleter>;

int exit_code(dryfric_status s) {
  switch (s) {
    case DRYFRIC_OK: return 0;
    case DRYFRIC_INVALID_ARGUMENT:
    case DRYFRIC_CONFIG_ERROR: return 2;
    case DRYFRIC_RESOURCE_REFUSED: return 3;
    case DRYFRIC_NUMERIC_FAILURE: return 4;
    default: return 1;
  }
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

int fail(dryfric_status s) {
  std::fprintf(stderr, "dryfric: %s\n", dryfric_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy dry friction: excursion Monte Carlo and Kolmogorov solvers"};
  app.set_version_flag("--version", std::string(dryfric_version()));
  app.require_subcommand(1);

  std::string config_path, out_dir, grid_csv;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--threads", threads, "worker threads for Monte Carlo");
    sub->add_option("--override", overrides, "key=value, repeatable")->allow_extra_args(false);
  };

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "excursion Monte Carlo: S1..S4 with CIs and duration histograms"},
      {"solve", "Kolmogorov resolvent solves of S1..S4 per (delta, p, lambda)"},
      {"durations", "Laplace transforms of phase durations and f(0+) by both methods"},
      {"psd", "power spectral density of v, optionally against a Welch periodogram"},
      {"extrapolate", "fill missing (p, delta) cells of a statistic grid"},
      {"kappa", "empirical convergence order in p"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (std::string(name) == "extrapolate") sub->add_option("--grid", grid_csv, "grid CSV (statistic,k,l,value)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  dryfric_config* raw = nullptr;
  dryfric_status s = config_path.empty() ? dryfric_config_from_json("", &raw)
                                         : dryfric_config_from_file(config_path.c_str(), &raw);
  if (s != DRYFRIC_OK) return fail(s);
  ConfigPtr cfg(raw);

  std::vector<std::string> all = overrides;
  if (sub->count("--out")) all.push_back("output_dir=" + json_string(out_dir));
  if (sub->count("--seed")) all.push_back("seed=" + std::to_string(seed));
  if (sub->count("--threads")) all.push_back("threads=" + std::to_string(threads));
  if (!grid_csv.empty()) all.push_back("grid_csv=" + json_string(grid_csv));
  for (const auto& ov : all) {
    s = dryfric_config_override(cfg.get(), ov.c_str());
    if (s != DRYFRIC_OK) return fail(s);
  }

  std::string summary(1 << 16, '\0');
  s = dryfric_run(cfg.get(), command.c_str(), summary.data(), summary.size());
  if (s != DRYFRIC_OK) return fail(s);
  std::fputs(summary.c_str(), stdout);
  return 0;
}
