#include "dryfric/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dryfric/csv.hpp"
#include "dryfric/error.hpp"

namespace dryfric {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {
    "mu_s",        "mu_d",         "tau",          "delta",      "L_eta",       "seed",
    "n_excursions", "threads",     "nbins",        "deltas",     "p",           "lambda",
    "memory_budget", "f0_exp_lo",  "f0_exp_hi",    "durations_mc", "f0_bin_width",
    "laplace_lambdas", "omega",    "omega_max",    "psd_mc",     "psd_T",       "psd_dt",
    "psd_segment", "grid_csv",     "targets",      "kappa_p",    "output_dir"};

template <class T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

// Scalars are accepted where a list is expected.
template <class T>
void read_list(const json& j, const char* key, std::vector<T>& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if (it->is_array())
      out = it->template get<std::vector<T>>();
    else
      out = {it->template get<T>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["mu_s"] = c.params.mu_s;
  j["mu_d"] = c.params.mu_d;
  j["tau"] = c.params.tau;
  j["delta"] = c.params.delta;
  j["L_eta"] = c.params.L_eta;
  j["seed"] = c.params.seed;
  j["n_excursions"] = c.n_excursions;
  j["threads"] = c.threads;
  j["nbins"] = c.nbins;
  j["deltas"] = c.deltas;
  j["p"] = c.p;
  j["lambda"] = c.lambda;
  j["memory_budget"] = c.memory_budget;
  j["f0_exp_lo"] = c.f0_exp_lo;
  j["f0_exp_hi"] = c.f0_exp_hi;
  j["durations_mc"] = c.durations_mc;
  j["f0_bin_width"] = c.f0_bin_width;
  j["laplace_lambdas"] = c.laplace_lambdas;
  j["omega"] = c.omega;
  j["omega_max"] = c.omega_max;
  j["psd_mc"] = c.psd_mc;
  j["psd_T"] = c.psd_T;
  j["psd_dt"] = c.psd_dt;
  j["psd_segment"] = c.psd_segment;
  j["grid_csv"] = c.grid_csv;
  j["targets"] = c.targets;
  j["kappa_p"] = c.kappa_p;
  j["output_dir"] = c.output_dir;
  return j;
}

}  // namespace

std::string RunConfig::hash() const { return csv::digest(canonical); }

void RunConfig::validate() const {
  for (double d : delta_list()) {
    Params q = params;
    q.delta = d;
    q.validate();
  }
  if (n_excursions < 2) throw ConfigError("n_excursions must be >= 2");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (nbins < 2) throw ConfigError("nbins must be >= 2");
  if (p.empty()) throw ConfigError("p must list at least one refinement");
  for (int q : p)
    if (q < 1) throw ConfigError("every p must be >= 1");
  for (double l : lambda)
    if (!(l > 0.0)) throw ConfigError("every lambda must be > 0");
  if (!(memory_budget > 0.0)) throw ConfigError("memory_budget must be > 0");
  if (f0_exp_hi - f0_exp_lo < 2) throw ConfigError("f0 exponent range needs at least three points");
  if (!(f0_bin_width > 0.0)) throw ConfigError("f0_bin_width must be > 0");
  for (double l : laplace_lambdas)
    if (!(l > 0.0)) throw ConfigError("laplace_lambdas must be > 0");
  if (!(omega_max > 0.0)) throw ConfigError("omega_max must be > 0");
  if (!(psd_T > 0.0) || !(psd_dt > 0.0) || !(psd_segment > psd_dt) || psd_segment > psd_T)
    throw ConfigError("psd_T, psd_dt and psd_segment must satisfy 0 < dt < segment <= T");
  for (int q : kappa_p)
    if (q < 2 || q % 2) throw ConfigError("kappa_p entries must be even and >= 2");
}

std::vector<double> RunConfig::delta_list() const {
  return deltas.empty() ? std::vector<double>{params.delta} : deltas;
}

std::vector<double> RunConfig::omega_grid() const {
  if (!omega.empty()) return omega;
  std::vector<double> out(64);
  for (int k = 0; k < 64; ++k) out[static_cast<std::size_t>(k)] = omega_max * (2.0 * k - 63.0) / 63.0;
  return out;
}

std::vector<std::pair<int, int>> RunConfig::target_cells() const {
  if (!targets.empty()) return targets;
  std::vector<std::pair<int, int>> out;
  for (int k = 7; k <= 9; ++k) out.emplace_back(k, 5);
  for (int k = 5; k <= 9; ++k) out.emplace_back(k, 6);
  return out;
}

RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json j;
  try {
    j = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + ov + "' is not key=value");
    const std::string key = ov.substr(0, eq), text = ov.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    j[key] = value;
  }

  for (const auto& [key, _] : j.items())
    if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

  RunConfig c;
  read(j, "mu_s", c.params.mu_s);
  read(j, "mu_d", c.params.mu_d);
  read(j, "tau", c.params.tau);
  read(j, "delta", c.params.delta);
  read(j, "L_eta", c.params.L_eta);
  read(j, "seed", c.params.seed);
  read(j, "n_excursions", c.n_excursions);
  read(j, "threads", c.threads);
  read(j, "nbins", c.nbins);
  read_list(j, "deltas", c.deltas);
  read_list(j, "p", c.p);
  read_list(j, "lambda", c.lambda);
  read(j, "memory_budget", c.memory_budget);
  read(j, "f0_exp_lo", c.f0_exp_lo);
  read(j, "f0_exp_hi", c.f0_exp_hi);
  read(j, "durations_mc", c.durations_mc);
  read(j, "f0_bin_width", c.f0_bin_width);
  read_list(j, "laplace_lambdas", c.laplace_lambdas);
  read_list(j, "omega", c.omega);
  read(j, "omega_max", c.omega_max);
  read(j, "psd_mc", c.psd_mc);
  read(j, "psd_T", c.psd_T);
  read(j, "psd_dt", c.psd_dt);
  read(j, "psd_segment", c.psd_segment);
  read(j, "grid_csv", c.grid_csv);
  read(j, "targets", c.targets);
  read_list(j, "kappa_p", c.kappa_p);
  read(j, "output_dir", c.output_dir);

  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  // threads and output_dir do not change any result
  json effective = to_json(c);
  effective.erase("threads");
  effective.erase("output_dir");
  c.canonical = effective.dump();
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

RunConfig default_config() { return parse_config("{}"); }

}  // namespace dryfric
