#include "dryfric/dryfric.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "dryfric/commands.hpp"
#include "dryfric/csv.hpp"
#include "dryfric/error.hpp"
#include "dryfric/kolmogorov.hpp"
#include "dryfric/mc_stats.hpp"
#include "dryfric/noise_chain.hpp"
#include "dryfric/pdmp_sim.hpp"
#include "dryfric/run_config.hpp"

struct dryfric_config {
  std::string json;
  std::vector<std::string> overrides;
  dryfric::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

dryfric_status to_status(dryfric::ErrorCode c) {
  switch (c) {
    case dryfric::ErrorCode::invalid_argument: return DRYFRIC_INVALID_ARGUMENT;
    case dryfric::ErrorCode::config: return DRYFRIC_CONFIG_ERROR;
    case dryfric::ErrorCode::resource: return DRYFRIC_RESOURCE_REFUSED;
    case dryfric::ErrorCode::numeric: return DRYFRIC_NUMERIC_FAILURE;
    case dryfric::ErrorCode::io: return DRYFRIC_IO_ERROR;
  }
  return DRYFRIC_INTERNAL_ERROR;
}

template <class F>
dryfric_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return DRYFRIC_OK;
  } catch (const dryfric::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DRYFRIC_RESOURCE_REFUSED;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DRYFRIC_INTERNAL_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw dryfric::InvalidArgument(std::string(what) + " is NULL");
}

void copy_out(const std::string& s, char* buf, size_t len) {
  if (!buf || len == 0) return;
  const size_t n = std::min(len - 1, s.size());
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

}  // namespace

extern "C" {

DRYFRIC_API const char* dryfric_version(void) { return dryfric::csv::version(); }

DRYFRIC_API const char* dryfric_last_error(void) { return g_last_error.c_str(); }

DRYFRIC_API dryfric_status dryfric_config_from_json(const char* json, dryfric_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto h = std::make_unique<dryfric_config>();
    h->json = json ? json : "";
    h->config = dryfric::parse_config(h->json);
    *out = h.release();
  });
}

DRYFRIC_API dryfric_status dryfric_config_from_file(const char* path, dryfric_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    std::ifstream in(path);
    if (!in) throw dryfric::ConfigError(std::string("cannot read config file ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    auto h = std::make_unique<dryfric_config>();
    h->json = text.str();
    h->config = dryfric::parse_config(h->json);
    *out = h.release();
  });
}

DRYFRIC_API void dryfric_config_free(dryfric_config* cfg) { delete cfg; }

DRYFRIC_API dryfric_status dryfric_config_override(dryfric_config* cfg, const char* assignment) {
  return guarded([&] {
    require(cfg, "cfg");
    require(assignment, "assignment");
    auto ov = cfg->overrides;
    ov.emplace_back(assignment);
    cfg->config = dryfric::parse_config(cfg->json, ov);
    cfg->overrides = std::move(ov);
  });
}

DRYFRIC_API dryfric_status dryfric_config_hash(const dryfric_config* cfg, char* buf, size_t len) {
  return guarded([&] {
    require(cfg, "cfg");
    require(buf, "buf");
    if (len < 17) throw dryfric::InvalidArgument("hash buffer needs 17 bytes");
    copy_out(cfg->config.hash(), buf, len);
  });
}

DRYFRIC_API dryfric_status dryfric_run(const dryfric_config* cfg, const char* command, char* summary,
                                       size_t len) {
  return guarded([&] {
    require(cfg, "cfg");
    require(command, "command");
    const auto r = dryfric::commands::run(command, cfg->config);
    copy_out(r.summary, summary, len);
  });
}

DRYFRIC_API dryfric_status dryfric_band_mass(const dryfric_config* cfg, double* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dryfric::noise_chain::band_mass(dryfric::Model(cfg->config.params));
  });
}

DRYFRIC_API dryfric_status dryfric_stationary_det(const dryfric_config* cfg, int p, double lambda,
                                                  double out[4]) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    dryfric::kolmogorov::AssembleOptions o;
    o.memory_budget_bytes = cfg->config.memory_budget;
    const auto det =
        dryfric::kolmogorov::stationary_statistics_det(dryfric::Model(cfg->config.params), p, lambda, o);
    for (int s = 0; s < 4; ++s) out[s] = det.at_s_plus[static_cast<size_t>(s)];
  });
}

DRYFRIC_API dryfric_status dryfric_stationary_mc(const dryfric_config* cfg, uint64_t n, double out[4],
                                                 double stderr_out[4]) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const dryfric::Model model(cfg->config.params);
    const auto ex = dryfric::sim::simulate_excursions(model, n, cfg->config.params.seed, cfg->config.threads);
    const auto t = dryfric::stats::stationary_statistics(ex);
    for (int s = 0; s < 4; ++s) {
      out[s] = t[static_cast<size_t>(s)].value;
      if (stderr_out) stderr_out[s] = t[static_cast<size_t>(s)].stderr_;
    }
  });
}

DRYFRIC_API dryfric_status dryfric_p_stick(const dryfric_config* cfg, int p, double* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    dryfric::kolmogorov::AssembleOptions o;
    o.memory_budget_bytes = cfg->config.memory_budget;
    const auto op = dryfric::kolmogorov::assemble(dryfric::Model(cfg->config.params), p, o);
    *out = dryfric::kolmogorov::p_stick_systems(op).p_stick;
  });
}

}  // extern "C"
