#include "dryfric/pdmp_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "dryfric/error.hpp"
#include "dryfric/noise_chain.hpp"

namespace dryfric::sim {

namespace {

constexpr std::size_t kExcursionBatch = 256;

[[noreturn]] void cap_exceeded(std::uint64_t cap) {
  std::ostringstream msg;
  msg << "event cap of " << cap << " exceeded; the configuration is probably inconsistent";
  throw NumericError(msg.str());
}

}  // namespace

Engine::Engine(const Model& model, const State& initial) : model_(&model), state_(initial) {}

void Engine::land_on_boundary() noexcept {
  state_.v = 0.0;
  state_.nu = model_->in_static_band(state_.i) ? Mode::stuck : flipped(state_.nu);
}

Engine::Step Engine::advance(Rng& rng, double horizon) {
  const Model& m = *model_;
  const double mu_d = m.params().mu_d;
  const double eta = m.eta(state_.i);

  Step step;
  step.i = state_.i;
  step.segment.eta = eta;
  step.segment.nu = state_.nu;
  step.segment.v0 = state_.v;

  const double t_hit = flow::hitting_time(eta, state_.nu, state_.v, mu_d);
  const double t_jump = exponential(rng, m.jump_rate());

  if (std::min(t_hit, t_jump) > horizon) {
    step.event = Event::horizon;
    step.segment.duration = horizon;
    state_.v = flow::flow(eta, state_.nu, horizon, state_.v, mu_d);
    time_ += horizon;
    return step;
  }

  ++events_;
  if (t_hit <= t_jump) {
    step.event = Event::boundary;
    step.segment.duration = t_hit;
    time_ += t_hit;
    land_on_boundary();
    return step;
  }

  const double v_new = flow::flow(eta, state_.nu, t_jump, state_.v, mu_d);
  if (state_.nu != Mode::stuck && sign_of(state_.nu) * v_new <= 0.0 && std::isfinite(t_hit)) {
    // Rounding put the jump at or past the hitting time: take the boundary.
    step.event = Event::boundary;
    step.segment.duration = t_hit;
    time_ += t_hit;
    land_on_boundary();
    return step;
  }

  step.event = Event::jump;
  step.segment.duration = t_jump;
  time_ += t_jump;
  state_.v = v_new;
  state_.i = noise_chain::sample_jump(m, state_.i, rng);
  if (state_.nu == Mode::stuck) {
    // Leaving the static band lands on s+ or s- with v = 0.
    state_.nu = m.theta(state_.i, 0.0);
  } else if (state_.v == 0.0) {
    state_.nu = m.theta(state_.i, 0.0);
  }
  return step;
}

Excursion simulate_excursion(const Model& model, Rng& rng, int start_sign, const SimOptions& options) {
  Excursion ex;
  ex.start_sign = start_sign >= 0 ? 1 : -1;
  Engine engine(model, ex.start_sign > 0 ? model.s_plus() : model.s_minus());
  bool sticking = false;
  for (;;) {
    const bool was_stuck = engine.state().nu == Mode::stuck;
    const Engine::Step step = engine.advance(rng);
    flow::accumulate_segment(step.segment, model.params(), ex.integrals);
    if (engine.events() > options.event_cap) cap_exceeded(options.event_cap);
    const State& s = engine.state();
    if (!sticking && s.nu == Mode::stuck) {
      sticking = true;
      ex.tau_hat1 = engine.time();
      ex.entry_index = s.i;
    } else if (was_stuck && s.nu != Mode::stuck) {
      ex.tau1 = engine.time();
      ex.exit_sign = s.i > 0 ? 1 : -1;
      break;
    }
  }
  ex.n_events = engine.events();
  return ex;
}

std::vector<Excursion> simulate_excursions(const Model& model, std::size_t n, std::uint64_t seed,
                                           unsigned threads, int start_sign,
                                           const SimOptions& options) {
  std::vector<Excursion> out(n);
  const std::size_t n_batches = (n + kExcursionBatch - 1) / kExcursionBatch;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t b = next++; b < n_batches; b = next++) {
      Rng rng = make_stream(seed, b);
      const std::size_t end = std::min(n, (b + 1) * kExcursionBatch);
      for (std::size_t k = b * kExcursionBatch; k < end; ++k)
        out[k] = simulate_excursion(model, rng, start_sign, options);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n_batches))));
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      try {
        worker();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_batches;
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Excursion> simulate_excursion_chain(const Model& model, std::size_t n, Rng& rng,
                                                const SimOptions& options) {
  std::vector<Excursion> out;
  out.reserve(n);
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(simulate_excursion(model, rng, sign, options));
    sign = out.back().exit_sign;
  }
  return out;
}

PathRecord simulate_path(const Model& model, double T, Rng& rng, const State& initial,
                         const SimOptions& options) {
  PathRecord path;
  path.T = T;
  path.events.push_back({0.0, initial});
  Engine engine(model, initial);
  while (engine.time() < T) {
    const Engine::Step step = engine.advance(rng, T - engine.time());
    if (step.event == Engine::Event::horizon) break;
    if (engine.events() > options.event_cap) cap_exceeded(options.event_cap);
    path.events.push_back({engine.time(), engine.state()});
  }
  return path;
}

PathAverages path_time_averages(const Model& model, double T, Rng& rng, const State& initial,
                                int n_windows, const SimOptions& options) {
  if (!(T > 0.0) || n_windows < 1) throw InvalidArgument("path_time_averages needs T > 0 and n_windows >= 1");
  PathAverages out;
  out.T = T;
  out.window_integrals.assign(static_cast<std::size_t>(n_windows), flow::FunctionalValues{});
  Engine engine(model, initial);
  out.sup_abs_v = std::abs(initial.v);
  const double width = T / n_windows;
  for (int w = 0; w < n_windows; ++w) {
    const double window_end = (w + 1 == n_windows) ? T : (w + 1) * width;
    auto& acc = out.window_integrals[static_cast<std::size_t>(w)];
    while (engine.time() < window_end) {
      const Engine::Step step = engine.advance(rng, window_end - engine.time());
      flow::accumulate_segment(step.segment, model.params(), acc);
      // the flow is monotone on a segment, so the endpoints bound |v|
      out.sup_abs_v = std::max(out.sup_abs_v, std::abs(engine.state().v));
      if (step.event == Engine::Event::horizon) break;
      if (engine.events() > options.event_cap) cap_exceeded(options.event_cap);
    }
    for (int k = 0; k < flow::kFunctionalCount; ++k) out.integrals[k] += acc[k];
  }
  out.n_events = engine.events();
  return out;
}

std::vector<double> sample_velocity(const Model& model, double T, double dt, Rng& rng,
                                    const State& initial, const SimOptions& options) {
  if (!(dt > 0.0) || !(T > dt)) throw InvalidArgument("sample_velocity needs 0 < dt < T");
  const auto n = static_cast<std::size_t>(std::floor(T / dt));
  std::vector<double> v(n);
  const double mu_d = model.params().mu_d;
  Engine engine(model, initial);
  std::size_t k = 0;
  while (k < n) {
    const double t0 = engine.time();
    const double horizon = static_cast<double>(n) * dt - t0;
    const Engine::Step step = engine.advance(rng, horizon);
    if (engine.events() > options.event_cap) cap_exceeded(options.event_cap);
    const double t1 = engine.time();
    // samples strictly inside [t0, t1) come from the flow segment
    while (k < n && static_cast<double>(k) * dt < t1) {
      const double s = static_cast<double>(k) * dt - t0;
      v[k++] = flow::flow(step.segment.eta, step.segment.nu, std::max(0.0, s), step.segment.v0, mu_d);
    }
    if (step.event == Engine::Event::horizon) break;
  }
  return v;
}

void write_path_csv(const PathRecord& path, const Model& model, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file + " for writing");
  out << "t,eta,nu,v\n" << std::setprecision(12);
  for (const PathEvent& e : path.events)
    out << e.t << ',' << model.eta(e.state.i) << ',' << sign_of(e.state.nu) << ',' << e.state.v << '\n';
  if (!out) throw IoError("failed writing " + file);
}

}  // namespace dryfric::sim
