#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dryfric/flow.hpp"
#include "dryfric/model.hpp"
#include "dryfric/rng.hpp"

namespace dryfric::sim {

struct SimOptions {
  /// Excursions are finite almost surely; hitting the cap means a bug or a
  /// misconfiguration, and raises NumericError.
  std::uint64_t event_cap = 1'000'000'000ULL;
};

/// Exact event-driven stepping of the process Z = (eta, nu, v).
///
/// Each call to advance() races the exponential clock of the forcing against
/// the deterministic hitting time of v = 0 and applies whichever fires first.
class Engine {
 public:
  enum class Event { horizon, boundary, jump };

  struct Step {
    Event event = Event::horizon;
    flow::FlowSegment segment;  ///< piece of flow traversed before the event
    int i = 0;                  ///< lattice index during the segment
  };

  Engine(const Model& model, const State& initial);

  /// Runs until the next event or until `horizon` time units have elapsed.
  Step advance(Rng& rng, double horizon = flow::kInfinity);

  const State& state() const noexcept { return state_; }
  double time() const noexcept { return time_; }
  std::uint64_t events() const noexcept { return events_; }

 private:
  void land_on_boundary() noexcept;

  const Model* model_;
  State state_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
};

/// One cycle from s+ (or s-) through a sliding phase and a sticking phase
/// until the process lands on s+ or s- again.
struct Excursion {
  double tau1 = 0.0;      ///< total duration
  double tau_hat1 = 0.0;  ///< duration of the sliding phase
  flow::FunctionalValues integrals{};
  std::uint64_t n_events = 0;
  int entry_index = 0;  ///< lattice index where the static phase was entered
  int start_sign = 1;
  int exit_sign = 1;

  double stick_time() const noexcept { return tau1 - tau_hat1; }
  double integral(flow::Functional f) const noexcept { return integrals[flow::index_of(f)]; }
};

Excursion simulate_excursion(const Model& model, Rng& rng, int start_sign = +1,
                             const SimOptions& options = {});

/// n i.i.d. excursions from s+ (or s-). Excursion k is drawn from stream
/// floor(k / batch) of `seed`, so the result does not depend on `threads`.
std::vector<Excursion> simulate_excursions(const Model& model, std::size_t n, std::uint64_t seed,
                                           unsigned threads = 1, int start_sign = +1,
                                           const SimOptions& options = {});

/// Consecutive excursions of one trajectory: each starts where the previous
/// one ended.
std::vector<Excursion> simulate_excursion_chain(const Model& model, std::size_t n, Rng& rng,
                                                const SimOptions& options = {});

struct PathEvent {
  double t = 0.0;
  State state;
};

/// Event times and post-event states. events.front() is the initial state at
/// t = 0; T is the final time.
struct PathRecord {
  std::vector<PathEvent> events;
  double T = 0.0;
};

PathRecord simulate_path(const Model& model, double T, Rng& rng, const State& initial,
                         const SimOptions& options = {});

/// Time integrals of all functionals over [0, T], also split into equal
/// windows for batch-means error bars.
struct PathAverages {
  double T = 0.0;
  flow::FunctionalValues integrals{};
  std::vector<flow::FunctionalValues> window_integrals;
  double sup_abs_v = 0.0;
  std::uint64_t n_events = 0;
};

PathAverages path_time_averages(const Model& model, double T, Rng& rng, const State& initial,
                                int n_windows, const SimOptions& options = {});

/// Exact velocity samples v(k dt), k = 0..floor(T/dt)-1.
std::vector<double> sample_velocity(const Model& model, double T, double dt, Rng& rng,
                                    const State& initial, const SimOptions& options = {});

/// Writes t, eta, nu, v rows for every event of a path.
void write_path_csv(const PathRecord& path, const Model& model, const std::string& file);

}  // namespace dryfric::sim
