#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "curres/lattice.hpp"
#include "curres/measure.hpp"
#include "curres/rng.hpp"

namespace curres {

enum class EventType { hop, birth, death };

struct EventRecord {
  EventType type = EventType::hop;
  double time = 0.0;
  int from = -1;
  int to = -1;
};

const char* event_name(EventType type) noexcept;

struct EventCounters {
  std::int64_t births = 0;
  std::int64_t deaths = 0;
  std::int64_t jumps = 0;
};

/// Independent walkers on {0, ..., 1/eps} with reflection, births at 0 and
/// deaths at the rightmost occupied site, both at rate eps*j.
class SimState {
 public:
  SimState(const LatticeParams& params, ParticleConfig cfg, std::uint64_t seed, std::uint64_t stream = 0);

  const LatticeParams& params() const noexcept { return params_; }
  const ParticleConfig& config() const noexcept { return cfg_; }
  ParticleConfig& config() noexcept { return cfg_; }
  double clock() const noexcept { return clock_; }
  const EventCounters& counters() const noexcept { return counters_; }
  Rng& rng() noexcept { return rng_; }

  /// Hop rate: interior particles at rate 1, boundary particles at rate 1/2.
  double hop_rate() const noexcept;
  double birth_rate() const noexcept;
  double death_rate() const noexcept;
  double total_rate() const noexcept { return hop_rate() + birth_rate() + death_rate(); }

  void set_clock(double t) noexcept { clock_ = t; }
  void count(EventType type) noexcept;

 private:
  LatticeParams params_;
  ParticleConfig cfg_;
  Rng rng_;
  double clock_ = 0.0;
  EventCounters counters_;
};

/// Picks the next event given its type and applies it; the clock is untouched.
EventRecord apply_event(SimState& state, EventType type);

/// Samples the waiting time and the next event and applies both.
EventRecord step(SimState& state);

/// Advances to time T. The draw that would overshoot T is discarded, which
/// is exact by memorylessness.
void advance_to(SimState& state, double T, std::vector<EventRecord>* log = nullptr);

struct Snapshot {
  double time = 0.0;
  std::int64_t total = 0;
  bool sparse = false;
  std::vector<std::int64_t> counts;
  std::vector<std::pair<int, std::int64_t>> occupied;

  /// Rebuilds the configuration on {0, ..., last_site}.
  ParticleConfig to_config(int last_site) const;
};

/// Snapshot stored sparsely when fewer than 10% of the sites are occupied.
Snapshot take_snapshot(const ParticleConfig& cfg, double time);

/// Runs to T_micro recording the initial state and the state at each sample time.
std::vector<Snapshot> run_until(SimState& state, double T_micro, std::span<const double> sample_times = {},
                                std::vector<EventRecord>* log = nullptr);

/// max_x |eps * F_eps(x) - F(eps * x)| for a suffix-mass function F on [0, 1].
double hydrodynamic_gap(const ParticleConfig& cfg, const LatticeParams& params,
                        const std::function<double(double)>& F);
double hydrodynamic_gap(const ParticleConfig& cfg, const LatticeParams& params, const MeasureU& rho);
double hydrodynamic_gap(const Snapshot& snap, const LatticeParams& params,
                        const std::function<double(double)>& F);

}  // namespace curres
