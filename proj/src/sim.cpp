#include "curres/sim.hpp"

#include <algorithm>
#include <cmath>

#include "curres/barriers.hpp"
#include "curres/errors.hpp"

namespace curres {

const char* event_name(EventType type) noexcept {
  switch (type) {
    case EventType::hop: return "hop";
    case EventType::birth: return "birth";
    case EventType::death: return "death";
  }
  return "?";
}

SimState::SimState(const LatticeParams& params, ParticleConfig cfg, std::uint64_t seed, std::uint64_t stream)
    : params_(params), cfg_(std::move(cfg)), rng_(seed, stream) {
  if (cfg_.last_site() != params.last_site()) throw ShapeError("configuration size does not match 1/eps");
}

double SimState::hop_rate() const noexcept {
  const auto boundary = cfg_.counts().front() + cfg_.counts().back();
  return static_cast<double>(cfg_.total()) - 0.5 * static_cast<double>(boundary);
}

double SimState::birth_rate() const noexcept { return params_.eps() * params_.current(); }

double SimState::death_rate() const noexcept { return cfg_.empty() ? 0.0 : birth_rate(); }

void SimState::count(EventType type) noexcept {
  switch (type) {
    case EventType::hop: ++counters_.jumps; break;
    case EventType::birth: ++counters_.births; break;
    case EventType::death: ++counters_.deaths; break;
  }
}

EventRecord apply_event(SimState& state, EventType type) {
  ParticleConfig& cfg = state.config();
  EventRecord ev{type, state.clock(), -1, -1};
  switch (type) {
    case EventType::birth:
      cfg.add(0);
      ev.to = 0;
      break;
    case EventType::death: {
      const int x = *cfg.rightmost_occupied();
      cfg.remove(x);
      ev.from = x;
      break;
    }
    case EventType::hop: {
      // Directed moves: right moves of particles off site L, then left moves of particles off site 0.
      const std::int64_t total = cfg.total();
      const std::int64_t at_left = cfg.counts().front();
      const std::int64_t at_right = cfg.counts().back();
      const std::int64_t rights = total - at_right;
      const auto k = static_cast<std::int64_t>(state.rng().below(static_cast<std::uint64_t>(2 * total - at_left - at_right)));
      if (k < rights) {
        ev.from = cfg.site_of(k);
        ev.to = ev.from + 1;
      } else {
        ev.from = cfg.site_of(at_left + (k - rights));
        ev.to = ev.from - 1;
      }
      cfg.move(ev.from, ev.to);
      break;
    }
  }
  state.count(type);
  return ev;
}

namespace {

EventType pick_type(SimState& state, double hop, double birth, double total) {
  const double u = state.rng().uniform() * total;
  if (u < hop) return EventType::hop;
  if (u < hop + birth) return EventType::birth;
  return EventType::death;
}

}  // namespace

EventRecord step(SimState& state) {
  const double hop = state.hop_rate();
  const double birth = state.birth_rate();
  const double total = hop + birth + state.death_rate();
  state.set_clock(state.clock() + state.rng().exponential(total));
  return apply_event(state, pick_type(state, hop, birth, total));
}

void advance_to(SimState& state, double T, std::vector<EventRecord>* log) {
  while (true) {
    const double hop = state.hop_rate();
    const double birth = state.birth_rate();
    const double total = hop + birth + state.death_rate();
    const double next = state.clock() + state.rng().exponential(total);
    if (next > T) break;
    state.set_clock(next);
    const EventRecord ev = apply_event(state, pick_type(state, hop, birth, total));
    if (log) log->push_back(ev);
  }
  state.set_clock(std::max(state.clock(), T));
}

ParticleConfig Snapshot::to_config(int last_site) const {
  ParticleConfig cfg(last_site);
  if (sparse) {
    for (const auto& [x, n] : occupied) cfg.add(x, n);
  } else {
    if (static_cast<int>(counts.size()) != last_site + 1) throw ShapeError("snapshot size mismatch");
    for (int x = 0; x <= last_site; ++x) {
      if (counts[x] > 0) cfg.add(x, counts[x]);
    }
  }
  return cfg;
}

Snapshot take_snapshot(const ParticleConfig& cfg, double time) {
  Snapshot snap;
  snap.time = time;
  snap.total = cfg.total();
  const auto counts = cfg.counts();
  const auto occupied = std::count_if(counts.begin(), counts.end(), [](std::int64_t c) { return c > 0; });
  snap.sparse = 10 * occupied < static_cast<std::ptrdiff_t>(counts.size());
  if (snap.sparse) {
    for (int x = 0; x < static_cast<int>(counts.size()); ++x) {
      if (counts[x] > 0) snap.occupied.emplace_back(x, counts[x]);
    }
  } else {
    snap.counts.assign(counts.begin(), counts.end());
  }
  return snap;
}

std::vector<Snapshot> run_until(SimState& state, double T_micro, std::span<const double> sample_times,
                                std::vector<EventRecord>* log) {
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) throw DomainError("sample times must be sorted");
  if (!sample_times.empty() && sample_times.back() > T_micro) throw DomainError("sample time beyond horizon");
  std::vector<Snapshot> snaps;
  snaps.push_back(take_snapshot(state.config(), state.clock()));
  for (double s : sample_times) {
    if (s <= state.clock()) continue;
    advance_to(state, s, log);
    snaps.push_back(take_snapshot(state.config(), s));
  }
  advance_to(state, T_micro, log);
  return snaps;
}

double hydrodynamic_gap(const ParticleConfig& cfg, const LatticeParams& params,
                        const std::function<double(double)>& F) {
  if (cfg.last_site() != params.last_site()) throw ShapeError("configuration size does not match 1/eps");
  const double eps = params.eps();
  const auto counts = cfg.counts();
  double worst = 0.0;
  std::int64_t suffix = 0;
  for (int x = cfg.last_site(); x >= 0; --x) {
    suffix += counts[x];
    worst = std::max(worst, std::abs(eps * static_cast<double>(suffix) - F(std::min(1.0, eps * x))));
  }
  return worst;
}

double hydrodynamic_gap(const ParticleConfig& cfg, const LatticeParams& params, const MeasureU& rho) {
  const auto table = suffix_table(rho);
  const Grid& g = rho.grid;
  auto F = [&](double r) {
    if (r <= 0.0) return table[0];
    const int c = g.cell_of(r);
    return table[c + 1] + rho.density[c] * (g.node(c + 1) - r);
  };
  return hydrodynamic_gap(cfg, params, F);
}

double hydrodynamic_gap(const Snapshot& snap, const LatticeParams& params,
                        const std::function<double(double)>& F) {
  return hydrodynamic_gap(snap.to_config(params.last_site()), params, F);
}

}  // namespace curres
