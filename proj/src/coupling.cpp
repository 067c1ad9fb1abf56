#include "curres/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "curres/errors.hpp"

namespace curres {

LabeledPair::LabeledPair(const LatticeParams& params, std::uint64_t seed, std::uint64_t stream)
    : params_(params), rng_(seed, stream) {}

LabeledPair LabeledPair::from_positions(const LatticeParams& params, std::vector<int> xs, std::vector<int> ys,
                                        std::uint64_t seed, std::uint64_t stream) {
  if (xs.size() > ys.size()) throw ValidationError("the x copy may not have more particles than the y copy");
  const int L = params.last_site();
  for (int s : xs) {
    if (s < 0 || s > L) throw RangeError("x position outside the lattice");
  }
  for (int s : ys) {
    if (s < 0 || s > L) throw RangeError("y position outside the lattice");
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  LabeledPair pair(params, seed, stream);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    LabeledEntry e;
    e.id = static_cast<std::int64_t>(k) + 1;
    e.y = ys[k];
    e.in_I = k < xs.size();
    e.x = e.in_I ? xs[k] : 0;
    pair.entries_.push_back(e);
  }
  pair.next_label_ = static_cast<std::int64_t>(ys.size());
  return pair;
}

LabeledPair LabeledPair::from_entries(const LatticeParams& params, std::vector<LabeledEntry> entries,
                                     std::uint64_t seed, std::uint64_t stream) {
  const int L = params.last_site();
  LabeledPair pair(params, seed, stream);
  for (const auto& e : entries) {
    if (e.id <= 0) throw ValidationError("labels must be positive");
    if (e.y < 0 || e.y > L || (e.in_I && (e.x < 0 || e.x > L))) throw RangeError("position outside the lattice");
    for (const auto& f : pair.entries_) {
      if (f.id == e.id) throw ValidationError("duplicate label");
    }
    pair.entries_.push_back(e);
    pair.next_label_ = std::max(pair.next_label_, e.id);
  }
  return pair;
}

namespace {

std::vector<int> positions(const ParticleConfig& cfg) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cfg.total()));
  for (int x = 0; x <= cfg.last_site(); ++x) out.insert(out.end(), static_cast<std::size_t>(cfg.count(x)), x);
  return out;
}

}  // namespace

LabeledPair LabeledPair::from_configs(const LatticeParams& params, const ParticleConfig& x, const ParticleConfig& y,
                                      std::uint64_t seed, std::uint64_t stream) {
  return from_positions(params, positions(x), positions(y), seed, stream);
}

std::int64_t LabeledPair::size_I() const noexcept {
  return std::count_if(entries_.begin(), entries_.end(), [](const LabeledEntry& e) { return e.in_I; });
}

ParticleConfig LabeledPair::x_config() const {
  ParticleConfig cfg(params_.last_site());
  for (const auto& e : entries_) {
    if (e.in_I) cfg.add(e.x);
  }
  return cfg;
}

ParticleConfig LabeledPair::y_config() const {
  ParticleConfig cfg(params_.last_site());
  for (const auto& e : entries_) cfg.add(e.y);
  return cfg;
}

double LabeledPair::total_rate() const noexcept {
  const double reservoir = params_.eps() * params_.current();
  return 2.0 * static_cast<double>(entries_.size()) + reservoir + (entries_.empty() ? 0.0 : reservoir);
}

CoupledEvent LabeledPair::walk(std::size_t index, int slot, int direction) {
  LabeledEntry& e = entries_.at(index);
  const int L = params_.last_site();
  auto inside = [L](int s) { return s >= 0 && s <= L; };
  CoupledEvent ev{CoupledEventType::null, clock_, e.id};
  // Each label owns two unit-rate slots; unused slots are null events.
  if (e.matched()) {
    if (slot == 0 && inside(e.x + direction)) {
      e.x += direction;
      e.y += direction;
      ev.type = CoupledEventType::double_jump;
    }
  } else if (e.in_I) {
    int& coord = slot == 0 ? e.x : e.y;
    if (inside(coord + direction)) {
      coord += direction;
      ev.type = slot == 0 ? CoupledEventType::move_x : CoupledEventType::move_y;
    }
  } else if (slot == 0 && inside(e.y + direction)) {
    e.y += direction;
    ev.type = CoupledEventType::move_y;
  }
  return ev;
}

CoupledEvent LabeledPair::birth() {
  LabeledEntry e;
  e.id = ++next_label_;
  e.in_I = true;
  e.x = 0;
  e.y = 0;
  entries_.push_back(e);
  return {CoupledEventType::birth, clock_, e.id};
}

CoupledEvent LabeledPair::death() {
  if (entries_.empty()) return {CoupledEventType::null, clock_, 0};
  // Rightmost particle of each copy, ties broken by the larger label.
  std::ptrdiff_t i = -1;
  std::ptrdiff_t jdx = 0;
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(entries_.size()); ++k) {
    const auto& e = entries_[k];
    if (e.in_I && (i < 0 || std::make_pair(e.x, e.id) > std::make_pair(entries_[i].x, entries_[i].id))) i = k;
    if (std::make_pair(e.y, e.id) > std::make_pair(entries_[jdx].y, entries_[jdx].id)) jdx = k;
  }
  auto erase = [this](std::ptrdiff_t k) {
    entries_[k] = entries_.back();
    entries_.pop_back();
  };
  const std::int64_t label = entries_[jdx].id;
  if (i < 0 || i == jdx) {
    erase(jdx);
  } else if (!entries_[jdx].in_I) {
    entries_[i].in_I = false;
    erase(jdx);
  } else {
    LabeledEntry& ei = entries_[i];
    LabeledEntry& ej = entries_[jdx];
    if (ej.x <= ei.y) {
      ej.y = ei.y;
      erase(i);
    } else {
      ei.x = ej.x;
      erase(jdx);
    }
  }
  return {CoupledEventType::death, clock_, label};
}

namespace {

CoupledEvent coupled_event(LabeledPair& pair, double walk_rate, double reservoir) {
  Rng& rng = pair.rng();
  const double u = rng.uniform() * pair.total_rate();
  if (u < walk_rate) {
    const auto n = static_cast<std::uint64_t>(pair.entries().size());
    const std::uint64_t pick = rng.below(4 * n);
    return pair.walk(static_cast<std::size_t>(pick / 4), static_cast<int>((pick >> 1) & 1), (pick & 1) ? 1 : -1);
  }
  if (u < walk_rate + reservoir) return pair.birth();
  return pair.death();
}

}  // namespace

CoupledEvent coupled_step(LabeledPair& pair) {
  const double rate = pair.total_rate();
  const double walk_rate = 2.0 * static_cast<double>(pair.entries().size());
  const double reservoir = pair.params().eps() * pair.params().current();
  pair.set_clock(pair.clock() + pair.rng().exponential(rate));
  return coupled_event(pair, walk_rate, reservoir);
}

void coupled_advance_to(LabeledPair& pair, double T) {
  const double reservoir = pair.params().eps() * pair.params().current();
  while (true) {
    const double rate = pair.total_rate();
    const double next = pair.clock() + pair.rng().exponential(rate);
    if (next > T) break;
    pair.set_clock(next);
    coupled_event(pair, 2.0 * static_cast<double>(pair.entries().size()), reservoir);
  }
  pair.set_clock(std::max(pair.clock(), T));
}

std::int64_t discrepancy_count(const LabeledPair& pair) {
  return std::count_if(pair.entries().begin(), pair.entries().end(),
                       [](const LabeledEntry& e) { return e.in_I && e.x != e.y; });
}

std::int64_t l1_distance(const LabeledPair& pair) {
  const ParticleConfig x = pair.x_config();
  const ParticleConfig y = pair.y_config();
  std::int64_t sum = 0;
  for (int s = 0; s <= x.last_site(); ++s) sum += std::llabs(x.count(s) - y.count(s));
  return sum;
}

}  // namespace curres
