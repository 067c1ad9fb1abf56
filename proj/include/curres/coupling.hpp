#pragma once

#include <cstdint>
#include <vector>

#include "curres/lattice.hpp"
#include "curres/rng.hpp"

namespace curres {

/// Label i of the coupled process. Every label carries a y position (J);
/// labels in I also carry an x position.
struct LabeledEntry {
  std::int64_t id = 0;
  bool in_I = true;
  int x = 0;
  int y = 0;

  bool matched() const noexcept { return in_I && x == y; }
};

enum class CoupledEventType { move_x, move_y, double_jump, null, birth, death };

struct CoupledEvent {
  CoupledEventType type = CoupledEventType::null;
  double time = 0.0;
  std::int64_t label = 0;
};

/// Two labelled copies of the particle process driven by shared clocks:
/// matched labels move together, discrepant ones independently, and the
/// reservoirs act on both copies at once.
class LabeledPair {
 public:
  LabeledPair(const LatticeParams& params, std::uint64_t seed, std::uint64_t stream = 0);

  /// Labels 1..|ys| with x positions for the first |xs| of them (|xs| <= |ys|).
  /// Both lists are sorted first so that the k-th leftmost particles share a label.
  static LabeledPair from_positions(const LatticeParams& params, std::vector<int> xs, std::vector<int> ys,
                                    std::uint64_t seed, std::uint64_t stream = 0);
  /// Labels taken verbatim; ids must be distinct and positive.
  static LabeledPair from_entries(const LatticeParams& params, std::vector<LabeledEntry> entries,
                                  std::uint64_t seed, std::uint64_t stream = 0);
  /// Same as from_positions with particles listed site by site.
  static LabeledPair from_configs(const LatticeParams& params, const ParticleConfig& x, const ParticleConfig& y,
                                  std::uint64_t seed, std::uint64_t stream = 0);

  const LatticeParams& params() const noexcept { return params_; }
  const std::vector<LabeledEntry>& entries() const noexcept { return entries_; }
  double clock() const noexcept { return clock_; }
  std::int64_t max_label() const noexcept { return next_label_; }
  Rng& rng() noexcept { return rng_; }

  std::int64_t size_I() const noexcept;
  std::int64_t size_J() const noexcept { return static_cast<std::int64_t>(entries_.size()); }
  /// |J \ I|.
  std::int64_t unmatched_extra() const noexcept { return size_J() - size_I(); }

  ParticleConfig x_config() const;
  ParticleConfig y_config() const;

  double total_rate() const noexcept;
  void set_clock(double t) noexcept { clock_ = t; }

  CoupledEvent walk(std::size_t index, int slot, int direction);
  CoupledEvent birth();
  CoupledEvent death();

 private:
  LatticeParams params_;
  Rng rng_;
  std::vector<LabeledEntry> entries_;
  std::int64_t next_label_ = 0;
  double clock_ = 0.0;
};

CoupledEvent coupled_step(LabeledPair& pair);
void coupled_advance_to(LabeledPair& pair, double T);

/// |{i in I : x_i != y_i}|.
std::int64_t discrepancy_count(const LabeledPair& pair);

/// Sum over sites of |xi_x(site) - xi_y(site)|.
std::int64_t l1_distance(const LabeledPair& pair);

}  // namespace curres
