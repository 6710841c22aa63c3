#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmalock/types.hpp"

namespace rmalock::topo {

// Simulated machine hierarchy. Level 1 is the whole machine (one element),
// level N the deepest considered element (e.g. a compute node). Ranks map
// onto elements in contiguous blocks: consecutive ranks share the deepest
// elements.
class TopologySpec {
 public:
  // fanout[k] = children per element when going from level k+1 to k+2,
  // so it has levels-1 entries. P must be divisible by the leaf count;
  // ragged blocks are rejected, not approximated.
  static TopologySpec uniform(int procs, int levels, std::span<const int> fanout);
  static TopologySpec flat(int procs) { return uniform(procs, 1, {}); }

  int procs() const { return procs_; }
  int levels() const { return levels_; }
  int elements_at(int level) const;       // N_i
  int block_size(int level) const;        // ranks per element at this level

  // ID of the machine element holding rank p at the given level (1-based).
  ElementId element_of(Rank p, int level) const;

  // Lowest rank inside element j at the given level. Used both as the
  // element's queue-tail host and as its queue-node host.
  Rank first_rank_of(int level, ElementId j) const;
  Rank tail_host(int level, ElementId j) const { return first_rank_of(level, j); }

  void check_rank(Rank p) const;
  void check_level(int level) const;

 private:
  TopologySpec() = default;
  int procs_ = 0;
  int levels_ = 0;
  std::vector<int> elems_;  // elems_[i] = N_i, index 0 unused
};

// Placement of the reader counters: one physical counter per T_DC
// consecutive ranks, hosted on the first rank of its block.
class CounterMap {
 public:
  CounterMap(int procs, int stride);

  int procs() const { return procs_; }
  int stride() const { return stride_; }
  int counters() const { return counters_; }

  int counter_index(Rank p) const;   // 1-based physical counter id
  Rank host_rank(int index) const;   // (index-1)*stride + 1
  Rank counter_rank(Rank p) const { return host_rank(counter_index(p)); }

 private:
  int procs_;
  int stride_;
  int counters_;
};

// Locality thresholds per level plus the reader batch bound.
class LockParams {
 public:
  LockParams(std::vector<std::int64_t> locality, std::int64_t reader_batch);

  int levels() const { return static_cast<int>(locality_.size()) - 1; }
  std::int64_t locality(int level) const { return locality_.at(level); }
  std::int64_t reader_batch() const { return reader_batch_; }

  // Product of all locality thresholds: total consecutive writer entries
  // before the lock is offered to the readers.
  std::int64_t writer_batch() const { return batch_[1]; }

  // Product of the locality thresholds from `level` down to the leaves:
  // the entry budget of one level-`level` element per visit.
  std::int64_t batch_below(int level) const { return batch_.at(level); }

 private:
  std::vector<std::int64_t> locality_;  // index 0 unused
  std::vector<std::int64_t> batch_;     // suffix products, index 0 unused
  std::int64_t reader_batch_;
};

enum class Role : std::uint8_t { reader, writer };

// Deterministic reader/writer role assignment for a given writer fraction.
struct WorkloadSpec {
  double writer_fraction = 0.0;  // F_W in [0,1]

  int writer_count(int procs) const;
  // roles[p] for p in 1..procs; exactly writer_count() writers, placed by a
  // seeded shuffle. Index 0 unused.
  std::vector<Role> roles(int procs, std::uint64_t seed) const;
};

}  // namespace rmalock::topo
