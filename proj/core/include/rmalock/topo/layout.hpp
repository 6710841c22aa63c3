#pragma once

#include <vector>

#include "rmalock/topo/topology.hpp"
#include "rmalock/types.hpp"

namespace rmalock::topo {

// Fixed per-rank offsets giving every lock-protocol field a (rank, offset)
// address inside one shared window. Identical on every rank.
//
// Per level i (1..N):
//   queue_next(i)/queue_status(i): the queue-node cells used when enqueued in
//     a level-i queue. A rank's own leaf node uses level N; the node of an
//     element enqueued one level up lives at the element's first rank.
//   queue_tail(i): the queue tail word; meaningful on tail-host ranks.
// Then the reader counter pair (arrive/depart), the flat single-queue lock
// cells, the test-and-set flag and one scratch word for benchmark bodies.
class WindowLayout {
 public:
  explicit WindowLayout(int levels);

  int levels() const { return levels_; }

  Offset queue_next(int level) const { return check(level), 2 * (level - 1); }
  Offset queue_status(int level) const { return check(level), 2 * (level - 1) + 1; }
  Offset arrive() const { return 2 * levels_; }
  Offset depart() const { return 2 * levels_ + 1; }
  Offset queue_tail(int level) const { return check(level), 2 * levels_ + 2 + (level - 1); }
  Offset mcs_next() const { return 3 * levels_ + 2; }
  Offset mcs_status() const { return 3 * levels_ + 3; }
  Offset mcs_tail() const { return 3 * levels_ + 4; }
  Offset spin_flag() const { return 3 * levels_ + 5; }
  Offset shared_word() const { return 3 * levels_ + 6; }

  int words_per_rank() const { return 3 * levels_ + 7; }

  // Layout self-check: every named field has a distinct in-range offset.
  bool validate() const;

 private:
  void check(int level) const {
    if (level < 1 || level > levels_) throw AddressError("layout level out of range");
  }
  int levels_;
};

inline WindowLayout make_layout(const TopologySpec& topo) {
  return WindowLayout(topo.levels());
}

}  // namespace rmalock::topo
