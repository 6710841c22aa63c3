#pragma once

#include <cstdint>
#include <map>

#include "rmalock/rma/origin.hpp"

namespace rmalock::dht {

// One local volume of the distributed hashtable: a fixed-size slot table
// plus a fixed-size overflow heap, all resident in the owner rank's window
// starting at a base offset. Zero encodes an empty slot, so stored values
// must be nonzero; duplicates are allowed and stored again.
//
// An insert first tries to claim the slot with a compare-and-swap. On a
// collision it grabs a heap cell by fetch-and-adding the free pointer and
// swings the slot's last-element pointer to the new cell with a second
// compare-and-swap; each cell links to the previous chain tail, so the swing
// makes the whole chain visible in one step. Lookups follow the chain from
// the last-element pointer. Safe under full concurrency with no lock at all;
// lock-disciplined callers simply wrap the calls.
//
// Layout within the owner's window, relative to `base`:
//   [0, ts)                       table slots
//   [ts, 2ts)                     per-slot last-element pointers
//   [2ts, 2ts+hs)                 heap values
//   [2ts+hs, 2ts+2hs)             heap next links (previous chain element)
//   [2ts+2hs]                     next-free heap counter
class Volume {
 public:
  struct Config {
    Rank owner = 1;
    int table_size = 1024;
    int heap_size = 1024;
    Offset base = 0;
  };

  Volume(rma::Window& window, Config cfg);

  static int words_needed(const Config& cfg) {
    return 2 * cfg.table_size + 2 * cfg.heap_size + 1;
  }

  // hash(v) = v mod table_size (Euclidean, so negatives land in range too).
  int slot_of(std::int64_t value) const;

  // Throws CapacityError when the overflow heap is exhausted.
  void insert(rma::Origin& origin, std::int64_t value) const;
  bool lookup(rma::Origin& origin, std::int64_t value) const;

  // Quiescent scan of everything stored, via direct backing-store reads.
  // Keys are values, mapped to how many copies are present.
  std::map<std::int64_t, std::int64_t> contents() const;

  const Config& config() const { return cfg_; }

 private:
  Offset slot(int s) const { return cfg_.base + s; }
  Offset last_of(int s) const { return cfg_.base + cfg_.table_size + s; }
  Offset heap_value(std::int64_t k) const;
  Offset heap_link(std::int64_t k) const;
  Offset next_free() const {
    return cfg_.base + 2 * cfg_.table_size + 2 * cfg_.heap_size;
  }

  rma::Window& window_;
  Config cfg_;
};

}  // namespace rmalock::dht
