#pragma once

#include "rmalock/locks/tree_chain.hpp"
#include "rmalock/topo/topology.hpp"
#include "rmalock/verify/event_log.hpp"

namespace rmalock::locks {

// Topology-aware distributed reader-writer lock.
//
// Writers climb the same per-element queue tree as the exclusive lock; at
// the root they additionally synchronize with readers through a set of
// distributed counters. Readers never touch the tree: each one increments
// the arrival half of its assigned counter and enters while the count stays
// under the reader threshold and no writer holds the counters in write mode.
//
// The arrival word folds the lock mode in: values at or above the write
// sentinel mean a writer owns the critical section. A writer entering from
// the readers raises every counter by the sentinel, then waits until each
// counter's departures match its arrivals before entering. After the total
// writer run reaches the writer batch bound (product of the locality
// thresholds), or when no writer waits, the counters are reset and readers
// pour back in.
//
// Any process may read- or write-acquire; holding both at once or acquiring
// reentrantly is a protocol violation.
class RmarwLock {
 public:
  RmarwLock(rma::Window& window, topo::TopologySpec topo, topo::CounterMap counters,
            topo::WindowLayout layout, topo::LockParams params,
            verify::Monitor* monitor = nullptr);

  class Handle {
   public:
    void acquire_write();
    void release_write();
    void acquire_read();
    void release_read();

    bool holds_write() const { return holds_write_; }
    bool holds_read() const { return holds_read_; }
    std::int64_t entry_count() const { return count_; }
    int entered_level() const { return entered_level_; }

    // Counter manipulation steps of the protocol, exposed so tests and the
    // verification suite can drive them directly.
    void set_counters_to_write();
    void drain_readers();
    void reset_counter(Rank counter_host);
    void reset_counters();

   private:
    friend class RmarwLock;
    Handle(const RmarwLock& lock, sim::Context& ctx);
    void release_level(int level);
    void release_root();
    void settle_counter_from_reader(Rank counter_host);

    const RmarwLock& lock_;
    rma::Origin origin_;
    std::vector<QueueRef> chain_;
    std::int64_t leaf_element_;
    Rank my_counter_;
    std::int64_t my_counter_index_;
    std::int64_t count_ = 0;
    int entered_level_ = 0;
    bool holds_write_ = false;
    bool holds_read_ = false;
  };

  Handle handle(sim::Context& ctx) const { return Handle(*this, ctx); }

  const topo::TopologySpec& topology() const { return topo_; }
  const topo::CounterMap& counters() const { return counters_; }
  const topo::LockParams& params() const { return params_; }

 private:
  rma::Window& window_;
  topo::TopologySpec topo_;
  topo::CounterMap counters_;
  topo::WindowLayout layout_;
  topo::LockParams params_;
  verify::Monitor* monitor_;
};

}  // namespace rmalock::locks
