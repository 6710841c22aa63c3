#pragma once

#include "rmalock/locks/tree_chain.hpp"
#include "rmalock/topo/topology.hpp"
#include "rmalock/verify/event_log.hpp"

namespace rmalock::locks {

// Topology-aware exclusive lock: one MCS queue per machine element, bound
// into a tree. A contender climbs from its leaf element toward the root,
// stopping early whenever a predecessor hands the lock over inside a shared
// element. The locality threshold of a level caps how many consecutive
// entries stay inside one of its elements before the lock moves on; the
// root queue has no threshold. Non-reentrant, writers only.
class RmamcsLock {
 public:
  RmamcsLock(rma::Window& window, topo::TopologySpec topo, topo::WindowLayout layout,
             topo::LockParams params, verify::Monitor* monitor = nullptr);

  class Handle {
   public:
    void acquire();
    void release();
    bool held() const { return held_; }

    // Global consecutive-entry count this holder entered with (1-based
    // within the current run). Exposed for tests and auditors.
    std::int64_t entry_count() const { return count_; }
    int entered_level() const { return entered_level_; }

   private:
    friend class RmamcsLock;
    Handle(const RmamcsLock& lock, sim::Context& ctx);
    void release_level(int level);

    const RmamcsLock& lock_;
    rma::Origin origin_;
    std::vector<QueueRef> chain_;
    std::int64_t leaf_element_;
    std::int64_t count_ = 0;
    int entered_level_ = 0;
    bool held_ = false;
  };

  Handle handle(sim::Context& ctx) const { return Handle(*this, ctx); }

  const topo::TopologySpec& topology() const { return topo_; }
  const topo::LockParams& params() const { return params_; }

 private:
  rma::Window& window_;
  topo::TopologySpec topo_;
  topo::WindowLayout layout_;
  topo::LockParams params_;
  verify::Monitor* monitor_;
};

}  // namespace rmalock::locks
