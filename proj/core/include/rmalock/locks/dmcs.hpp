#pragma once

#include "rmalock/locks/queue_ops.hpp"
#include "rmalock/topo/layout.hpp"
#include "rmalock/verify/event_log.hpp"

namespace rmalock::locks {

// Topology-oblivious distributed MCS lock: one global queue whose tail word
// lives on tail_rank. Waiters spin on their own status word; the releaser
// notifies its successor with a single put. Non-reentrant.
class DmcsLock {
 public:
  DmcsLock(rma::Window& window, const topo::WindowLayout& layout, Rank tail_rank = 1,
           verify::Monitor* monitor = nullptr);

  class Handle {
   public:
    void acquire();
    void release();
    bool held() const { return held_; }

   private:
    friend class DmcsLock;
    Handle(const DmcsLock& lock, sim::Context& ctx);
    const DmcsLock& lock_;
    rma::Origin origin_;
    QueueRef q_;
    bool held_ = false;
  };

  Handle handle(sim::Context& ctx) const { return Handle(*this, ctx); }

  Rank tail_rank() const { return tail_rank_; }

 private:
  rma::Window& window_;
  topo::WindowLayout layout_;
  Rank tail_rank_;
  verify::Monitor* monitor_;
};

// Test-and-set spin lock on one global flag cell; the baseline every queue
// lock is measured against. Non-reentrant.
class TasSpinLock {
 public:
  TasSpinLock(rma::Window& window, const topo::WindowLayout& layout, Rank flag_rank = 1,
              verify::Monitor* monitor = nullptr);

  class Handle {
   public:
    void acquire();
    void release();
    bool held() const { return held_; }

   private:
    friend class TasSpinLock;
    Handle(const TasSpinLock& lock, sim::Context& ctx);
    const TasSpinLock& lock_;
    rma::Origin origin_;
    bool held_ = false;
  };

  Handle handle(sim::Context& ctx) const { return Handle(*this, ctx); }

 private:
  rma::Window& window_;
  Rank flag_rank_;
  Offset flag_off_;
  verify::Monitor* monitor_;
};

}  // namespace rmalock::locks
