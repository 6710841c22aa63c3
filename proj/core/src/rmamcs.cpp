#include "rmalock/locks/rmamcs.hpp"

namespace rmalock::locks {

RmamcsLock::RmamcsLock(rma::Window& window, topo::TopologySpec topo,
                       topo::WindowLayout layout, topo::LockParams params,
                       verify::Monitor* monitor)
    : window_(window), topo_(std::move(topo)), layout_(layout),
      params_(std::move(params)), monitor_(monitor) {
  if (params_.levels() != topo_.levels())
    throw ConfigError("lock params must cover every topology level");
  if (layout_.levels() != topo_.levels())
    throw ConfigError("layout does not match the topology");
}

RmamcsLock::Handle::Handle(const RmamcsLock& lock, sim::Context& ctx)
    : lock_(lock), origin_(lock.window_, ctx),
      chain_(make_queue_chain(lock.topo_, lock.layout_, ctx.rank())),
      leaf_element_(lock.topo_.element_of(ctx.rank(), lock.topo_.levels())) {}

void RmamcsLock::Handle::acquire() {
  if (held_) throw ProtocolViolation("rmamcs acquire while already holding");
  std::int64_t last_pred = 0;
  for (int i = lock_.topo_.levels();; --i) {
    const QueueRef& q = chain_[i];
    std::int64_t pred = dq::enqueue(origin_, q);
    last_pred = pred;
    if (pred != kNullRank) {
      dq::publish(origin_, q, pred);
      std::int64_t s = dq::await_grant(origin_, q);
      if (s != kAcquireParent) {
        if (!is_grant(s)) throw ProtocolViolation("unexpected status word");
        // Predecessor stayed under the threshold: the lock is passed here
        // and we proceed straight to the CS.
        count_ = s;
        entered_level_ = i;
        break;
      }
    }
    // Released to the parent level (or the queue here was empty): continue
    // up the tree.
    dq::set_status(origin_, q, kAcquireStart);
    if (i == 1) {
      count_ = 1;
      entered_level_ = 1;
      break;
    }
  }
  held_ = true;
  if (lock_.monitor_)
    lock_.monitor_->writer_enter(origin_.rank(), entered_level_, leaf_element_,
                                 origin_.ctx().now_ns(), last_pred);
}

void RmamcsLock::Handle::release() {
  if (!held_) throw ProtocolViolation("rmamcs release without holding");
  if (lock_.monitor_)
    lock_.monitor_->writer_exit(origin_.rank(), entered_level_, leaf_element_,
                                origin_.ctx().now_ns());
  held_ = false;
  release_level(lock_.topo_.levels());
}

void RmamcsLock::Handle::release_level(int level) {
  const QueueRef& q = chain_[level];
  std::int64_t succ = dq::read_successor(origin_, q);

  if (level == 1) {
    // Root queue: the element is unique, so there is no threshold and each
    // handover starts a fresh entry run.
    if (succ == kNullRank) {
      succ = dq::retract_or_wait(origin_, q);
      if (succ == kNullRank) return;
    }
    dq::pass(origin_, q, succ, 1);
    return;
  }

  if (succ != kNullRank && count_ % lock_.params_.batch_below(level) != 0) {
    // Entry budget of this element not exhausted: pass within the element,
    // carrying the run count in the same operation.
    dq::pass(origin_, q, succ, count_ + 1);
    return;
  }

  // Budget exhausted or nobody known here: release the parent level first,
  // then tell any successor to acquire it.
  release_level(level - 1);
  if (succ == kNullRank) {
    succ = dq::retract_or_wait(origin_, q);
    if (succ == kNullRank) return;
  }
  dq::pass(origin_, q, succ, kAcquireParent);
}

}  // namespace rmalock::locks
