#include "rmalock/locks/rmarw.hpp"

namespace rmalock::locks {

RmarwLock::RmarwLock(rma::Window& window, topo::TopologySpec topo,
                     topo::CounterMap counters, topo::WindowLayout layout,
                     topo::LockParams params, verify::Monitor* monitor)
    : window_(window), topo_(std::move(topo)), counters_(std::move(counters)),
      layout_(layout), params_(std::move(params)), monitor_(monitor) {
  if (params_.levels() != topo_.levels())
    throw ConfigError("lock params must cover every topology level");
  if (layout_.levels() != topo_.levels())
    throw ConfigError("layout does not match the topology");
  if (counters_.procs() != topo_.procs())
    throw ConfigError("counter map does not match the topology");
}

RmarwLock::Handle::Handle(const RmarwLock& lock, sim::Context& ctx)
    : lock_(lock), origin_(lock.window_, ctx),
      chain_(make_queue_chain(lock.topo_, lock.layout_, ctx.rank())),
      leaf_element_(lock.topo_.element_of(ctx.rank(), lock.topo_.levels())),
      my_counter_(lock.counters_.counter_rank(ctx.rank())),
      my_counter_index_(lock.counters_.counter_index(ctx.rank())) {}

// ---------------------------------------------------------------- writers

void RmarwLock::Handle::acquire_write() {
  if (holds_write_ || holds_read_)
    throw ProtocolViolation("write acquire while already holding");
  std::int64_t last_pred = 0;
  for (int i = lock_.topo_.levels();; --i) {
    const QueueRef& q = chain_[i];
    std::int64_t pred = dq::enqueue(origin_, q);
    last_pred = pred;
    if (pred != kNullRank) {
      dq::publish(origin_, q, pred);
      std::int64_t s = dq::await_grant(origin_, q);
      if (i == 1) {
        if (s == kModeChange) {
          // The readers have the lock now; take it back.
          set_counters_to_write();
          drain_readers();
          dq::set_status(origin_, q, kAcquireStart);
          count_ = 1;
        } else {
          if (!is_grant(s)) throw ProtocolViolation("unexpected status word");
          count_ = s;
        }
        entered_level_ = 1;
        break;
      }
      if (s != kAcquireParent) {
        if (!is_grant(s)) throw ProtocolViolation("unexpected status word");
        count_ = s;
        entered_level_ = i;
        break;
      }
    }
    dq::set_status(origin_, q, kAcquireStart);
    if (i == 1) {
      // Queue tree empty all the way up: claim the counters from the readers.
      set_counters_to_write();
      drain_readers();
      count_ = 1;
      entered_level_ = 1;
      break;
    }
  }
  holds_write_ = true;
  if (lock_.monitor_)
    lock_.monitor_->writer_enter(origin_.rank(), entered_level_, leaf_element_,
                                 origin_.ctx().now_ns(), last_pred);
}

void RmarwLock::Handle::release_write() {
  if (!holds_write_) throw ProtocolViolation("write release without holding");
  if (lock_.monitor_)
    lock_.monitor_->writer_exit(origin_.rank(), entered_level_, leaf_element_,
                                origin_.ctx().now_ns());
  holds_write_ = false;
  release_level(lock_.topo_.levels());
}

void RmarwLock::Handle::release_level(int level) {
  if (level == 1) {
    release_root();
    return;
  }
  const QueueRef& q = chain_[level];
  std::int64_t succ = dq::read_successor(origin_, q);
  if (succ != kNullRank && count_ % lock_.params_.batch_below(level) != 0) {
    dq::pass(origin_, q, succ, count_ + 1);
    return;
  }
  release_level(level - 1);
  if (succ == kNullRank) {
    succ = dq::retract_or_wait(origin_, q);
    if (succ == kNullRank) return;
  }
  dq::pass(origin_, q, succ, kAcquireParent);
}

void RmarwLock::Handle::release_root() {
  const QueueRef& q = chain_[1];
  bool counters_reset = false;
  std::int64_t next_status = count_ + 1;
  if (count_ >= lock_.params_.writer_batch()) {
    // Writer run exhausted: pass the lock to the readers.
    reset_counters();
    next_status = kModeChange;
    counters_reset = true;
  }
  std::int64_t succ = dq::read_successor(origin_, q);
  if (succ == kNullRank) {
    if (!counters_reset) {
      // No known successor: let the readers in either way.
      reset_counters();
      next_status = kModeChange;
    }
    succ = dq::retract_or_wait(origin_, q);
    if (succ == kNullRank) return;
  }
  dq::pass(origin_, q, succ, next_status);
}

// ---------------------------------------------------------------- readers

void RmarwLock::Handle::acquire_read() {
  if (holds_write_ || holds_read_)
    throw ProtocolViolation("read acquire while already holding");
  const std::int64_t tr = lock_.params_.reader_batch();
  const Rank root_tail_host = chain_[1].tail_host;
  const Offset root_tail_off = chain_[1].tail_off;
  auto no_waiting_writer = [&] {
    auto tail = origin_.get(root_tail_host, root_tail_off);
    origin_.flush(root_tail_host);
    return tail.value() == kNullRank;
  };
  bool barrier = false;
  sim::SpinWait sw(origin_.ctx());
  for (;;) {
    if (barrier) {
      // Wait for the counter to come back under the threshold. A writer
      // resets it when its run ends; if the writer we saw in the tail was
      // only retracting and left nothing behind, whoever spins here folds
      // the departed readers out itself.
      sim::SpinWait barrier_wait(origin_.ctx());
      for (;;) {
        auto t = origin_.get(my_counter_, lock_.layout_.arrive());
        origin_.flush(my_counter_);
        if (t.value() < tr) break;
        if (t.value() < kWriteSentinel && no_waiting_writer())
          settle_counter_from_reader(my_counter_);
        barrier_wait.pause();
      }
    }
    auto t = origin_.fao(1, my_counter_, lock_.layout_.arrive(), rma::AtomicOp::sum);
    origin_.flush(my_counter_);
    std::int64_t arrived = t.value();
    if (arrived < tr) break;  // read lock held
    barrier = true;
    if (arrived == tr) {
      // First to reach the threshold: hand over to the writers if any wait.
      if (no_waiting_writer()) {
        settle_counter_from_reader(my_counter_);
        barrier = false;
      }
    }
    // Back off and try again.
    origin_.accumulate(-1, my_counter_, lock_.layout_.arrive(), rma::AtomicOp::sum);
    origin_.flush(my_counter_);
    sw.pause();
  }
  holds_read_ = true;
  if (lock_.monitor_)
    lock_.monitor_->reader_enter(origin_.rank(), my_counter_index_, origin_.ctx().now_ns());
}

void RmarwLock::Handle::release_read() {
  if (!holds_read_) throw ProtocolViolation("read release without holding");
  if (lock_.monitor_)
    lock_.monitor_->reader_exit(origin_.rank(), my_counter_index_, origin_.ctx().now_ns());
  holds_read_ = false;
  origin_.accumulate(1, my_counter_, lock_.layout_.depart(), rma::AtomicOp::sum);
  origin_.flush(my_counter_);
}

// --------------------------------------------------------------- counters

void RmarwLock::Handle::set_counters_to_write() {
  for (int j = 1; j <= lock_.counters_.counters(); ++j) {
    Rank host = lock_.counters_.host_rank(j);
    // Raise the arrival word past the sentinel to block incoming readers.
    origin_.accumulate(kWriteSentinel, host, lock_.layout_.arrive(), rma::AtomicOp::sum);
    origin_.flush(host);
  }
  if (lock_.monitor_) lock_.monitor_->mode_change(origin_.rank(), origin_.ctx().now_ns());
}

void RmarwLock::Handle::drain_readers() {
  // A counter may still carry readers that arrived before the sentinel went
  // up; wait until each one's departures match its arrivals.
  for (int j = 1; j <= lock_.counters_.counters(); ++j) {
    Rank host = lock_.counters_.host_rank(j);
    sim::SpinWait sw(origin_.ctx());
    for (;;) {
      auto arrived = origin_.get(host, lock_.layout_.arrive());
      auto departed = origin_.get(host, lock_.layout_.depart());
      origin_.flush(host);
      if (arrived.value() - kWriteSentinel == departed.value()) break;
      sw.pause();
    }
  }
}

void RmarwLock::Handle::reset_counter(Rank counter_host) {
  sim::SpinWait sw(origin_.ctx());
  for (;;) {
    auto arrived = origin_.get(counter_host, lock_.layout_.arrive());
    auto departed = origin_.get(counter_host, lock_.layout_.depart());
    origin_.flush(counter_host);
    // Claim the departures we are about to fold away. A backed-off reader's
    // settle may still be in flight; the claim makes sure each departure is
    // subtracted exactly once no matter how the two interleave.
    auto prev = origin_.cas(0, departed.value(), counter_host, lock_.layout_.depart());
    origin_.flush(counter_host);
    if (prev.value() != departed.value()) {
      sw.pause();
      continue;
    }
    std::int64_t sub_arrive = -departed.value();
    // Clear the write mode if it was set.
    if (arrived.value() >= kWriteSentinel) sub_arrive -= kWriteSentinel;
    origin_.accumulate(sub_arrive, counter_host, lock_.layout_.arrive(), rma::AtomicOp::sum);
    // The arrival word gates reader entry, so the reset is recorded against
    // that subtraction; the departure half was zeroed by the claim above.
    if (lock_.monitor_)
      lock_.monitor_->counter_reset(origin_.rank(),
                                    (counter_host - 1) / lock_.counters_.stride() + 1,
                                    origin_.ctx().now_ns());
    origin_.flush(counter_host);
    return;
  }
}

void RmarwLock::Handle::reset_counters() {
  for (int j = 1; j <= lock_.counters_.counters(); ++j)
    reset_counter(lock_.counters_.host_rank(j));
}

// The reader-side variant folds fully departed readers out of the counter.
// It differs from the writer's reset in two ways, both forced by races the
// writer path cannot have. It leaves the write sentinel alone: between this
// reader's tail probe and its reset a writer may already have switched the
// counters to write mode, and clearing its sentinel would strand that writer
// mid-drain. And it claims the departure count with a compare-and-swap so
// concurrent settles from several backed-off readers fold each departure out
// exactly once.
void RmarwLock::Handle::settle_counter_from_reader(Rank counter_host) {
  auto departed = origin_.get(counter_host, lock_.layout_.depart());
  origin_.flush(counter_host);
  std::int64_t claim = departed.value();
  if (claim == 0) return;
  auto prev = origin_.cas(0, claim, counter_host, lock_.layout_.depart());
  origin_.flush(counter_host);
  if (prev.value() != claim) return;  // another settle got here first
  origin_.accumulate(-claim, counter_host, lock_.layout_.arrive(), rma::AtomicOp::sum);
  origin_.flush(counter_host);
  if (lock_.monitor_)
    lock_.monitor_->counter_reset(origin_.rank(),
                                  (counter_host - 1) / lock_.counters_.stride() + 1,
                                  origin_.ctx().now_ns());
}

}  // namespace rmalock::locks
