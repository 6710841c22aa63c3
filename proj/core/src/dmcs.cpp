#include "rmalock/locks/dmcs.hpp"

namespace rmalock::locks {

DmcsLock::DmcsLock(rma::Window& window, const topo::WindowLayout& layout, Rank tail_rank,
                   verify::Monitor* monitor)
    : window_(window), layout_(layout), tail_rank_(tail_rank), monitor_(monitor) {
  if (tail_rank < 1 || tail_rank > window.ranks())
    throw ConfigError("tail rank outside the window");
}

DmcsLock::Handle::Handle(const DmcsLock& lock, sim::Context& ctx)
    : lock_(lock), origin_(lock.window_, ctx) {
  q_ = QueueRef{ctx.rank(), lock.tail_rank_, lock.layout_.mcs_next(),
                lock.layout_.mcs_status(), lock.layout_.mcs_tail()};
}

void DmcsLock::Handle::acquire() {
  if (held_) throw ProtocolViolation("dmcs acquire while already holding");
  std::int64_t pred = dq::enqueue(origin_, q_);
  if (pred != kNullRank) {
    dq::publish(origin_, q_, pred);
    dq::await_grant(origin_, q_);
  } else {
    // Keep the status cell at its rest value while holding uncontended.
    dq::set_status(origin_, q_, kAcquireStart);
  }
  held_ = true;
  if (lock_.monitor_)
    lock_.monitor_->writer_enter(origin_.rank(), 0, 1, origin_.ctx().now_ns(), pred);
}

void DmcsLock::Handle::release() {
  if (!held_) throw ProtocolViolation("dmcs release without holding");
  if (lock_.monitor_)
    lock_.monitor_->writer_exit(origin_.rank(), 0, 1, origin_.ctx().now_ns());
  held_ = false;
  std::int64_t succ = dq::read_successor(origin_, q_);
  if (succ == kNullRank) {
    succ = dq::retract_or_wait(origin_, q_);
    if (succ == kNullRank) return;  // we were the only process in the queue
  }
  dq::pass(origin_, q_, succ, kAcquireStart);
}

TasSpinLock::TasSpinLock(rma::Window& window, const topo::WindowLayout& layout,
                         Rank flag_rank, verify::Monitor* monitor)
    : window_(window), flag_rank_(flag_rank), flag_off_(layout.spin_flag()),
      monitor_(monitor) {
  if (flag_rank < 1 || flag_rank > window.ranks())
    throw ConfigError("flag rank outside the window");
}

TasSpinLock::Handle::Handle(const TasSpinLock& lock, sim::Context& ctx)
    : lock_(lock), origin_(lock.window_, ctx) {}

void TasSpinLock::Handle::acquire() {
  if (held_) throw ProtocolViolation("spin acquire while already holding");
  sim::SpinWait sw(origin_.ctx());
  for (;;) {
    auto t = origin_.cas(1, 0, lock_.flag_rank_, lock_.flag_off_);
    origin_.flush(lock_.flag_rank_);
    if (t.value() == 0) break;
    sw.pause();
  }
  held_ = true;
  if (lock_.monitor_)
    lock_.monitor_->writer_enter(origin_.rank(), 0, 1, origin_.ctx().now_ns());
}

void TasSpinLock::Handle::release() {
  if (!held_) throw ProtocolViolation("spin release without holding");
  if (lock_.monitor_)
    lock_.monitor_->writer_exit(origin_.rank(), 0, 1, origin_.ctx().now_ns());
  held_ = false;
  origin_.put(0, lock_.flag_rank_, lock_.flag_off_);
  origin_.flush(lock_.flag_rank_);
}

}  // namespace rmalock::locks
