#include "rmalock/rma/window.hpp"

#include <algorithm>

#include "rmalock/rma/origin.hpp"

namespace rmalock::rma {

LatencyModel::LatencyModel(topo::TopologySpec topo, std::int64_t intra_ns,
                           std::vector<std::int64_t> cross_ns)
    : topo_(std::move(topo)), intra_ns_(intra_ns), cross_ns_(std::move(cross_ns)) {
  if (intra_ns_ < 0) throw ConfigError("latency delays must be >= 0");
  if (static_cast<int>(cross_ns_.size()) != topo_->levels() - 1)
    throw ConfigError("need one cross-level delay per non-leaf level");
  for (auto d : cross_ns_)
    if (d < 0) throw ConfigError("latency delays must be >= 0");
}

LatencyModel LatencyModel::uniform(std::int64_t ns) {
  if (ns < 0) throw ConfigError("latency delays must be >= 0");
  LatencyModel m;
  m.intra_ns_ = ns;
  return m;
}

std::int64_t LatencyModel::delay_ns(Rank origin, Rank target) const {
  if (is_local(origin, target)) return intra_ns_;
  int n = topo_->levels();
  for (int i = n - 1; i >= 1; --i)
    if (topo_->element_of(origin, i) == topo_->element_of(target, i))
      return cross_ns_[i - 1];
  return cross_ns_[0];
}

bool LatencyModel::is_local(Rank origin, Rank target) const {
  if (!topo_ || origin == target) return true;
  int n = topo_->levels();
  return topo_->element_of(origin, n) == topo_->element_of(target, n);
}

Window::Window(int ranks, int words_per_rank, std::optional<LatencyModel> latency,
               Strictness strictness)
    : ranks_(ranks), words_(words_per_rank), strictness_(strictness),
      latency_(std::move(latency)) {
  if (ranks < 1 || words_per_rank < 1)
    throw ConfigError("window needs at least one rank and one word per rank");
  std::size_t total = static_cast<std::size_t>(ranks) * words_per_rank;
  cells_.reset(new std::atomic<std::int64_t>[total]);
  for (std::size_t i = 0; i < total; ++i) cells_[i].store(0, std::memory_order_relaxed);
  busy_.reset(new std::atomic<std::int64_t>[ranks + 1]);
  for (int i = 0; i <= ranks; ++i) busy_[i].store(0, std::memory_order_relaxed);
}

std::atomic<std::int64_t>& Window::busy_horizon(Rank rank) {
  if (rank < 1 || rank > ranks_) throw AddressError("target rank out of range");
  return busy_[rank];
}

std::atomic<std::int64_t>& Window::cell(Rank rank, Offset offset) {
  if (rank < 1 || rank > ranks_) throw AddressError("target rank out of range");
  if (offset < 0 || offset >= words_) throw AddressError("offset out of range");
  return cells_[static_cast<std::size_t>(rank - 1) * words_ + offset];
}

const std::atomic<std::int64_t>& Window::cell(Rank rank, Offset offset) const {
  return const_cast<Window*>(this)->cell(rank, offset);
}

std::int64_t Window::peek(Rank rank, Offset offset) const {
  return cell(rank, offset).load(std::memory_order_seq_cst);
}

void Window::poke(Rank rank, Offset offset, std::int64_t value) {
  cell(rank, offset).store(value, std::memory_order_seq_cst);
}

bool Ticket::complete() const {
  return origin_->flushed_[target_] >= seq_;
}

std::int64_t ValueTicket::value() const {
  if (origin_->window_.strictness() == Strictness::strict && !complete())
    throw ContractViolation("ticket value read before flush");
  return value_;
}

Origin::Origin(Window& window, sim::Context& ctx)
    : window_(window), ctx_(ctx),
      issued_(window.ranks() + 1, 0), flushed_(window.ranks() + 1, 0) {}

std::atomic<std::int64_t>& Origin::checked_cell(Rank target, Offset offset) {
  return window_.cell(target, offset);
}

std::uint64_t Origin::issue(Rank target) {
  const auto& lat = window_.latency();
  if (!lat) {
    ctx_.charge(0);
    return ++issued_[target];
  }
  std::int64_t delay = lat->delay_ns(rank(), target);
  if (lat->is_local(rank(), target)) {
    ctx_.charge(delay);
    return ++issued_[target];
  }
  // Remote access: wait for the target's service horizon, then occupy it.
  auto& busy = window_.busy_horizon(target);
  std::int64_t now = ctx_.now_ns();
  std::int64_t horizon = busy.load(std::memory_order_relaxed);
  std::int64_t completion = std::max(now, horizon) + delay;
  while (horizon < completion &&
         !busy.compare_exchange_weak(horizon, completion, std::memory_order_relaxed)) {
    completion = std::max(now, horizon) + delay;
  }
  ctx_.charge(completion - now);
  return ++issued_[target];
}

Ticket Origin::put(std::int64_t src_data, Rank target, Offset offset) {
  auto& c = checked_cell(target, offset);
  auto seq = issue(target);
  c.store(src_data, std::memory_order_seq_cst);
  return Ticket(this, target, seq);
}

ValueTicket Origin::get(Rank target, Offset offset) {
  auto& c = checked_cell(target, offset);
  auto seq = issue(target);
  return ValueTicket(this, target, seq, c.load(std::memory_order_seq_cst));
}

Ticket Origin::accumulate(std::int64_t oprd, Rank target, Offset offset, AtomicOp op) {
  auto& c = checked_cell(target, offset);
  auto seq = issue(target);
  if (op == AtomicOp::sum)
    c.fetch_add(oprd, std::memory_order_seq_cst);
  else
    c.exchange(oprd, std::memory_order_seq_cst);
  return Ticket(this, target, seq);
}

ValueTicket Origin::fao(std::int64_t oprd, Rank target, Offset offset, AtomicOp op) {
  auto& c = checked_cell(target, offset);
  auto seq = issue(target);
  std::int64_t prev = op == AtomicOp::sum ? c.fetch_add(oprd, std::memory_order_seq_cst)
                                          : c.exchange(oprd, std::memory_order_seq_cst);
  return ValueTicket(this, target, seq, prev);
}

ValueTicket Origin::cas(std::int64_t src_data, std::int64_t cmp_data, Rank target,
                        Offset offset) {
  auto& c = checked_cell(target, offset);
  auto seq = issue(target);
  std::int64_t expected = cmp_data;
  if (c.compare_exchange_strong(expected, src_data, std::memory_order_seq_cst))
    return ValueTicket(this, target, seq, cmp_data);
  return ValueTicket(this, target, seq, expected);
}

// Completion fence only: delays attach to operation issue, and issue is
// already a scheduling point, so a flush is free and never switches
// contexts. Keeping it switch-free also pins instrumentation recorded right
// after a flushed operation into the same scheduling slice in lockstep runs.
void Origin::flush(Rank target) {
  if (target < 1 || target > window_.ranks())
    throw AddressError("target rank out of range");
  std::atomic_thread_fence(std::memory_order_seq_cst);
  flushed_[target] = issued_[target];
}

}  // namespace rmalock::rma
