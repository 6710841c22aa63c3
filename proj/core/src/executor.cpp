#include "rmalock/sim/executor.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <thread>

#if !defined(__x86_64__)
#include <ucontext.h>
#endif

namespace rmalock::sim {

namespace detail {

#if defined(__x86_64__)

// Minimal user-space stack switch: saves the SysV callee-saved registers on
// the current stack, parks rsp, and resumes the target stack. No signal-mask
// syscall, so a switch costs tens of nanoseconds instead of microseconds.
asm(R"(
.text
.globl rmalock_fiber_swap
.type rmalock_fiber_swap, @function
rmalock_fiber_swap:
  pushq %rbp
  pushq %rbx
  pushq %r12
  pushq %r13
  pushq %r14
  pushq %r15
  movq %rsp, (%rdi)
  movq %rsi, %rsp
  popq %r15
  popq %r14
  popq %r13
  popq %r12
  popq %rbx
  popq %rbp
  ret
.size rmalock_fiber_swap, .-rmalock_fiber_swap
)");

extern "C" void rmalock_fiber_swap(void** save_sp, void* restore_sp);

struct FiberContext {
  void* sp = nullptr;

  // Lays the stack out so the first swap "returns" into entry with the
  // ABI-required alignment and a null fake caller frame above it.
  void prepare(char* stack, std::size_t size, void (*entry)()) {
    auto base = (reinterpret_cast<std::uintptr_t>(stack) + size) & ~std::uintptr_t{15};
    auto* words = reinterpret_cast<std::uintptr_t*>(base);
    words[-1] = 0;                                          // fake return address
    words[-2] = reinterpret_cast<std::uintptr_t>(entry);    // resumed by ret
    for (int i = 3; i <= 8; ++i) words[-i] = 0;             // callee-saved registers
    sp = words - 8;
  }

  static void swap(FiberContext& from, FiberContext& to) {
    rmalock_fiber_swap(&from.sp, to.sp);
  }
};

#else

// Portable fallback. swapcontext carries a signal-mask syscall per switch.
struct FiberContext {
  ucontext_t uc{};

  void prepare(char* stack, std::size_t size, void (*entry)()) {
    getcontext(&uc);
    uc.uc_stack.ss_sp = stack;
    uc.uc_stack.ss_size = size;
    uc.uc_link = nullptr;
    makecontext(&uc, entry, 0);
  }

  static void swap(FiberContext& from, FiberContext& to) {
    swapcontext(&from.uc, &to.uc);
  }
};

#endif

// Lockstep mode multiplexes every rank onto one OS thread as a fiber; a
// scheduling step is a user-space context switch, and exactly one context
// ever runs, so a seed reproduces the interleaving bit for bit. Concurrent
// mode runs plain threads and only shares the abort machinery.
struct Engine {
  struct Slot {
    FiberContext fc;
    std::unique_ptr<char[]> stack;
    bool finished = false;
    std::int64_t clock = 0;
    std::uint64_t last_sched = 0;
  };

  static constexpr std::size_t kStackBytes = 256 * 1024;

  ExecOptions opts;
  int procs;
  std::vector<Slot> slots;  // index 0 unused
  FiberContext main_fc;
  int current = 0;
  std::uint64_t steps = 0;
  std::uint64_t sched_seq = 0;
  std::mt19937_64 sched_rng;
  std::atomic<bool> abort{false};
  bool watchdog_fired = false;
  std::exception_ptr first_error;
  std::chrono::steady_clock::time_point deadline;
  const std::function<void(Context&)>* body = nullptr;
  std::vector<std::unique_ptr<Context>>* ctxs = nullptr;
  std::atomic<int> done_count{0};

  Engine(int p, const ExecOptions& o)
      : opts(o), procs(p), slots(p + 1), sched_rng(o.seed ^ 0x9e3779b97f4a7c15ull) {
    deadline = std::chrono::steady_clock::now() + opts.watchdog;
  }

  void note_error(std::exception_ptr err) {
    if (err && !first_error) first_error = err;
    if (err) abort.store(true, std::memory_order_relaxed);
  }

  void watchdog_check() {
    if (++steps > opts.max_steps ||
        (steps % 8192 == 0 && std::chrono::steady_clock::now() > deadline)) {
      watchdog_fired = true;
      abort.store(true, std::memory_order_relaxed);
    }
  }

  // Next runnable fiber: drawn uniformly among the unfinished contexts whose
  // clock sits within the scheduling window above the minimum. Window zero
  // degenerates to fair earliest-clock-first. Returns 0 when all finished.
  int pick() {
    std::int64_t min_clock = INT64_MAX;
    for (int i = 1; i <= procs; ++i)
      if (!slots[i].finished) min_clock = std::min(min_clock, slots[i].clock);
    if (min_clock == INT64_MAX) return 0;

    int n = 0, first = 0, best = 0, sampled = 0;
    for (int i = 1; i <= procs; ++i) {
      auto& s = slots[i];
      if (s.finished || s.clock - min_clock > opts.sched_window_ns) continue;
      ++n;
      if (first == 0) first = i;
      if (opts.sched_window_ns == 0) {
        if (best == 0 || s.last_sched < slots[best].last_sched) best = i;
      } else if (sched_rng() % n == 0) {
        sampled = i;  // reservoir sample: uniform without an allocation
      }
    }
    if (n == 0) return 0;
    if (opts.sched_window_ns == 0) return best;
    return sampled != 0 ? sampled : first;
  }

  void switch_to(int from, int next) {
    slots[next].last_sched = ++sched_seq;
    current = next;
    FiberContext::swap(slots[from].fc, slots[next].fc);
  }

  void step_fiber(Context& ctx, std::int64_t ns) {
    auto& me = slots[ctx.rank()];
    me.clock += ns;
    ctx.clock_ns_ = me.clock;
    watchdog_check();
    int next = pick();
    if (next != ctx.rank() && next != 0) switch_to(ctx.rank(), next);
    if (abort.load(std::memory_order_relaxed)) throw Aborted("run aborted");
  }

  void step_concurrent(Context& ctx, std::int64_t ns) {
    ctx.clock_ns_ += ns;
    if ((++ctx.local_steps_ & 0xff) == 0 &&
        std::chrono::steady_clock::now() > deadline) {
      watchdog_fired = true;
      abort.store(true, std::memory_order_relaxed);
    }
    if (abort.load(std::memory_order_relaxed)) throw Aborted("run aborted");
    if (opts.jitter && (ctx.rng_() & 0xf) == 0) std::this_thread::yield();
  }

  void run_current_fiber() {
    int me = current;
    try {
      if (!abort.load(std::memory_order_relaxed)) (*body)(*(*ctxs)[me]);
    } catch (const Aborted&) {
      // Teardown in progress; the root cause is recorded elsewhere.
    } catch (...) {
      note_error(std::current_exception());
    }
    slots[me].finished = true;
    int next = pick();
    if (next == 0) {
      current = 0;
      FiberContext::swap(slots[me].fc, main_fc);
    } else {
      switch_to(me, next);
    }
    // A finished fiber is never resumed.
  }

  static void fiber_entry();

  void run_lockstep();
  void run_concurrent();
};

namespace {
thread_local Engine* tl_engine = nullptr;
}

void Engine::fiber_entry() { tl_engine->run_current_fiber(); }

void Engine::run_lockstep() {
  tl_engine = this;
  for (int r = 1; r <= procs; ++r) {
    auto& s = slots[r];
    s.stack.reset(new char[kStackBytes]);
    s.fc.prepare(s.stack.get(), kStackBytes, &Engine::fiber_entry);
  }
  int first = pick();
  if (first != 0) {
    slots[first].last_sched = ++sched_seq;
    current = first;
    FiberContext::swap(main_fc, slots[first].fc);
  }
  tl_engine = nullptr;
  for (int r = 1; r <= procs; ++r) (*ctxs)[r]->clock_ns_ = slots[r].clock;
}

void Engine::run_concurrent() {
  std::vector<std::thread> threads;
  threads.reserve(procs);
  std::mutex err_mu;
  for (int r = 1; r <= procs; ++r) {
    threads.emplace_back([this, &err_mu, ctx = (*ctxs)[r].get()] {
      std::exception_ptr err;
      try {
        if (!abort.load(std::memory_order_relaxed)) (*body)(*ctx);
      } catch (const Aborted&) {
      } catch (...) {
        err = std::current_exception();
      }
      if (err) {
        std::lock_guard<std::mutex> lk(err_mu);
        note_error(err);
      }
      done_count.fetch_add(1, std::memory_order_release);
    });
  }
  while (done_count.load(std::memory_order_acquire) < procs) {
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    if (std::chrono::steady_clock::now() > deadline) {
      watchdog_fired = true;
      abort.store(true, std::memory_order_relaxed);
    }
  }
  for (auto& t : threads) t.join();
}

}  // namespace detail

void Context::charge(std::int64_t ns) {
  if (engine_->opts.mode == Mode::lockstep)
    engine_->step_fiber(*this, ns);
  else
    engine_->step_concurrent(*this, ns);
}

void Context::check_abort() const {
  if (engine_->abort.load(std::memory_order_relaxed)) throw Aborted("run aborted");
}

bool Context::lockstep() const { return engine_->opts.mode == Mode::lockstep; }

void SpinWait::pause() {
  if (++polls_ > max_polls_) throw WatchdogExpired("spin wait exceeded poll budget");
  ctx_.check_abort();
  if (ctx_.lockstep()) {
    // Bounded exponential backoff on the virtual clock: the poll interval
    // grows to a cap low enough not to mask handover latency, so waiters
    // neither flood the schedule nor oversleep a grant. Protocol state is
    // untouched.
    if (polls_ > 2) {
      unsigned shift = static_cast<unsigned>(std::min<std::uint64_t>(polls_ - 3, 3));
      ctx_.charge(std::int64_t{100} << shift);
    }
    return;
  }
  if (polls_ < 4) return;
  if (polls_ < 32) {
    std::this_thread::yield();
    return;
  }
  unsigned shift = polls_ < 64 ? 2 : (polls_ < 512 ? 4 : 6);
  std::this_thread::sleep_for(std::chrono::microseconds(1u << shift));
}

std::vector<std::int64_t> Executor::run(int procs, const ExecOptions& opts,
                                        const std::function<void(Context&)>& body) {
  if (procs < 1) throw ConfigError("executor needs at least one rank");
  detail::Engine eng(procs, opts);

  std::vector<std::unique_ptr<Context>> ctxs(procs + 1);
  for (int r = 1; r <= procs; ++r) {
    // Per-rank RNG stream derived from the run seed.
    std::uint64_t s = opts.seed * 0x100000001b3ull + static_cast<std::uint64_t>(r);
    ctxs[r].reset(new Context(&eng, r, s));
  }
  eng.body = &body;
  eng.ctxs = &ctxs;

  if (opts.mode == Mode::lockstep)
    eng.run_lockstep();
  else
    eng.run_concurrent();

  if (eng.first_error) std::rethrow_exception(eng.first_error);
  if (eng.watchdog_fired)
    throw WatchdogExpired("run did not complete within the watchdog budget");

  std::vector<std::int64_t> clocks(procs + 1, 0);
  for (int r = 1; r <= procs; ++r) clocks[r] = ctxs[r]->now_ns();
  return clocks;
}

}  // namespace rmalock::sim
