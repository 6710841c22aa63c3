#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "rmalock/types.hpp"

namespace rmalock::sim {

// How simulated process contexts are interleaved.
//
// concurrent: one OS thread per rank, free-running. Real races, wall time.
// lockstep:   one OS thread per rank, but exactly one runs at a time and the
//             scheduler hands the token over at every charge() point. Given
//             the same seed the interleaving (and thus every virtual-clock
//             reading) is reproduced exactly.
enum class Mode { concurrent, lockstep };

struct ExecOptions {
  Mode mode = Mode::concurrent;
  std::uint64_t seed = 1;
  // lockstep: the next context is drawn uniformly among those whose virtual
  // clock is within this window above the minimum. 0 degenerates to a fair
  // earliest-clock-first discrete-event schedule.
  std::int64_t sched_window_ns = 2000;
  std::chrono::milliseconds watchdog{60'000};
  // lockstep step budget; livelocks hit this before the wall deadline.
  std::uint64_t max_steps = 400'000'000;
  // concurrent: inject seeded sched_yield points for interleaving diversity.
  bool jitter = true;
};

namespace detail {
struct Engine;
}

class Executor;

// Per-rank execution context. Owns the rank's virtual clock and RNG.
// Not shareable across threads; each simulated process gets exactly one.
class Context {
 public:
  Rank rank() const { return rank_; }
  std::int64_t now_ns() const { return clock_ns_; }
  bool lockstep() const;

  // Advance the virtual clock and give the scheduler a chance to switch
  // contexts. Every simulated remote operation passes through here.
  void charge(std::int64_t ns);

  std::mt19937_64& rng() { return rng_; }

  // Throws Aborted if the run is being torn down.
  void check_abort() const;

 private:
  friend struct detail::Engine;
  friend class Executor;
  Context(detail::Engine* eng, Rank rank, std::uint64_t seed)
      : engine_(eng), rank_(rank), rng_(seed) {}

  detail::Engine* engine_;
  Rank rank_;
  std::int64_t clock_ns_ = 0;
  std::mt19937_64 rng_;
  unsigned local_steps_ = 0;
};

// Spin-wait pacing helper. In concurrent mode it yields early and backs off
// exponentially so oversubscribed runs keep making progress; in lockstep mode
// scheduling already happens at each poll's charge(). Also enforces the
// per-wait iteration cap that turns protocol hangs into errors.
class SpinWait {
 public:
  explicit SpinWait(Context& ctx, std::uint64_t max_polls = 200'000'000)
      : ctx_(ctx), max_polls_(max_polls) {}
  void pause();

 private:
  Context& ctx_;
  std::uint64_t polls_ = 0;
  std::uint64_t max_polls_;
};

class Executor {
 public:
  // Runs `body(ctx)` once per rank 1..procs and joins all contexts.
  // Returns the final virtual clock of each rank (index 0 unused).
  // Rethrows the first context failure; throws WatchdogExpired when the
  // deadline or step budget is exhausted first.
  static std::vector<std::int64_t> run(int procs, const ExecOptions& opts,
                                       const std::function<void(Context&)>& body);
};

}  // namespace rmalock::sim
