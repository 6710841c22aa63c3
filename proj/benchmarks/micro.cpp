// Microbenchmarks for the building blocks: raw window accesses, fiber
// scheduling steps, event logging and uncontended lock round trips. These
// measure the simulator itself (wall time), not the simulated machine; the
// virtual-clock workload benchmarks live in the rmalock tool.
#include <benchmark/benchmark.h>

#include "rmalock/locks/dmcs.hpp"
#include "rmalock/locks/rmamcs.hpp"
#include "rmalock/locks/rmarw.hpp"
#include "rmalock/rma/origin.hpp"
#include "rmalock/sim/executor.hpp"
#include "rmalock/verify/event_log.hpp"

using namespace rmalock;

namespace {

sim::ExecOptions solo_opts() {
  sim::ExecOptions opts;
  opts.mode = sim::Mode::lockstep;
  opts.watchdog = std::chrono::milliseconds(600'000);
  opts.max_steps = UINT64_MAX;
  return opts;
}

void BM_WindowFao(benchmark::State& state) {
  rma::Window w(1, 1);
  sim::Executor::run(1, solo_opts(), [&](sim::Context& ctx) {
    rma::Origin o(w, ctx);
    for (auto _ : state) {
      auto t = o.fao(1, 1, 0, rma::AtomicOp::sum);
      o.flush(1);
      benchmark::DoNotOptimize(t.value());
    }
  });
}
BENCHMARK(BM_WindowFao);

void BM_WindowPutFlush(benchmark::State& state) {
  rma::Window w(1, 1);
  sim::Executor::run(1, solo_opts(), [&](sim::Context& ctx) {
    rma::Origin o(w, ctx);
    std::int64_t v = 0;
    for (auto _ : state) {
      o.put(++v, 1, 0);
      o.flush(1);
    }
  });
}
BENCHMARK(BM_WindowPutFlush);

// Cost of one scheduling step with other fibers runnable.
void BM_SchedulerStep(benchmark::State& state) {
  int procs = static_cast<int>(state.range(0));
  long long steps = 0;
  bool finished = false;
  sim::Executor::run(procs, solo_opts(), [&](sim::Context& ctx) {
    if (ctx.rank() == 1) {
      for (auto _ : state) {
        ctx.charge(1);
        ++steps;
      }
      finished = true;
    } else {
      // Peers stay runnable so the scheduler has real choices.
      while (!finished) ctx.charge(1);
    }
  });
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_SchedulerStep)->Arg(2)->Arg(8)->Arg(32);

void BM_EventLogAppend(benchmark::State& state) {
  verify::EventLog log;
  for (auto _ : state) log.record(1, verify::EventKind::read_enter, 0, 1, 0);
}
BENCHMARK(BM_EventLogAppend);

void BM_UncontendedDmcs(benchmark::State& state) {
  topo::WindowLayout layout(1);
  rma::Window w(1, layout.words_per_rank());
  locks::DmcsLock lock(w, layout);
  sim::Executor::run(1, solo_opts(), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    for (auto _ : state) {
      h.acquire();
      h.release();
    }
  });
}
BENCHMARK(BM_UncontendedDmcs);

void BM_UncontendedTreeLock(benchmark::State& state) {
  auto topo = topo::TopologySpec::uniform(4, 2, std::vector<int>{2});
  topo::WindowLayout layout(2);
  rma::Window w(4, layout.words_per_rank());
  locks::RmamcsLock lock(w, topo, layout, topo::LockParams({4, 4}, 8));
  sim::Executor::run(4, solo_opts(), [&](sim::Context& ctx) {
    if (ctx.rank() != 1) return;
    auto h = lock.handle(ctx);
    for (auto _ : state) {
      h.acquire();
      h.release();
    }
  });
}
BENCHMARK(BM_UncontendedTreeLock);

void BM_UncontendedReaderPair(benchmark::State& state) {
  auto topo = topo::TopologySpec::flat(1);
  topo::WindowLayout layout(1);
  rma::Window w(1, layout.words_per_rank());
  locks::RmarwLock lock(w, topo, topo::CounterMap(1, 1), layout,
                        topo::LockParams({4}, std::int64_t{1} << 40));
  sim::Executor::run(1, solo_opts(), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    for (auto _ : state) {
      h.acquire_read();
      h.release_read();
    }
  });
}
BENCHMARK(BM_UncontendedReaderPair);

}  // namespace

BENCHMARK_MAIN();
