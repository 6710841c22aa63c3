#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rmalock/bench/runner.hpp"

namespace rmalock::bench {

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Distributed lock simulator and benchmark harness"};
  BenchConfig cfg;

  std::string bench = "lb", lock = "dmcs", dht_mode = "atomics";
  std::int64_t watchdog_ms = 60'000;

  app.add_option("--bench", bench, "Benchmark: lb, ecsb, sob, wcsb, warb, dht");
  app.add_option("--lock", lock, "Lock: spin, dmcs, rmamcs, rmarw");
  app.add_option("--procs", cfg.procs, "Simulated process count");
  app.add_option("--levels", cfg.levels, "Hierarchy levels (1 = flat machine)");
  app.add_option("--fanout", cfg.fanout, "Children per element, one entry per non-leaf level")
      ->delimiter(',');
  app.add_option("--tdc", cfg.tdc, "Reader-counter stride (0 = one counter per leaf element)");
  app.add_option("--tl", cfg.tl, "Locality thresholds, one per level")->delimiter(',');
  app.add_option("--tr", cfg.tr, "Reader batch threshold");
  app.add_option("--fw", cfg.fw, "Fraction of writer processes (dht: insert fraction)");
  app.add_option("--iters", cfg.iters, "Operations per process");
  app.add_option("--seed", cfg.seed, "Seed for roles, schedules and workloads");
  app.add_option("--lat-intra", cfg.lat_intra, "Same-leaf access delay (ns)");
  app.add_option("--lat-cross", cfg.lat_cross,
                 "Cross delays (ns), one per non-leaf common level")
      ->delimiter(',');
  app.add_flag("--wallclock", cfg.wallclock, "Free-running threads and real timers");
  app.add_flag("--audit", cfg.audit, "Record events, audit after the run, exit 1 on failure");
  app.add_option("--sched-window", cfg.sched_window,
                 "Virtual-mode scheduling randomness window (ns)");
  app.add_option("--watchdog-ms", watchdog_ms, "Per-run watchdog (milliseconds)");
  app.add_option("--dht-mode", dht_mode, "dht discipline: atomics, rw, mcs");
  app.add_option("--table-size", cfg.table_size, "dht slots per volume");
  app.add_option("--heap-size", cfg.heap_size, "dht overflow heap entries");
  app.add_option("--out", cfg.out, "CSV destination (default stdout)");
  app.add_option("--dump-log", cfg.dump_log, "Write the event log here (requires --audit)");
  auto* inject = app.add_option("--inject", "Fault-injection hook (testing)");
  inject->group("");  // hidden

  try {
    app.parse(argc, argv);
    cfg.bench = bench_from_string(bench);
    cfg.lock = lock_from_string(lock);
    cfg.dht_mode = dht_mode_from_string(dht_mode);
    cfg.watchdog = std::chrono::milliseconds(watchdog_ms);
    if (inject->count()) {
      if (inject->as<std::string>() != "me-bug")
        throw ConfigError("unknown fault injection '" + inject->as<std::string>() + "'");
      cfg.inject_me_bug = true;
    }
    normalize(cfg);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  BenchResult result;
  try {
    result = run_bench(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }

  std::string csv = result.csv();
  if (cfg.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(cfg.out);
    if (!f) {
      std::cerr << "error: cannot write " << cfg.out << "\n";
      return 2;
    }
    f << csv;
  }
  if (!cfg.dump_log.empty() && result.audit_ran) {
    std::ofstream f(cfg.dump_log);
    if (!f) {
      std::cerr << "error: cannot write " << cfg.dump_log << "\n";
      return 2;
    }
    f << result.event_dump;
  }
  if (result.audit_ran && !result.audit_ok) {
    std::cerr << "audit failed: " << result.audit_detail << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rmalock::bench
