#pragma once

#include <string>
#include <vector>

#include "rmalock/bench/config.hpp"

namespace rmalock::bench {

struct BenchRow {
  std::string metric;
  double value = 0.0;
};

struct BenchResult {
  BenchConfig cfg;  // normalized echo
  std::vector<BenchRow> rows;
  bool audit_ran = false;
  bool audit_ok = true;
  std::string audit_detail;
  std::string event_dump;  // filled when cfg.dump_log is set

  // "bench,lock,P,tdc,tl,tr,fw,seed,metric,value" with one line per row.
  // Byte-stable for a given config and seed in virtual-clock mode.
  std::string csv() const;
};

// Warmup rule shared by every metric: the first tenth of each rank's
// measurements is discarded; reported means cover the rest exactly.
int warmup_count(int iters);
double mean_of_tail(const std::vector<std::int64_t>& samples);

// Runs one benchmark configuration end to end: builds the window, topology
// and lock, spawns one context per rank, collects metrics and (with audit
// enabled) replays the event log through the auditors and checks quiescence.
BenchResult run_bench(const BenchConfig& cfg);

// Command-line entry: parses flags into a BenchConfig, runs it, writes the
// CSV. Exit codes: 0 success, 1 audit failure or deadlock, 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace rmalock::bench
