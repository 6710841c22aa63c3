#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "rmalock/types.hpp"

namespace rmalock::bench {

enum class BenchKind { lb, ecsb, sob, wcsb, warb, dht };
enum class LockKind { spin, dmcs, rmamcs, rmarw };
enum class DhtMode { atomics, rw, mcs };

const char* to_string(BenchKind k);
const char* to_string(LockKind k);
const char* to_string(DhtMode m);
BenchKind bench_from_string(const std::string& s);
LockKind lock_from_string(const std::string& s);
DhtMode dht_mode_from_string(const std::string& s);

struct BenchConfig {
  BenchKind bench = BenchKind::lb;
  LockKind lock = LockKind::dmcs;
  int procs = 4;

  // Topology and thresholds. Empty vectors pick defaults during
  // normalization: fanout 2 per level, locality thresholds 4, and a counter
  // stride equal to the leaf block size.
  int levels = 2;
  std::vector<int> fanout;
  int tdc = 0;
  std::vector<std::int64_t> tl;
  std::int64_t tr = 8;

  double fw = 0.002;  // fraction of writer processes
  int iters = 10'000;
  std::uint64_t seed = 1;

  // Injected latency: same-leaf accesses cost lat_intra, an access whose
  // deepest common level with its target is i costs lat_cross[i-1]. Empty
  // defaults to a 10x ladder on top of the intra cost.
  std::int64_t lat_intra = 100;
  std::vector<std::int64_t> lat_cross;

  bool wallclock = false;  // real threads and timers instead of the virtual clock
  bool audit = false;      // record events, run the auditors, nonzero exit on failure
  std::int64_t sched_window = 2000;
  std::chrono::milliseconds watchdog{60'000};

  DhtMode dht_mode = DhtMode::atomics;
  int table_size = 1024;
  int heap_size = 1024;

  std::string out;       // CSV destination; empty = stdout
  std::string dump_log;  // event-log destination; empty = no dump

  // Test hook: swaps in a deliberately broken lock so the audit path can be
  // exercised end to end. Not part of the documented surface.
  bool inject_me_bug = false;
};

// Fills defaulted fields in place and validates the combination.
void normalize(BenchConfig& cfg);

}  // namespace rmalock::bench
