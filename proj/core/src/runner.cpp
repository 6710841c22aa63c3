#include "rmalock/bench/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>

#include "rmalock/dht/volume.hpp"
#include "rmalock/locks/dmcs.hpp"
#include "rmalock/locks/rmamcs.hpp"
#include "rmalock/locks/rmarw.hpp"
#include "rmalock/verify/auditors.hpp"
#include "rmalock/verify/quiescence.hpp"

namespace rmalock::bench {

namespace {

using topo::Role;

// Per-context view of whichever lock the run selected.
class LockSession {
 public:
  virtual ~LockSession() = default;
  virtual void acquire(Role role) = 0;
  virtual void release(Role role) = 0;
};

class LockFactory {
 public:
  virtual ~LockFactory() = default;
  virtual std::unique_ptr<LockSession> session(sim::Context& ctx) = 0;
};

template <class Lock>
class ExclusiveSession : public LockSession {
 public:
  explicit ExclusiveSession(typename Lock::Handle h) : h_(std::move(h)) {}
  void acquire(Role) override { h_.acquire(); }
  void release(Role) override { h_.release(); }

 private:
  typename Lock::Handle h_;
};

class RwSession : public LockSession {
 public:
  explicit RwSession(locks::RmarwLock::Handle h) : h_(std::move(h)) {}
  void acquire(Role role) override {
    if (role == Role::writer)
      h_.acquire_write();
    else
      h_.acquire_read();
  }
  void release(Role role) override {
    if (role == Role::writer)
      h_.release_write();
    else
      h_.release_read();
  }

 private:
  locks::RmarwLock::Handle h_;
};

template <class Lock>
class ExclusiveFactory : public LockFactory {
 public:
  template <class... Args>
  explicit ExclusiveFactory(Args&&... args) : lock_(std::forward<Args>(args)...) {}
  std::unique_ptr<LockSession> session(sim::Context& ctx) override {
    return std::make_unique<ExclusiveSession<Lock>>(lock_.handle(ctx));
  }

 private:
  Lock lock_;
};

class RwFactory : public LockFactory {
 public:
  template <class... Args>
  explicit RwFactory(Args&&... args) : lock_(std::forward<Args>(args)...) {}
  std::unique_ptr<LockSession> session(sim::Context& ctx) override {
    return std::make_unique<RwSession>(lock_.handle(ctx));
  }

 private:
  locks::RmarwLock lock_;
};

// Test-hook lock: every third acquire skips the protocol entirely while
// still reporting a critical-section entry, so the audit pipeline has a real
// mutual-exclusion breach to catch.
class BrokenSpinSession : public LockSession {
 public:
  BrokenSpinSession(locks::TasSpinLock::Handle h, verify::Monitor* mon, sim::Context& ctx)
      : h_(std::move(h)), mon_(mon), ctx_(ctx) {}
  void acquire(Role) override {
    skipped_ = ++n_ % 3 == 0;
    if (skipped_) {
      if (mon_) mon_->writer_enter(ctx_.rank(), 0, 1, ctx_.now_ns());
      // Dwell inside the stolen critical section so a legitimate holder can
      // overlap with it.
      ctx_.charge(2000);
    } else {
      h_.acquire();
    }
  }
  void release(Role) override {
    if (skipped_) {
      if (mon_) mon_->writer_exit(ctx_.rank(), 0, 1, ctx_.now_ns());
    } else {
      h_.release();
    }
  }

 private:
  locks::TasSpinLock::Handle h_;
  verify::Monitor* mon_;
  sim::Context& ctx_;
  int n_ = 0;
  bool skipped_ = false;
};

class BrokenSpinFactory : public LockFactory {
 public:
  BrokenSpinFactory(rma::Window& w, const topo::WindowLayout& l, verify::Monitor* m)
      : lock_(w, l, 1, m), mon_(m) {}
  std::unique_ptr<LockSession> session(sim::Context& ctx) override {
    return std::make_unique<BrokenSpinSession>(lock_.handle(ctx), mon_, ctx);
  }

 private:
  locks::TasSpinLock lock_;
  verify::Monitor* mon_;
};

struct Setup {
  topo::TopologySpec topo;
  topo::CounterMap counters;
  topo::LockParams params;
  topo::WindowLayout layout;
  std::unique_ptr<rma::Window> window;
  std::unique_ptr<verify::Monitor> monitor;
  std::unique_ptr<LockFactory> lock;  // null for lock-free dht runs
  std::vector<Role> roles;
  std::unique_ptr<dht::Volume> volume;
};

Setup build(const BenchConfig& cfg) {
  Setup s{
      topo::TopologySpec::uniform(cfg.procs, cfg.levels, cfg.fanout),
      topo::CounterMap(cfg.procs, cfg.tdc),
      topo::LockParams(cfg.tl, cfg.tr),
      topo::WindowLayout(cfg.levels),
      nullptr, nullptr, nullptr, {}, nullptr,
  };
  int words = s.layout.words_per_rank();
  dht::Volume::Config vol_cfg;
  if (cfg.bench == BenchKind::dht) {
    vol_cfg = dht::Volume::Config{1, cfg.table_size, cfg.heap_size, words};
    words += dht::Volume::words_needed(vol_cfg);
  }
  rma::LatencyModel lat(s.topo, cfg.lat_intra, cfg.lat_cross);
  s.window = std::make_unique<rma::Window>(cfg.procs, words, lat);
  if (cfg.audit) s.monitor = std::make_unique<verify::Monitor>(/*live_check=*/false);
  verify::Monitor* mon = s.monitor.get();

  LockKind kind = cfg.lock;
  bool want_lock = true;
  if (cfg.bench == BenchKind::dht) {
    switch (cfg.dht_mode) {
      case DhtMode::atomics: want_lock = false; break;
      case DhtMode::rw: kind = LockKind::rmarw; break;
      case DhtMode::mcs: kind = LockKind::rmamcs; break;
    }
  }
  if (cfg.inject_me_bug) {
    s.lock = std::make_unique<BrokenSpinFactory>(*s.window, s.layout, mon);
  } else if (want_lock) {
    switch (kind) {
      case LockKind::spin:
        s.lock = std::make_unique<ExclusiveFactory<locks::TasSpinLock>>(*s.window, s.layout,
                                                                        1, mon);
        break;
      case LockKind::dmcs:
        s.lock = std::make_unique<ExclusiveFactory<locks::DmcsLock>>(*s.window, s.layout, 1,
                                                                     mon);
        break;
      case LockKind::rmamcs:
        s.lock = std::make_unique<ExclusiveFactory<locks::RmamcsLock>>(
            *s.window, s.topo, s.layout, s.params, mon);
        break;
      case LockKind::rmarw:
        s.lock = std::make_unique<RwFactory>(*s.window, s.topo, s.counters, s.layout,
                                             s.params, mon);
        break;
    }
  }
  s.roles = topo::WorkloadSpec{cfg.fw}.roles(cfg.procs, cfg.seed);
  if (kind != LockKind::rmarw)
    std::fill(s.roles.begin(), s.roles.end(), Role::writer);
  if (cfg.bench == BenchKind::dht) s.volume = std::make_unique<dht::Volume>(*s.window, vol_cfg);
  return s;
}

sim::ExecOptions exec_options(const BenchConfig& cfg) {
  sim::ExecOptions opts;
  opts.mode = cfg.wallclock ? sim::Mode::concurrent : sim::Mode::lockstep;
  opts.seed = cfg.seed;
  opts.sched_window_ns = cfg.sched_window;
  opts.watchdog = cfg.watchdog;
  return opts;
}

std::int64_t wall_now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct RunOutcome {
  std::vector<std::int64_t> start_clock, warm_clock, end_clock;    // per rank
  std::vector<std::vector<std::int64_t>> samples;                  // per rank (lb)
  std::vector<char> participated;                                  // per rank
};

RunOutcome run_bodies(const BenchConfig& cfg, Setup& s) {
  RunOutcome out;
  out.start_clock.assign(cfg.procs + 1, 0);
  out.warm_clock.assign(cfg.procs + 1, 0);
  out.end_clock.assign(cfg.procs + 1, 0);
  out.samples.assign(cfg.procs + 1, {});
  out.participated.assign(cfg.procs + 1, 0);
  const int warm = warmup_count(cfg.iters);

  sim::Executor::run(cfg.procs, exec_options(cfg), [&](sim::Context& ctx) {
    const Rank me = ctx.rank();
    // In the hashtable runs rank 1 only hosts the volume, unless it is the
    // sole process.
    if (cfg.bench == BenchKind::dht && me == 1 && cfg.procs > 1) return;
    out.participated[me] = 1;

    auto session = s.lock ? s.lock->session(ctx) : nullptr;
    Role role = s.roles[me];
    rma::Origin origin(*s.window, ctx);
    auto now = [&] { return cfg.wallclock ? wall_now_ns() : ctx.now_ns(); };
    auto think = [&](std::int64_t ns) {
      if (!cfg.wallclock) {
        ctx.charge(ns);
        return;
      }
      std::int64_t until = wall_now_ns() + ns;
      while (wall_now_ns() < until) {
      }
    };
    std::uniform_int_distribution<std::int64_t> wait_ns(1000, 4000);
    auto& samples = out.samples[me];
    if (cfg.bench == BenchKind::lb) samples.reserve(cfg.iters);

    // Hashtable workload: an exact writer-fraction mix of inserts and reads
    // against rank 1's volume.
    std::vector<char> is_insert;
    std::uniform_int_distribution<std::int64_t> dht_value(1, 4ll * cfg.table_size);
    if (cfg.bench == BenchKind::dht) {
      auto inserts = std::min<std::int64_t>(std::llround(cfg.fw * cfg.iters), cfg.iters);
      is_insert.assign(cfg.iters, 0);
      std::fill(is_insert.begin(), is_insert.begin() + inserts, 1);
      std::shuffle(is_insert.begin(), is_insert.end(), ctx.rng());
    }

    out.start_clock[me] = now();
    for (int it = 0; it < cfg.iters; ++it) {
      if (it == warm) out.warm_clock[me] = now();
      std::int64_t t0 = now();
      switch (cfg.bench) {
        case BenchKind::lb:
        case BenchKind::ecsb:
        case BenchKind::warb:
          session->acquire(role);
          session->release(role);
          break;
        case BenchKind::sob:
          session->acquire(role);
          origin.accumulate(1, 1, s.layout.shared_word(), rma::AtomicOp::sum);
          origin.flush(1);
          session->release(role);
          break;
        case BenchKind::wcsb:
          session->acquire(role);
          origin.accumulate(1, 1, s.layout.shared_word(), rma::AtomicOp::sum);
          origin.flush(1);
          think(wait_ns(ctx.rng()));
          session->release(role);
          break;
        case BenchKind::dht: {
          std::int64_t v = dht_value(ctx.rng());
          if (is_insert[it]) {
            if (session) session->acquire(Role::writer);
            s.volume->insert(origin, v);
            if (session) session->release(Role::writer);
          } else {
            Role r = cfg.dht_mode == DhtMode::rw ? Role::reader : Role::writer;
            if (session) session->acquire(r);
            s.volume->lookup(origin, v);
            if (session) session->release(r);
          }
          break;
        }
      }
      if (cfg.bench == BenchKind::lb) samples.push_back(now() - t0);
      if (cfg.bench == BenchKind::warb) think(wait_ns(ctx.rng()));
    }
    out.end_clock[me] = now();
  });
  return out;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

int warmup_count(int iters) { return iters / 10; }

double mean_of_tail(const std::vector<std::int64_t>& samples) {
  if (samples.empty()) return 0.0;
  int warm = warmup_count(static_cast<int>(samples.size()));
  std::int64_t sum = 0;
  for (std::size_t i = warm; i < samples.size(); ++i) sum += samples[i];
  return static_cast<double>(sum) / (samples.size() - warm);
}

std::string BenchResult::csv() const {
  std::ostringstream os;
  os << "bench,lock,P,tdc,tl,tr,fw,seed,metric,value\n";
  std::string tl;
  for (std::size_t i = 0; i < cfg.tl.size(); ++i) {
    if (i) tl += 'x';
    tl += std::to_string(cfg.tl[i]);
  }
  char fw[32];
  std::snprintf(fw, sizeof(fw), "%.6g", cfg.fw);
  for (const auto& row : rows)
    os << to_string(cfg.bench) << ',' << to_string(cfg.lock) << ',' << cfg.procs << ','
       << cfg.tdc << ',' << tl << ',' << cfg.tr << ',' << fw << ',' << cfg.seed << ','
       << row.metric << ',' << format_value(row.value) << '\n';
  return os.str();
}

BenchResult run_bench(const BenchConfig& raw) {
  BenchConfig cfg = raw;
  normalize(cfg);
  if (cfg.bench == BenchKind::dht) {
    // The lock column reflects what actually guarded the table.
    if (cfg.dht_mode == DhtMode::rw) cfg.lock = LockKind::rmarw;
    if (cfg.dht_mode == DhtMode::mcs) cfg.lock = LockKind::rmamcs;
  }
  Setup s = build(cfg);

  BenchResult result;
  result.cfg = cfg;

  RunOutcome out;
  bool run_failed = false;
  try {
    out = run_bodies(cfg, s);
  } catch (const WatchdogExpired& e) {
    if (!cfg.audit) throw;
    run_failed = true;
    result.audit_ok = false;
    result.audit_detail = e.what();
  } catch (const ProtocolViolation& e) {
    if (!cfg.audit) throw;
    run_failed = true;
    result.audit_ok = false;
    result.audit_detail = e.what();
  }

  if (!run_failed) {
    if (cfg.bench == BenchKind::lb) {
      for (Rank r = 1; r <= cfg.procs; ++r)
        if (out.participated[r])
          result.rows.push_back(
              {"latency_ns:r" + std::to_string(r), mean_of_tail(out.samples[r])});
    } else {
      std::int64_t start = INT64_MAX, warm_end = 0, end = 0;
      std::int64_t measured_ops = 0, total_ops = 0;
      int warm = warmup_count(cfg.iters);
      for (Rank r = 1; r <= cfg.procs; ++r) {
        if (!out.participated[r]) continue;
        start = std::min(start, out.start_clock[r]);
        warm_end = std::max(warm_end, out.warm_clock[r]);
        end = std::max(end, out.end_clock[r]);
        measured_ops += cfg.iters - warm;
        total_ops += cfg.iters;
      }
      if (cfg.bench == BenchKind::dht) {
        std::string mode = to_string(cfg.dht_mode);
        result.rows.push_back(
            {"elapsed_ns:" + mode, static_cast<double>(end - std::min(start, end))});
        result.rows.push_back({"ops_total:" + mode, static_cast<double>(total_ops)});
      } else {
        double elapsed_ns = static_cast<double>(std::max<std::int64_t>(end - warm_end, 1));
        result.rows.push_back({"throughput_ops_per_s", measured_ops * 1e9 / elapsed_ns});
      }
    }
  }

  if (cfg.audit && s.monitor) {
    result.audit_ran = true;
    auto events = s.monitor->log().snapshot();
    if (auto v = verify::audit_mutual_exclusion(events); !v) {
      result.audit_ok = false;
      result.audit_detail =
          "mutual exclusion: " + v.detail + " (seq " + std::to_string(v.at_seq) + ")";
    }
    if (result.audit_ok && cfg.lock == LockKind::rmarw) {
      verify::ThresholdAuditConfig tcfg;
      tcfg.writer_batch = s.params.writer_batch();
      tcfg.reader_batch = s.params.reader_batch();
      tcfg.topo = &s.topo;
      tcfg.params = &s.params;
      if (auto v = verify::audit_thresholds(events, tcfg); !v) {
        result.audit_ok = false;
        result.audit_detail = "thresholds: " + v.detail;
      }
    }
    if (result.audit_ok && cfg.lock == LockKind::dmcs && !cfg.inject_me_bug) {
      if (auto v = verify::audit_queue_fifo(events); !v) {
        result.audit_ok = false;
        result.audit_detail = "fifo: " + v.detail;
      }
    }
    if (result.audit_ok && !run_failed) {
      auto q = verify::check_quiescence(*s.window, s.topo, s.layout, &s.counters);
      if (!q.ok) {
        result.audit_ok = false;
        result.audit_detail = "quiescence: " + q.detail;
      }
    }
    if (!cfg.dump_log.empty()) {
      std::ostringstream os;
      s.monitor->log().dump(os);
      result.event_dump = os.str();
    }
  }
  return result;
}

}  // namespace rmalock::bench
