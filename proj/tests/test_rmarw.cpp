#include "doctest.h"

#include <atomic>
#include <thread>

#include "lock_test_util.hpp"
#include "rmalock/locks/rmarw.hpp"
#include "rmalock/locks/status.hpp"

using namespace rmalock;
using locks::kWriteSentinel;
using testutil::Rig;

namespace {

// Drives one handle on one rank; everything else idles.
void solo(Rig& rig, locks::RmarwLock& lock, Rank rank,
          const std::function<void(locks::RmarwLock::Handle&)>& body) {
  sim::Executor::run(rig.topo.procs(), rig.exec(sim::Mode::lockstep, 1),
                     [&](sim::Context& ctx) {
                       if (ctx.rank() != rank) return;
                       auto h = lock.handle(ctx);
                       body(h);
                     });
}

}  // namespace

TEST_CASE("reset arithmetic matches the hand trace") {
  Rig rig(2, 1, {}, {4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params);
  auto arrive = rig.layout.arrive();
  auto depart = rig.layout.depart();

  solo(rig, lock, 1, [&](locks::RmarwLock::Handle& h) {
    // Fully departed write-mode counter folds back to zero.
    rig.window.poke(1, arrive, kWriteSentinel + 5);
    rig.window.poke(1, depart, 5);
    h.reset_counter(1);
    CHECK(rig.window.peek(1, arrive) == 0);
    CHECK(rig.window.peek(1, depart) == 0);

    // Balanced counter without the sentinel also folds to zero.
    rig.window.poke(1, arrive, 7);
    rig.window.poke(1, depart, 7);
    h.reset_counter(1);
    CHECK(rig.window.peek(1, arrive) == 0);
    CHECK(rig.window.peek(1, depart) == 0);

    // Two readers still inside stay counted as arrived.
    rig.window.poke(1, arrive, kWriteSentinel + 5);
    rig.window.poke(1, depart, 3);
    h.reset_counter(1);
    CHECK(rig.window.peek(1, arrive) == 2);
    CHECK(rig.window.peek(1, depart) == 0);
    rig.window.poke(1, arrive, 0);
  });
}

TEST_CASE("switching the counters to write mode raises every arrival word") {
  Rig rig(4, 1, {}, {4}, 8, 2);  // counters on ranks 1 and 3
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params);
  auto arrive = rig.layout.arrive();
  rig.window.poke(1, arrive, 5);

  solo(rig, lock, 2, [&](locks::RmarwLock::Handle& h) {
    h.set_counters_to_write();
    CHECK(rig.window.peek(1, arrive) == kWriteSentinel + 5);
    CHECK(rig.window.peek(3, arrive) == kWriteSentinel);

    // Not idempotent: a second application moves the counters again, a
    // protocol bug that the counter invariants catch downstream.
    h.set_counters_to_write();
    CHECK(rig.window.peek(3, arrive) != kWriteSentinel);
    rig.window.poke(3, arrive, kWriteSentinel);
  });
  // A resting sentinel is itself a quiescence failure.
  CHECK(!rig.quiescence().ok);
}

TEST_CASE("drain returns immediately when no reader is inside") {
  Rig rig(2, 1, {}, {4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params);
  solo(rig, lock, 1, [&](locks::RmarwLock::Handle& h) {
    rig.window.poke(1, rig.layout.arrive(), kWriteSentinel + 6);
    rig.window.poke(1, rig.layout.depart(), 6);
    h.drain_readers();  // must not block
    rig.window.poke(1, rig.layout.arrive(), 0);
    rig.window.poke(1, rig.layout.depart(), 0);
  });
}

TEST_CASE("readers enter below the threshold and count departures") {
  Rig rig(4, 1, {}, {4}, 8, 4);  // one counter, hosted on rank 1
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                        &rig.monitor);
  sim::Executor::run(4, rig.exec(sim::Mode::lockstep, 1), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    h.acquire_read();
    CHECK(h.holds_read());
    h.release_read();
  });
  // All four readers came and went through the single counter.
  CHECK(rig.window.peek(1, rig.layout.arrive()) == 4);
  CHECK(rig.window.peek(1, rig.layout.depart()) == 4);
  CHECK(verify::audit_mutual_exclusion(rig.monitor.log().snapshot()).ok);
  CHECK(rig.quiescence().ok);
}

TEST_CASE("a reader hitting the threshold with no writer resets and retries") {
  Rig rig(2, 1, {}, {4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                        &rig.monitor);
  // Eight readers have come and gone; the next arrival fetches exactly T_R,
  // sees no waiting writer, folds the counter and enters on the retry.
  rig.window.poke(1, rig.layout.arrive(), 8);
  rig.window.poke(1, rig.layout.depart(), 8);
  solo(rig, lock, 1, [&](locks::RmarwLock::Handle& h) {
    h.acquire_read();
    CHECK(h.holds_read());
    h.release_read();
  });
  auto events = rig.monitor.log().snapshot();
  REQUIRE(!events.empty());
  CHECK(events[0].kind == verify::EventKind::counter_reset);
  CHECK(rig.quiescence().ok);
}

TEST_CASE("an uncontended writer takes the counters and restores them") {
  Rig rig(4, 2, {2}, {4, 4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                        &rig.monitor);
  solo(rig, lock, 3, [&](locks::RmarwLock::Handle& h) {
    h.acquire_write();
    CHECK(h.holds_write());
    CHECK(h.entered_level() == 1);
    // Both counters sit in write mode while the writer is inside.
    CHECK(rig.window.peek(1, rig.layout.arrive()) == kWriteSentinel);
    CHECK(rig.window.peek(3, rig.layout.arrive()) == kWriteSentinel);
    h.release_write();
  });
  CHECK(rig.window.peek(1, rig.layout.arrive()) == 0);
  CHECK(rig.window.peek(3, rig.layout.arrive()) == 0);
  CHECK(rig.quiescence().ok);
}

TEST_CASE("writers block entering readers and drain active ones") {
  Rig rig(2, 1, {}, {4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                        &rig.monitor);
  std::atomic<int> stage{0};
  sim::Executor::run(2, rig.exec(sim::Mode::concurrent, 1), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    if (ctx.rank() == 1) {
      h.acquire_read();
      stage = 1;
      // Hold the read lock until the writer has switched the counter to
      // write mode, which pins it inside its drain until we leave.
      while (rig.window.peek(1, rig.layout.arrive()) < kWriteSentinel)
        std::this_thread::yield();
      stage = 3;
      h.release_read();
    } else {
      while (stage.load() < 1) std::this_thread::yield();
      h.acquire_write();
      // The writer can only be here after the reader released.
      CHECK(stage.load() == 3);
      h.release_write();
    }
  });
  CHECK(verify::audit_mutual_exclusion(rig.monitor.log().snapshot()).ok);
  CHECK(rig.quiescence().ok);
}

TEST_CASE("a backed-off reader neither blocks the drain nor sneaks in") {
  Rig rig(2, 1, {}, {4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                        &rig.monitor);
  std::atomic<int> stage{0};
  sim::Executor::run(2, rig.exec(sim::Mode::concurrent, 1), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    if (ctx.rank() == 1) {
      h.acquire_write();
      stage = 1;
      // Dwell so the reader arrives, over-increments against the sentinel
      // and backs off while we hold. The counter bookkeeping this exercises
      // is verified by the quiescence fold below.
      std::this_thread::sleep_for(std::chrono::milliseconds(30));
      h.release_write();
    } else {
      while (stage.load() < 1) std::this_thread::yield();
      h.acquire_read();  // backs off against the sentinel, enters after release
      h.release_read();
    }
  });
  CHECK(verify::audit_mutual_exclusion(rig.monitor.log().snapshot()).ok);
  CHECK(rig.quiescence().ok);
}

TEST_CASE("writer handoff below the threshold carries the run count") {
  Rig rig(4, 2, {2}, {4, 4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                        &rig.monitor);
  std::atomic<int> stage{0};
  sim::Executor::run(2, rig.exec(sim::Mode::concurrent, 1), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    if (ctx.rank() == 1) {
      h.acquire_write();
      stage = 1;
      while (stage.load() < 2) std::this_thread::yield();
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      h.release_write();
    } else {
      while (stage.load() < 1) std::this_thread::yield();
      stage = 2;
      h.acquire_write();
      CHECK(h.entered_level() == 2);  // passed inside the shared leaf element
      CHECK(h.entry_count() == 2);
      h.release_write();
    }
  });
  CHECK(verify::audit_mutual_exclusion(rig.monitor.log().snapshot()).ok);
  CHECK(rig.quiescence().ok);
}

TEST_CASE("the writer batch bound hands the lock to the readers") {
  // T_W = 1: every writer release must reset the counters before the next
  // writer can enter, so writer entries and counter resets alternate.
  Rig rig(2, 1, {}, {1}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                        &rig.monitor);
  sim::Executor::run(2, rig.exec(sim::Mode::lockstep, 5), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    for (int i = 0; i < 10; ++i) {
      h.acquire_write();
      h.release_write();
    }
  });
  auto events = rig.monitor.log().snapshot();
  verify::ThresholdAuditConfig cfg;
  cfg.writer_batch = 1;
  CHECK(verify::audit_thresholds(events, cfg).ok);
  int mode_changes = 0;
  for (const auto& e : events)
    mode_changes += e.kind == verify::EventKind::mode_change;
  CHECK(mode_changes > 0);  // writers kept re-taking the lock from the readers
  CHECK(rig.quiescence().ok);
}

TEST_CASE("mixed stress passes every auditor") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Rig rig(16, 2, {2}, {4, 4}, 8, 8, false);
    locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                          &rig.monitor);
    auto roles = topo::WorkloadSpec{0.25}.roles(16, seed);
    auto mode = seed % 2 ? sim::Mode::lockstep : sim::Mode::concurrent;
    sim::Executor::run(16, rig.exec(mode, seed), [&](sim::Context& ctx) {
      auto h = lock.handle(ctx);
      for (int i = 0; i < 30; ++i) {
        if (roles[ctx.rank()] == topo::Role::writer) {
          h.acquire_write();
          h.release_write();
        } else {
          h.acquire_read();
          h.release_read();
        }
      }
    });
    auto events = rig.monitor.log().snapshot();
    CHECK(verify::audit_mutual_exclusion(events).ok);
    if (mode == sim::Mode::lockstep) {
      verify::ThresholdAuditConfig cfg;
      cfg.writer_batch = rig.params.writer_batch();
      cfg.reader_batch = rig.params.reader_batch();
      cfg.topo = &rig.topo;
      cfg.params = &rig.params;
      CHECK(verify::audit_thresholds(events, cfg).ok);
    }
    CHECK(rig.quiescence().ok);
  }
}

TEST_CASE("a flat machine still works as one queue plus the counters") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rig rig(8, 1, {}, {4}, 4, 4, false);
    locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params,
                          &rig.monitor);
    auto roles = topo::WorkloadSpec{0.5}.roles(8, seed);
    sim::Executor::run(8, rig.exec(sim::Mode::lockstep, seed), [&](sim::Context& ctx) {
      auto h = lock.handle(ctx);
      for (int i = 0; i < 25; ++i) {
        if (roles[ctx.rank()] == topo::Role::writer) {
          h.acquire_write();
          h.release_write();
        } else {
          h.acquire_read();
          h.release_read();
        }
      }
    });
    auto events = rig.monitor.log().snapshot();
    CHECK(verify::audit_mutual_exclusion(events).ok);
    verify::ThresholdAuditConfig cfg;
    cfg.writer_batch = rig.params.writer_batch();
    cfg.reader_batch = rig.params.reader_batch();
    CHECK(verify::audit_thresholds(events, cfg).ok);
    CHECK(rig.quiescence().ok);
  }
}

TEST_CASE("holding both sides at once is rejected") {
  Rig rig(2, 1, {}, {4}, 8, 2);
  locks::RmarwLock lock(rig.window, rig.topo, rig.counters, rig.layout, rig.params);
  solo(rig, lock, 1, [&](locks::RmarwLock::Handle& h) {
    h.acquire_read();
    CHECK_THROWS_AS(h.acquire_write(), ProtocolViolation);
    CHECK_THROWS_AS(h.acquire_read(), ProtocolViolation);
    CHECK_THROWS_AS(h.release_write(), ProtocolViolation);
    h.release_read();
    CHECK_THROWS_AS(h.release_read(), ProtocolViolation);
  });
}
