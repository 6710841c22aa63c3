#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rmalock {

// Process ranks are 1..P; 0 encodes the null rank in window cells.
using Rank = int;
using Offset = int;
using ElementId = std::int64_t;

inline constexpr std::int64_t kNullRank = 0;

// Bad construction parameters (zero sizes, non-divisible process counts, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Rank or offset outside the window.
struct AddressError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// API contract breach, e.g. reading a ticket value before the flush.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Lock protocol misuse or a detected safety breach (double release,
// mutual-exclusion violation caught by the live monitor, ...).
struct ProtocolViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Fixed-size structure ran out of room (hashtable overflow heap).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown inside simulated contexts when the run is being torn down
// (watchdog fired or a sibling context failed).
struct Aborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The run exceeded its watchdog budget without completing.
struct WatchdogExpired : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rmalock
