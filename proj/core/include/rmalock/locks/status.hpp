#pragma once

#include <cstdint>

namespace rmalock::locks {

// Status-word encoding shared by every queue in the window. Special values
// are negative so pass counts (>= 1) stay naturally ordered; zero is both
// "fresh queue head" and the rest value of an idle cell.
inline constexpr std::int64_t kWait = -1;
inline constexpr std::int64_t kAcquireParent = -2;
inline constexpr std::int64_t kModeChange = -3;
inline constexpr std::int64_t kAcquireStart = 0;

// Folded into the reader arrival counter while a writer holds the lock.
// Power of two so setting and removing the write mode is bit-exact; reader
// counts never come near it.
inline constexpr std::int64_t kWriteSentinel = std::int64_t{1} << 62;

inline constexpr bool is_grant(std::int64_t status) { return status >= 0; }

}  // namespace rmalock::locks
