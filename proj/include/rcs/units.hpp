#pragma once

#include <cmath>
#include <cstdint>

namespace rcs {

// Simulation time is integer nanoseconds end to end; event ordering and
// busy-time accounting stay exact and platform-independent.
using TimeNs = std::int64_t;

inline constexpr TimeNs kNsPerSec = 1'000'000'000;

inline TimeNs seconds_to_ns(double s) { return static_cast<TimeNs>(std::llround(s * 1e9)); }
inline double ns_to_seconds(TimeNs t) { return static_cast<double>(t) * 1e-9; }

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Propagation convention of the simple path-loss model (not the CODATA value).
inline constexpr double kSpeedOfLightMps = 3.0e8;
inline constexpr double kGravityMps2 = 9.81;

}  // namespace rcs
