#pragma once

#include <optional>
#include <string_view>

namespace ealign {

enum class Outcome {
  CompletedGlobal,  // reached tEnd inside the caps
  BlowupDetected,   // Lagrangian: some carried density exceeded the cap
  CapExceeded,      // Eulerian: ||rho||_inf > rhoCap or min G < gFloor
};

std::string_view to_string(Outcome outcome);

inline bool hit_cap(Outcome o) { return o != Outcome::CompletedGlobal; }

/// Time at which a density growing from v0 (at t0) to v1 (at t1) crosses cap,
/// interpolating 1/rho linearly in time. This is exact for Riccati growth
/// rho' = c rho^2. Falls back to t1 unless 0 < v0 < cap <= v1.
inline double crossing_time(double t0, double v0, double t1, double v1, double cap) {
  if (!(v0 > 0.0 && v0 < cap && cap <= v1) || !(v1 < 1e300)) return t1;
  const double s = (1.0 / v0 - 1.0 / cap) / (1.0 / v0 - 1.0 / v1);
  return t0 + s * (t1 - t0);
}

}  // namespace ealign
