#pragma once

namespace hsparse {

// Sample-size constant C calibrated with `hsparse bench --calibrate` on the
// reference suite (n = 64, m = 2000, D in {2, 4, 16}; n = 12 exhaustive
// cuts; epsilon = 0.5, 20 trials per group, master seed 1). See
// docs/calibration.md for the procedure and the recorded outcome.
inline constexpr double kCalibratedConstantC = 0.499053955078125;

}  // namespace hsparse
