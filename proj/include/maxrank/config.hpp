#pragma once

namespace maxrank {

// Numeric thresholds shared by every module. Values are absolute unless noted.
struct Tolerances {
  double ambient = 1e-10;  // chart(u) vs cached ambient coordinates
  double rank = 1e-8;      // smallest singular value of a Jacobian / differential
  double spd = 1e-9;       // smallest eigenvalue of a metric tensor
  double fiber = 1e-8;     // |pi(x) - b| in base ambient coordinates
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace maxrank
