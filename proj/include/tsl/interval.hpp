#pragma once

#include <numbers>

namespace tsl {

inline constexpr double kPi = std::numbers::pi;

/// The problem lives on [-pi, pi] with the interface fixed at 0.
enum class Side { Left, Right };

inline constexpr double side_begin(Side side) { return side == Side::Left ? -kPi : 0.0; }
inline constexpr double side_end(Side side) { return side == Side::Left ? 0.0 : kPi; }

}  // namespace tsl
