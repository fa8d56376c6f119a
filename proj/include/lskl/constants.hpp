#pragma once

#include <numbers>

namespace lskl {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLogTwoPi = 1.83787706640934548356065947281123527;
inline constexpr double kLogTwoOverPi = -0.45158270528945486472619522989488215;

}  // namespace lskl
