#pragma once

// Exact decimal views of doubles: parsing checks and directed printing.

#include <string>
#include <string_view>

namespace hsv {

enum class RoundDir { down, up, nearest };

/// Decimal string of v with at most `digits` significant digits. `down`
/// never exceeds v, `up` is never below v.
std::string to_decimal(double v, RoundDir dir, int digits = 17);

/// True when the decimal literal denotes exactly the double v.
bool decimal_equals(std::string_view literal, double v);

} // namespace hsv
