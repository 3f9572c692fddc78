#pragma once

#include <string_view>

namespace hsv {

enum class Verdict { Certified, Falsified, Inconclusive };

constexpr std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Certified:
        return "Certified";
    case Verdict::Falsified:
        return "Falsified";
    case Verdict::Inconclusive:
        return "Inconclusive";
    }
    return "?";
}

} // namespace hsv
