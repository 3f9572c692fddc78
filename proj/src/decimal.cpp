#include "hsv/decimal.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hsv {

namespace {

// Normalized decimal: value = 0.d1d2d3... * 10^exp, d1 != 0, no trailing zeros.
struct Digits {
    bool negative = false;
    std::string d;
    int exp = 0;
};

void normalize(Digits& x)
{
    std::size_t lead = 0;
    while (lead < x.d.size() && x.d[lead] == '0') {
        ++lead;
    }
    x.d.erase(0, lead);
    x.exp -= static_cast<int>(lead);
    while (!x.d.empty() && x.d.back() == '0') {
        x.d.pop_back();
    }
    if (x.d.empty()) {
        x.exp = 0;
        x.negative = false;
    }
}

Digits exact_digits(double v)
{
    // 767 significant digits are enough for any double.
    std::array<char, 1100> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 770);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("to_chars failed");
    }
    const std::string_view s(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
    Digits x;
    std::size_t i = 0;
    if (s[i] == '-') {
        x.negative = true;
        ++i;
    }
    const auto e = s.find('e');
    for (; i < e; ++i) {
        if (s[i] != '.') {
            x.d.push_back(s[i]);
        }
    }
    int e10 = 0;
    std::from_chars(s.data() + e + 1 + (s[e + 1] == '+' ? 1 : 0), s.data() + s.size(), e10);
    x.exp = e10 + 1;
    normalize(x);
    return x;
}

bool parse_digits(std::string_view s, Digits& x)
{
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        x.negative = s[i] == '-';
        ++i;
    }
    int point = -1;
    int count = 0;
    bool any = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
        if (s[i] == '.') {
            if (point >= 0) {
                return false;
            }
            point = count;
        } else if (s[i] >= '0' && s[i] <= '9') {
            x.d.push_back(s[i]);
            ++count;
            any = true;
        } else {
            return false;
        }
    }
    if (!any) {
        return false;
    }
    int e10 = 0;
    if (i < s.size()) {
        ++i;
        if (i < s.size() && s[i] == '+') {
            ++i;
        }
        const auto r = std::from_chars(s.data() + i, s.data() + s.size(), e10);
        if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
            return false;
        }
    }
    x.exp = (point >= 0 ? point : count) + e10;
    normalize(x);
    return true;
}

std::string render(const Digits& x)
{
    if (x.d.empty()) {
        return "0";
    }
    std::string out = x.negative ? "-" : "";
    const int n = static_cast<int>(x.d.size());
    const int e = x.exp;
    if (e > 21 || e < -6) {
        out += x.d.substr(0, 1);
        if (n > 1) {
            out += "." + x.d.substr(1);
        }
        out += "e" + std::to_string(e - 1);
    } else if (e <= 0) {
        out += "0." + std::string(static_cast<std::size_t>(-e), '0') + x.d;
    } else if (e >= n) {
        out += x.d + std::string(static_cast<std::size_t>(e - n), '0');
    } else {
        out += x.d.substr(0, static_cast<std::size_t>(e)) + "." + x.d.substr(static_cast<std::size_t>(e));
    }
    return out;
}

// Adds one unit in the last place of a digit string; returns true on carry out.
bool increment(std::string& d)
{
    for (auto it = d.rbegin(); it != d.rend(); ++it) {
        if (*it == '9') {
            *it = '0';
        } else {
            ++*it;
            return false;
        }
    }
    d.insert(d.begin(), '1');
    return true;
}

} // namespace

std::string to_decimal(double v, RoundDir dir, int digits)
{
    if (!std::isfinite(v)) {
        throw std::invalid_argument("to_decimal needs a finite value");
    }
    Digits x = exact_digits(v);
    if (static_cast<int>(x.d.size()) <= digits) {
        return render(x);
    }
    const auto keep = static_cast<std::size_t>(digits);
    bool away = false;
    if (dir == RoundDir::nearest) {
        const std::string rest = x.d.substr(keep);
        away = rest[0] > '5' || (rest[0] == '5' && (rest.find_first_not_of('0', 1) != std::string::npos ||
                                                    ((x.d[keep - 1] - '0') % 2 == 1)));
    } else {
        // The dropped tail is nonzero here, so truncation moves toward zero.
        away = (dir == RoundDir::up) != x.negative;
    }
    x.d.resize(keep);
    if (away && increment(x.d)) {
        ++x.exp;
        x.d.pop_back();
    }
    normalize(x);
    return render(x);
}

bool decimal_equals(std::string_view literal, double v)
{
    Digits lit;
    if (!parse_digits(literal, lit) || !std::isfinite(v)) {
        return false;
    }
    const Digits ex = exact_digits(v);
    return lit.d == ex.d && lit.exp == ex.exp && lit.negative == ex.negative;
}

} // namespace hsv
