#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerics.

#include "hsv/interval.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

using Q = boost::multiprecision::cpp_rational;

inline Q exact(double v)
{
    return Q(v);
}

/// Exact rational value of a decimal string such as "-0.0123" or "1.5e-3".
inline Q decimal(std::string_view s)
{
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    long long exp10 = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        exp10 = std::stoll(std::string(s.substr(e + 1)));
        s = s.substr(0, e);
    }
    boost::multiprecision::cpp_int digits = 0;
    bool after_point = false;
    for (char c : s) {
        if (c == '.') {
            after_point = true;
            continue;
        }
        digits = digits * 10 + (c - '0');
        if (after_point) {
            --exp10;
        }
    }
    Q v(digits);
    const boost::multiprecision::cpp_int ten = boost::multiprecision::pow(
        boost::multiprecision::cpp_int(10), static_cast<unsigned>(std::llabs(exp10)));
    v = exp10 >= 0 ? v * Q(ten) : v / Q(ten);
    return neg ? -v : v;
}

inline bool contains(const hsv::Interval& i, const Q& q)
{
    return exact(i.lo()) <= q && q <= exact(i.hi());
}

inline bool contains(const hsv::Box& b, const std::vector<Q>& p)
{
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!contains(b[i], p[i])) {
            return false;
        }
    }
    return true;
}

/// True when `i` contains the whole ball of relative radius 1e-38 around a
/// 40-digit reference value.
inline bool encloses_reference(const hsv::Interval& i, std::string_view ref)
{
    using boost::multiprecision::cpp_int;
    const Q q = decimal(ref);
    const Q eps = abs(q) / Q(boost::multiprecision::pow(cpp_int(10), 38)) +
                  Q(1) / Q(boost::multiprecision::pow(cpp_int(10), 66));
    return exact(i.lo()) <= q - eps && q + eps <= exact(i.hi());
}

/// One affine coordinate map v -> a v + b.
struct Affine {
    Q a;
    Q b;
};

/// The two horseshoe branches in exact arithmetic on the double constants
/// 1/3 and 2/3: strip 0 scales the expansion coordinate by 1/t and the others
/// by t; strip 1 reverses orientation with width w = 1 - s.
inline std::vector<Affine> horseshoe_branch(unsigned strip, std::size_t dims)
{
    const Q t = exact(1.0 / 3.0);
    const Q s = exact(2.0 / 3.0);
    const Q w = Q(1) - s;
    std::vector<Affine> out(dims);
    for (std::size_t i = 0; i < dims; ++i) {
        const bool expansion = i + 1 == dims;
        if (strip == 0) {
            out[i] = expansion ? Affine{Q(1) / t, Q(0)} : Affine{t, Q(0)};
        } else {
            out[i] = expansion ? Affine{-Q(1) / w, Q(1) + s / w} : Affine{-w, Q(1)};
        }
    }
    return out;
}

/// The periodic point with itinerary `word` (letters 0/1): the fixed point of
/// branch[w_{k-1}] o ... o branch[w_0], one coordinate at a time.
inline std::vector<Q> horseshoe_periodic_point(const std::vector<unsigned>& word, std::size_t dims)
{
    std::vector<Q> out(dims);
    for (std::size_t i = 0; i < dims; ++i) {
        Q a = 1;
        Q b = 0;
        for (unsigned letter : word) {
            const Affine f = horseshoe_branch(letter, dims)[i];
            a = f.a * a;
            b = f.a * b + f.b;
        }
        out[i] = b / (Q(1) - a);
    }
    return out;
}

inline std::vector<Q> apply_branch(unsigned strip, const std::vector<Q>& p)
{
    const auto f = horseshoe_branch(strip, p.size());
    std::vector<Q> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = f[i].a * p[i] + f[i].b;
    }
    return out;
}

/// Number of primitive necklaces of length n over m letters (Moebius sum).
inline std::uint64_t primitive_necklaces(unsigned m, unsigned n)
{
    auto mobius = [](unsigned d) {
        int result = 1;
        for (unsigned p = 2; p * p <= d; ++p) {
            if (d % p == 0) {
                d /= p;
                if (d % p == 0) {
                    return 0;
                }
                result = -result;
            }
        }
        return d > 1 ? -result : result;
    };
    std::int64_t total = 0;
    for (unsigned d = 1; d <= n; ++d) {
        if (n % d == 0) {
            std::int64_t pw = 1;
            for (unsigned j = 0; j < n / d; ++j) {
                pw *= m;
            }
            total += mobius(d) * pw;
        }
    }
    return static_cast<std::uint64_t>(total / n);
}

/// Number of necklaces (all rotation classes) of length n over m letters.
inline std::uint64_t necklaces(unsigned m, unsigned n)
{
    std::uint64_t total = 0;
    for (unsigned d = 1; d <= n; ++d) {
        if (n % d == 0) {
            total += primitive_necklaces(m, d);
        }
    }
    return total;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace oracle
