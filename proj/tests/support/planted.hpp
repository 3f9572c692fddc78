#pragma once

// Random quadratic systems with a known zero. Every coefficient and the
// planted point are dyadic rationals, so F(z) = 0 holds exactly and the
// expression text is evaluated without rounding at z.

#include "hsv/dynsys.hpp"
#include "hsv/expr.hpp"

#include <random>
#include <string>
#include <vector>

namespace oracle {

struct PlantedSystem {
    hsv::MapSpec map;
    std::vector<double> zero;
    std::vector<std::string> text;
};

inline std::string dyadic_text(long long numerator, int log2_denominator)
{
    return "(" + std::to_string(numerator) + "/" + std::to_string(1LL << log2_denominator) + ")";
}

/// dims in 1..3; zero strictly inside [-1, 1]^dims on a 1/64 grid.
inline PlantedSystem planted_system(std::mt19937_64& rng, std::size_t dims)
{
    std::uniform_int_distribution<long long> coord(-56, 56);
    std::uniform_int_distribution<long long> coef(-16, 16);
    std::uniform_int_distribution<int> quadratic(0, 2);

    PlantedSystem sys{hsv::MapSpec::identity(dims), {}, {}};
    std::vector<std::string> shifted;
    hsv::ParseContext ctx;
    for (std::size_t j = 0; j < dims; ++j) {
        const long long z = coord(rng);
        sys.zero.push_back(static_cast<double>(z) / 64.0);
        ctx.variables.push_back("x" + std::to_string(j));
        shifted.push_back("(x" + std::to_string(j) + " - " + dyadic_text(z, 6) + ")");
    }
    std::vector<hsv::Expr> comps;
    for (std::size_t i = 0; i < dims; ++i) {
        std::string e;
        for (std::size_t j = 0; j < dims; ++j) {
            long long a = coef(rng);
            // Keep the linear part away from singular so most zeros certify.
            if (i == j) {
                a += a >= 0 ? 24 : -24;
            }
            e += (e.empty() ? "" : " + ") + dyadic_text(a, 3) + "*" + shifted[j];
        }
        for (std::size_t j = 0; j < dims; ++j) {
            for (std::size_t k = j; k < dims; ++k) {
                if (quadratic(rng) == 0) {
                    e += " + " + dyadic_text(coef(rng), 4) + "*" + shifted[j] + "*" + shifted[k];
                }
            }
        }
        sys.text.push_back(e);
        comps.push_back(hsv::parse_expression(e, ctx));
    }
    sys.map = hsv::MapSpec::expression(std::move(comps), ctx.variables);
    return sys;
}

} // namespace oracle
