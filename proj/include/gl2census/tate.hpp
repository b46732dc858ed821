#pragma once

// Tate's algorithm on a general integral Weierstrass model
// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

#include <array>
#include <cstdint>
#include <string>

#include "gl2census/arith.hpp"

namespace gl2census {

enum class Reduction { Good, Multiplicative, Additive };

const char* to_string(Reduction r);

struct WeierstrassModel {
    std::array<BigInt, 5> a;  // a1, a2, a3, a4, a6

    static WeierstrassModel short_form(std::int64_t A, std::int64_t B);
    BigInt discriminant() const;
    BigInt c4() const;
};

struct TateResult {
    Reduction reduction = Reduction::Good;
    std::string kodaira;        // "I0", "I5", "II", "I1*", ...
    unsigned conductor_exponent = 0;
    unsigned min_disc_valuation = 0;  // v_p of the minimal discriminant
    unsigned components = 1;          // Kodaira component count m
};

/// Runs Tate's algorithm at p, minimalising the model along the way.
TateResult tate(const WeierstrassModel& model, std::uint64_t p);

}  // namespace gl2census
