#pragma once

// The height-ordered family of short Weierstrass curves y^2 = x^3 + Ax + B.

#include <cstdint>
#include <functional>
#include <optional>

#include "gl2census/arith.hpp"
#include "gl2census/tate.hpp"

namespace gl2census {

/// Largest supported height bound; keeps every discriminant inside 128 bits.
inline constexpr double kMaxHeight = 1e5;

struct CurveRecord {
    std::int64_t A = 0;
    std::int64_t B = 0;
    i128 delta = 0;   // -16 (4A^3 + 27B^2)
    i128 height = 0;  // max(|A|^3, B^2)
    i128 c4 = 0;      // -48A

    /// Builds the record; throws std::invalid_argument if the curve is singular.
    static CurveRecord make(std::int64_t A, std::int64_t B);

    auto key() const { return std::pair{A, B}; }
    friend bool operator==(const CurveRecord&, const CurveRecord&) = default;
};

struct LocalData {
    std::uint64_t p = 0;
    unsigned vDelta = 0;  // v_p of the model discriminant -16(4A^3+27B^2)
    /// v_p of the minimal discriminant at p. Equals vDelta for p >= 5; at
    /// p in {2,3} it comes from Tate's algorithm and may be smaller.
    unsigned vDeltaMin = 0;
    /// v_p(j) = 3 v_p(c4) - v_p(Delta). Empty when c4 = 0 (j = 0).
    std::optional<int> vJnum;
    Reduction reduction = Reduction::Good;
    unsigned cond_exp_bound = 0;
};

/// Integer box of C(X): |A| <= floor(X^2), |B| <= floor(X^3).
struct HeightBox {
    std::int64_t a_max = 0;
    std::int64_t b_max = 0;
};
HeightBox height_box(double X);

/// True iff no prime p has p^4 | A and p^6 | B.
bool is_minimal_pair(std::int64_t A, std::int64_t B);

/// Calls `sink` with every curve of C(X) in lexicographic (A, B) order.
/// Throws std::invalid_argument for X < 1 or X > kMaxHeight.
void enumerate_curves(double X, const std::function<void(const CurveRecord&)>& sink);

/// Same family restricted to A in [a_lo, a_hi]; used to split the box between workers.
void enumerate_curves_rows(double X, std::int64_t a_lo, std::int64_t a_hi,
                           const std::function<void(const CurveRecord&)>& sink);

/// #C(X) by a count-only pass: per row A, inclusion-exclusion over the primes
/// with p^4 | A, minus the singular pairs (-3k^2, +-2k^3).
std::uint64_t count_curves(double X);

LocalData local_data(const CurveRecord& E, std::uint64_t p);

/// No prime p >= 5 has additive reduction.
bool is_semistable_away_23(std::int64_t A, std::int64_t B);
inline bool is_semistable_away_23(const CurveRecord& E) { return is_semistable_away_23(E.A, E.B); }

}  // namespace gl2census
