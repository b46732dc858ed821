#pragma once

// Serre levels, division-field discriminant exponents and the admission
// thresholds that turn curve heights into level / discriminant cutoffs.

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gl2census/curves.hpp"
#include "gl2census/galois.hpp"

namespace gl2census {

/// A positive integer kept in factored form prod p^e. Comparisons against
/// plain integers are exact: logarithms decide unless the two sides are
/// within one bit of each other, in which case the product is expanded.
class ExponentLedger {
public:
    ExponentLedger() = default;
    ExponentLedger(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> factors);

    /// Ledger of |n|, n != 0.
    static ExponentLedger of_integer(i128 n);

    void multiply(std::uint64_t p, std::uint64_t e);
    std::uint64_t exponent(std::uint64_t p) const;
    const std::map<std::uint64_t, std::uint64_t>& factors() const { return factors_; }
    bool is_one() const { return factors_.empty(); }

    BigInt value() const;
    double log() const;

    /// "2^4;31^1", or "1" for the empty product.
    std::string to_string() const;
    static ExponentLedger parse(std::string_view text);

    /// Every exponent of *this is <= the matching exponent of other.
    bool divides(const ExponentLedger& other) const;

    friend bool operator==(const ExponentLedger&, const ExponentLedger&) = default;

private:
    std::map<std::uint64_t, std::uint64_t> factors_;
};

/// Sign of (lhs - rhs), exact.
int compare(const ExponentLedger& lhs, const BigInt& rhs);
int compare(const ExponentLedger& lhs, const ExponentLedger& rhs);
inline bool leq(const ExponentLedger& lhs, const BigInt& rhs) { return compare(lhs, rhs) <= 0; }

/// Bound on m_ell(p) for additive reduction at p in {2, 3}: (3^2-1)(3^2-3) * 68.
inline constexpr std::uint64_t kAdditive23DiscExponent = 3264;

/// #GL2(F_ell) = (ell^2 - 1)(ell^2 - ell).
std::uint64_t gl2_order(std::uint64_t ell);

/// Default cap standing in for the exponent of ell in the division-field discriminant.
inline std::uint64_t default_c_ell_exponent(std::uint64_t ell) { return 2 * gl2_order(ell); }

struct MExponent {
    std::uint64_t value = 0;
    bool bound_only = false;  // value is an upper bound, not the exact exponent

    friend bool operator==(const MExponent&, const MExponent&) = default;
};

/// Exponent of p in the discriminant of the ell-division field of a curve
/// with surjective mod-ell image. Throws std::invalid_argument for additive
/// reduction at a prime p >= 5 other than ell.
MExponent m_exponent(const CurveRecord& E, std::uint64_t ell, std::uint64_t p, std::uint64_t c_ell_exponent);

struct LevelData {
    std::uint64_t ell = 0;
    ExponentLedger serre_level_upper;
    bool serre_level_exact_away_23 = true;
    ExponentLedger disc_bound;
    std::uint64_t c_ell_exponent = 0;

    friend bool operator==(const LevelData&, const LevelData&) = default;
};

/// Local data at 2, 3 and every prime dividing Delta, ascending by p.
std::vector<LocalData> relevant_local_data(const CurveRecord& E);

struct SerreLevel {
    ExponentLedger upper;
    bool exact_away_23 = true;
};

/// Throws std::invalid_argument unless E is semistable away from {2, 3} and
/// the verdict certifies surjectivity for ell.
SerreLevel serre_level(const CurveRecord& E, std::uint64_t ell, const SurjectivityVerdict& verdict);
ExponentLedger disc_bound(const CurveRecord& E, std::uint64_t ell, std::uint64_t c_ell_exponent,
                          const SurjectivityVerdict& verdict);
LevelData compute_levels(const CurveRecord& E, std::uint64_t ell, std::uint64_t c_ell_exponent,
                         const SurjectivityVerdict& verdict);

/// 6^3264 * ell^c * |Delta|^{((ell-1)/ell) #GL2(F_ell)}.
ExponentLedger blanket_disc_bound(const CurveRecord& E, std::uint64_t ell, std::uint64_t c_ell_exponent);

/// Ledger of |Delta(E)|.
ExponentLedger discriminant_ledger(const CurveRecord& E);

struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// (X / 496)^{1/6}.
double threshold_Y1(double X);
double threshold_Y1(const BigInt& X);

/// ell / (6 (ell-1) #GL2(F_ell)) in lowest terms.
Fraction y2_exponent(std::uint64_t ell);

/// (X / (6^3264 ell^c))^{y2_exponent(ell)}, evaluated in log space.
double threshold_Y2(const BigInt& X, std::uint64_t ell, std::uint64_t c_ell_exponent);
double threshold_Y2_from_log(double log_X, std::uint64_t ell, std::uint64_t c_ell_exponent);

/// Exact tests of Y1(X) <= height and Y2(X) <= height.
bool y1_within(const BigInt& X, double height);
bool y2_within(const BigInt& X, double height, std::uint64_t ell, std::uint64_t c_ell_exponent);

}  // namespace gl2census
