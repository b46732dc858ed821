#pragma once

// Fingerprint buckets standing in for residual-representation classes, their
// twist-merged quotient, and the empirical counts M_hat(X), F_hat(X).

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gl2census/classify.hpp"

namespace gl2census {

/// Fewest mutually-good probe primes on which two fingerprints may be identified.
inline constexpr std::size_t kMinCommonGood = 10;

struct RepClassBucket {
    /// Union of the members' fingerprints: the residue where some member is
    /// good, kBadResidue where every member is bad.
    std::vector<std::int16_t> key;
    std::vector<std::pair<std::int64_t, std::int64_t>> members;
    ExponentLedger min_serre_level;
    ExponentLedger min_disc_bound;
    bool exact_flag = true;  // every member has serre_level_exact_away_23
};

/// Result of comparing two residue vectors on their mutually-good positions.
struct FingerprintComparison {
    std::size_t common_good = 0;
    bool conflict = false;  // differ at some mutually-good position
};
FingerprintComparison compare_fingerprints(const std::vector<std::int16_t>& a, const std::vector<std::int16_t>& b);

struct BucketPartition {
    std::vector<RepClassBucket> buckets;
    /// Curves left out: fewer than kMinCommonGood shared good primes with a
    /// conflict-free bucket, or compatible with more than one bucket.
    std::vector<std::pair<std::int64_t, std::int64_t>> dropped;
};

/// Buckets the members of S_ell. Curves are processed in (A, B) order, so the
/// result does not depend on the input order. Throws std::invalid_argument
/// for a curve outside S_ell or missing classification data.
BucketPartition bucket(std::vector<ClassifiedCurve> curves, std::uint32_t ell);

/// Position of a (bucket, bucket) pair where keys are both good and differ,
/// or -1 when there is none.
std::ptrdiff_t separating_position(const RepClassBucket& a, const RepClassBucket& b);

/// True iff b(p) = (p mod ell)^k a(p) on every mutually-good position, of
/// which there are at least kMinCommonGood.
bool twist_related(const std::vector<std::int16_t>& a, const std::vector<std::int16_t>& b,
                   const std::vector<std::uint32_t>& window, std::uint32_t ell, std::uint32_t k);

struct MergedBucket {
    std::vector<std::size_t> parts;  // indices into the bucket list, ascending
    ExponentLedger min_disc_bound;
};

/// Union-find quotient of the buckets under det-power twists
/// (k in 0..ell-2), in order of first part.
std::vector<MergedBucket> merge_under_twists(const std::vector<RepClassBucket>& buckets,
                                             const std::vector<std::uint32_t>& window, std::uint32_t ell);

/// A census cutoff: an integer written as a product of factors `n` or `b^e`,
/// e.g. "496" or "6^3264*5^960*2^2304". Keeps its original spelling.
struct Cutoff {
    std::string label;
    BigInt value;
    static Cutoff parse(std::string_view text);
};

struct CensusRow {
    Cutoff cutoff;
    std::uint64_t M_hat = 0;
    std::uint64_t F_hat = 0;
    long double theory_M = 0;  // X^{1/12} / log X
    long double theory_F = 0;  // X^{ell / (12 (ell-1) #GL2)} / log X
};

struct CensusReport {
    std::uint32_t ell = 0;
    std::vector<CensusRow> rows;
    std::size_t n_curves = 0;   // members of S_ell considered
    std::size_t n_dropped = 0;  // curves left out of every bucket
    std::size_t n_buckets = 0;
    std::size_t n_merged = 0;
    std::size_t max_orbit = 0;  // most buckets in one merged bucket
};

/// The height a store must reach for a level cutoff (Y1) and a discriminant
/// cutoff (Y2).
double required_height_level(const Cutoff& X, std::uint32_t ell, std::uint64_t c_ell_exponent);
double required_height_disc(const Cutoff& X, std::uint32_t ell, std::uint64_t c_ell_exponent);

class UnderpopulatedError : public std::runtime_error {
public:
    UnderpopulatedError(const std::string& cutoff, double required, double available);
    double required() const { return required_; }

private:
    double required_;
};

struct CensusInput {
    std::uint32_t ell = 5;
    std::uint64_t c_ell_exponent = 960;
    std::uint32_t window_bound = 200;
    double store_height = 0;
    std::vector<Cutoff> level_grid;  // needs store height >= max(Y1, Y2)
    std::vector<Cutoff> disc_grid;   // needs store height >= Y2
};

/// Buckets the S_ell members of `curves`, merges twists and counts M_hat and
/// F_hat at every cutoff of both grids (ascending, duplicates collapsed).
/// Throws UnderpopulatedError when the store height is too small for a cutoff
/// and std::logic_error if two buckets fail the distinctness check.
CensusReport census(const std::vector<ClassifiedCurve>& curves, const CensusInput& input);

long double theory_M(const BigInt& X);
long double theory_F(const BigInt& X, std::uint32_t ell);

void write_census_csv(std::ostream& out, const CensusReport& report, const std::string& header_comment);
void write_density_csv(std::ostream& out, const std::vector<DensityRow>& rows, const std::string& header_comment);

}  // namespace gl2census
