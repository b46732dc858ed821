#pragma once

// Frobenius traces, mod-ell trace fingerprints and a sound surjectivity
// certificate for the mod-ell Galois representation.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gl2census/curves.hpp"

namespace gl2census {

/// Quadratic-character tables for every odd prime up to `bound`, so that a
/// trace costs one table lookup per residue class.
class TraceTable {
public:
    explicit TraceTable(std::uint32_t bound);

    std::uint32_t bound() const { return bound_; }

    /// a_p = -sum_x chi(x^3 + A x + B) for an odd prime p <= bound, p not dividing Delta.
    std::int64_t trace(std::int64_t A, std::int64_t B, std::uint32_t p) const;

private:
    std::uint32_t bound_;
    std::vector<std::vector<std::int8_t>> chi_;  // indexed by p; empty for composites
};

/// Shared table covering p <= 10^4, built on first use.
const TraceTable& default_trace_table();

/// a_p for any odd prime p of good reduction (table lookup when possible,
/// Legendre-symbol sum otherwise). Checks the Hasse bound.
std::int64_t trace_of_frobenius(std::int64_t A, std::int64_t B, std::uint32_t p);

struct FrobeniusSample {
    std::uint32_t p = 0;
    std::int64_t a_p = 0;
    std::uint32_t t = 0;  // a_p mod ell
    std::uint32_t d = 0;  // p mod ell

    friend bool operator==(const FrobeniusSample&, const FrobeniusSample&) = default;
};

FrobeniusSample make_sample(std::uint32_t p, std::int64_t a_p, std::uint32_t ell);

/// Point count at a good prime p >= 5, p != ell. Throws std::invalid_argument
/// when p < 5, p == ell or p | Delta.
FrobeniusSample point_count(std::int64_t A, std::int64_t B, std::uint32_t p, std::uint32_t ell);

inline constexpr std::int16_t kBadResidue = -1;

/// Primes in [5, bound] other than ell, shared between fingerprints.
std::shared_ptr<const std::vector<std::uint32_t>> probe_window(std::uint32_t ell, std::uint32_t bound);

struct Fingerprint {
    std::uint32_t ell = 0;
    std::shared_ptr<const std::vector<std::uint32_t>> window;
    std::vector<std::int16_t> values;  // a_p mod ell, or kBadResidue where p | Delta

    std::size_t size() const { return values.size(); }
    bool good_at(std::size_t i) const { return values[i] != kBadResidue; }
};

Fingerprint fingerprint(const CurveRecord& E, std::uint32_t ell, std::uint32_t window_bound);

enum class Certification { CertifiedSurjective, NotCertified };

inline constexpr const char* kReasonWitnessMissing = "witness missing after probe bound";
inline constexpr const char* kReasonCmLike = "CM-like trace pattern";

struct SurjectivityVerdict {
    Certification status = Certification::NotCertified;
    /// Split, nonsplit and exceptional-excluding witnesses, in that order.
    std::optional<std::array<FrobeniusSample, 3>> witnesses;
    std::string reason;

    bool certified() const { return status == Certification::CertifiedSurjective; }
};

// Witness conditions on (t, d) = (tr, det) of a Frobenius image in GL2(F_ell).
bool is_split_witness(std::uint32_t t, std::uint32_t d, std::uint32_t ell);
bool is_nonsplit_witness(std::uint32_t t, std::uint32_t d, std::uint32_t ell);
bool is_exceptional_excluder(std::uint32_t t, std::uint32_t d, std::uint32_t ell);

/// Certified iff the good primes 5 <= p <= probe_bound, p != ell, contain a
/// split witness, a nonsplit witness and an exceptional-excluding witness,
/// and their p mod ell values generate (Z/ell)^*. Requires ell >= 5.
SurjectivityVerdict certify_surjective(const CurveRecord& E, std::uint32_t ell, std::uint32_t probe_bound);

/// Re-checks the stored witnesses (and their Frobenius data) of a certified verdict.
bool verify_witnesses(const SurjectivityVerdict& v, const CurveRecord& E, std::uint32_t ell);

/// #{g in GL2(F_ell) : tr g = t, det g = d} by enumerating all 2x2 matrices.
/// Memoised per ell. Throws std::invalid_argument for ell > 13 or d = 0 mod ell.
std::uint64_t trace_count_oracle(std::uint32_t ell, std::uint32_t t, std::uint32_t d);

}  // namespace gl2census
