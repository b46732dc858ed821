#pragma once

// Pair statistics pi_{E1,E2}(X, t1, t2, d, ell), the Dirichlet baseline
// pi(X, d, ell), the product-Chebotarev model for delta and the
// mean-square deviation experiment.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gl2census/curves.hpp"

namespace gl2census {

struct PairStatConfig {
    std::uint32_t ell = 5;
    std::uint32_t t1 = 0;
    std::uint32_t t2 = 0;
    std::uint32_t d = 1;
    std::uint64_t prime_bound = 100;  // X: primes p <= X
    double curve_height = 1;          // pairs range over C(curve_height)^2

    /// Throws std::invalid_argument for ell < 5, d = 0 mod ell, t1 or t2 >= ell, X < 2.
    void validate() const;
};

/// #{p <= X prime : p = d mod ell}. Throws std::invalid_argument for d = 0 mod ell.
std::uint64_t dirichlet_pi(std::uint64_t X, std::uint32_t d, std::uint32_t ell);

/// #{p <= X prime : p does not divide Delta(E1) Delta(E2), p = d mod ell,
/// a_p(E1) = t1 and a_p(E2) = t2 mod ell}.
std::uint64_t pair_pi(const CurveRecord& E1, const CurveRecord& E2, const PairStatConfig& cfg);

/// N(t1, d) N(t2, d) / (ell^3 - ell)^2. Requires ell <= 13.
BigRational delta_model(std::uint32_t ell, std::uint32_t t1, std::uint32_t t2, std::uint32_t d);

class PairBudgetError : public std::runtime_error {
public:
    explicit PairBudgetError(std::uint64_t pairs);
    std::uint64_t pairs() const { return pairs_; }

private:
    std::uint64_t pairs_;
};

inline constexpr std::uint64_t kPairBudget = 10000000;

struct MeanSquareResult {
    BigRational exact;         // mean of (pi_{E1,E2} - delta pi(X, d, ell))^2
    double statistic = 0;      // exact, rounded
    double normalized = 0;     // statistic / X
    std::uint64_t n_pairs = 0;
    std::uint64_t n_curves = 0;
};

/// Rejects a family C(curve_height) too large for the pair budget before any
/// enumeration: PairBudgetError for the full pair sweep, std::invalid_argument
/// when even a sampled sweep would hold more than kPairBudget curves.
void check_pair_budget(double curve_height, std::optional<std::uint64_t> sample_pairs);

/// Mean over all ordered pairs of C(curve_height), or over `sample_pairs`
/// ordered pairs drawn uniformly with the given seed. Throws PairBudgetError
/// when the number of pairs exceeds kPairBudget.
MeanSquareResult mean_square_statistic(const PairStatConfig& cfg, std::optional<std::uint64_t> sample_pairs = std::nullopt,
                                       std::uint64_t seed = 0);

/// Same statistic over an explicit curve list.
MeanSquareResult mean_square_statistic(const std::vector<CurveRecord>& curves, const PairStatConfig& cfg,
                                       std::optional<std::uint64_t> sample_pairs = std::nullopt, std::uint64_t seed = 0);

void write_sieve_csv_header(std::ostream& out);
void write_sieve_csv_row(std::ostream& out, const PairStatConfig& cfg, const MeanSquareResult& r);

}  // namespace gl2census
