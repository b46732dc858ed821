#include "gl2census/sieve.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <random>
#include <sstream>

#include "gl2census/galois.hpp"

namespace gl2census {

void PairStatConfig::validate() const {
    if (ell < 5 || !is_prime(ell)) throw std::invalid_argument("ell must be a prime >= 5");
    if (d % ell == 0) throw std::invalid_argument("d must be nonzero mod ell");
    if (d >= ell || t1 >= ell || t2 >= ell) throw std::invalid_argument("t1, t2 and d must be residues in [0, ell)");
    if (prime_bound < 2) throw std::invalid_argument("prime bound X must be >= 2");
}

namespace {

std::vector<std::uint32_t> primes_in_class(std::uint64_t X, std::uint32_t d, std::uint32_t ell) {
    std::vector<std::uint32_t> out;
    if (X < 2) return out;
    for (std::uint64_t p : sieve_primes(X).primes) {
        if (p % ell == d) out.push_back(static_cast<std::uint32_t>(p));
    }
    return out;
}

std::uint32_t trace_residue(const CurveRecord& E, std::uint32_t p, std::uint32_t ell) {
    std::int64_t r = trace_of_frobenius(E.A, E.B, p) % static_cast<std::int64_t>(ell);
    if (r < 0) r += ell;
    return static_cast<std::uint32_t>(r);
}

bool good_at(const CurveRecord& E, std::uint32_t p) { return E.delta % static_cast<i128>(p) != 0; }

// Per-curve bitsets over the primes of the class d: bit i of `first` is set
// when p_i is good and a_p = t1, of `second` when p_i is good and a_p = t2.
struct TraceBits {
    std::vector<std::uint64_t> first, second;
};

TraceBits trace_bits(const CurveRecord& E, const std::vector<std::uint32_t>& primes, const PairStatConfig& cfg) {
    const std::size_t words = (primes.size() + 63) / 64;
    TraceBits bits{std::vector<std::uint64_t>(words, 0), std::vector<std::uint64_t>(words, 0)};
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (!good_at(E, primes[i])) continue;
        const std::uint32_t t = trace_residue(E, primes[i], cfg.ell);
        if (t == cfg.t1) bits.first[i / 64] |= std::uint64_t{1} << (i % 64);
        if (t == cfg.t2) bits.second[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return bits;
}

std::uint64_t joint_count(const TraceBits& a, const TraceBits& b) {
    std::uint64_t n = 0;
    for (std::size_t w = 0; w < a.first.size(); ++w) n += std::popcount(a.first[w] & b.second[w]);
    return n;
}

}  // namespace

std::uint64_t dirichlet_pi(std::uint64_t X, std::uint32_t d, std::uint32_t ell) {
    if (ell < 2 || d % ell == 0) throw std::invalid_argument("dirichlet_pi: d must be nonzero mod ell");
    return primes_in_class(X, d % ell, ell).size();
}

std::uint64_t pair_pi(const CurveRecord& E1, const CurveRecord& E2, const PairStatConfig& cfg) {
    cfg.validate();
    std::uint64_t n = 0;
    for (std::uint32_t p : primes_in_class(cfg.prime_bound, cfg.d, cfg.ell)) {
        if (!good_at(E1, p) || !good_at(E2, p)) continue;
        if (trace_residue(E1, p, cfg.ell) == cfg.t1 && trace_residue(E2, p, cfg.ell) == cfg.t2) ++n;
    }
    return n;
}

BigRational delta_model(std::uint32_t ell, std::uint32_t t1, std::uint32_t t2, std::uint32_t d) {
    const std::uint64_t coset = static_cast<std::uint64_t>(ell) * ell * ell - ell;
    return BigRational(BigInt(trace_count_oracle(ell, t1, d) * trace_count_oracle(ell, t2, d)),
                       BigInt(coset) * BigInt(coset));
}

PairBudgetError::PairBudgetError(std::uint64_t pairs)
    : std::runtime_error("pair budget exceeded: " + std::to_string(pairs) + " ordered pairs (limit " +
                         std::to_string(kPairBudget) + ")"),
      pairs_(pairs) {}

void check_pair_budget(double curve_height, std::optional<std::uint64_t> sample_pairs) {
    const HeightBox box = height_box(curve_height);
    // At least half of the box survives the minimality and nonsingularity tests.
    const double box_size = (2.0 * box.a_max + 1) * (2.0 * box.b_max + 1);
    const double lower = box_size / 2;
    if (lower > static_cast<double>(kPairBudget)) {
        if (!sample_pairs) throw PairBudgetError(static_cast<std::uint64_t>(std::min(lower * lower, 1e19)));
        throw std::invalid_argument("curve family C(" + std::to_string(curve_height) + ") is too large to hold in memory");
    }
    if (sample_pairs) return;
    if (lower * lower > static_cast<double>(kPairBudget)) throw PairBudgetError(static_cast<std::uint64_t>(lower * lower));
    const std::uint64_t n = count_curves(curve_height);
    if (n > 0 && n > kPairBudget / n) throw PairBudgetError(n * n);
}

MeanSquareResult mean_square_statistic(const PairStatConfig& cfg, std::optional<std::uint64_t> sample_pairs,
                                       std::uint64_t seed) {
    cfg.validate();
    check_pair_budget(cfg.curve_height, sample_pairs);
    std::vector<CurveRecord> curves;
    enumerate_curves(cfg.curve_height, [&](const CurveRecord& E) { curves.push_back(E); });
    return mean_square_statistic(curves, cfg, sample_pairs, seed);
}

MeanSquareResult mean_square_statistic(const std::vector<CurveRecord>& curves, const PairStatConfig& cfg,
                                       std::optional<std::uint64_t> sample_pairs, std::uint64_t seed) {
    cfg.validate();
    const std::uint64_t n = curves.size();
    if (n == 0) throw std::invalid_argument("mean_square_statistic: empty curve family");
    const std::uint64_t total_pairs = sample_pairs ? *sample_pairs : n * n;
    if (total_pairs == 0) throw std::invalid_argument("mean_square_statistic: no pairs to sample");
    if (total_pairs > kPairBudget || (!sample_pairs && n > kPairBudget / n)) throw PairBudgetError(sample_pairs ? total_pairs : n * n);

    const std::vector<std::uint32_t> primes = primes_in_class(cfg.prime_bound, cfg.d, cfg.ell);
    std::vector<TraceBits> bits;
    bits.reserve(n);
    for (const CurveRecord& E : curves) bits.push_back(trace_bits(E, primes, cfg));

    const BigRational delta = delta_model(cfg.ell, cfg.t1, cfg.t2, cfg.d);
    // delta = a / b; each deviation is (pi b - a piD) / b.
    const std::int64_t a = numerator(delta).convert_to<std::int64_t>();
    const std::int64_t b = denominator(delta).convert_to<std::int64_t>();
    const std::int64_t a_piD = a * static_cast<std::int64_t>(primes.size());
    i128 sum = 0;
    auto accumulate = [&](std::size_t i, std::size_t j) {
        const i128 dev = static_cast<i128>(joint_count(bits[i], bits[j])) * b - a_piD;
        sum += dev * dev;
    };
    if (sample_pairs) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
        for (std::uint64_t k = 0; k < total_pairs; ++k) {
            const std::uint64_t i = pick(rng);
            const std::uint64_t j = pick(rng);
            accumulate(i, j);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) accumulate(i, j);
    }

    MeanSquareResult r;
    r.n_pairs = total_pairs;
    r.n_curves = n;
    BigInt s = static_cast<std::uint64_t>(sum >> 64);
    s <<= 64;
    s += static_cast<std::uint64_t>(sum);
    r.exact = BigRational(s, BigInt(b) * BigInt(b) * BigInt(total_pairs));
    r.statistic = r.exact.convert_to<double>();
    r.normalized = r.statistic / static_cast<double>(cfg.prime_bound);
    return r;
}

void write_sieve_csv_header(std::ostream& out) { out << "X,d,t1,t2,delta_model,statistic,normalized,n_pairs\n"; }

void write_sieve_csv_row(std::ostream& out, const PairStatConfig& cfg, const MeanSquareResult& r) {
    const BigRational delta = delta_model(cfg.ell, cfg.t1, cfg.t2, cfg.d);
    std::ostringstream row;
    row << std::setprecision(10) << cfg.prime_bound << ',' << cfg.d << ',' << cfg.t1 << ',' << cfg.t2 << ','
        << delta.convert_to<double>() << ',' << r.statistic << ',' << r.normalized << ',' << r.n_pairs << '\n';
    out << row.str();
}

}  // namespace gl2census
