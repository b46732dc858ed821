#pragma once

// Integer and modular-arithmetic primitives shared by the whole pipeline.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace gl2census {

using i128 = __int128;
using u128 = unsigned __int128;
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// All primes up to `bound`, ascending.
struct PrimeTable {
    std::uint64_t bound = 0;
    std::vector<std::uint32_t> primes;

    bool contains(std::uint64_t n) const;
};

/// Sieve of Eratosthenes. Throws std::invalid_argument for bound < 2.
PrimeTable sieve_primes(std::uint64_t bound);

/// Largest k with p^k | n. Throws std::invalid_argument for n == 0 or p < 2.
unsigned valuation(i128 n, std::uint64_t p);
unsigned valuation(const BigInt& n, std::uint64_t p);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

/// Legendre symbol (a/p) for an odd prime p, computed by quadratic reciprocity.
int legendre(std::int64_t a, std::uint64_t p);

/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Prime factorisation of |n| as ascending (prime, exponent) pairs.
/// Trial division by small primes, then Pollard rho on the cofactor.
/// Throws std::overflow_error if a cofactor above 2^64 survives trial division.
std::vector<std::pair<std::uint64_t, unsigned>> factor(i128 n);

/// |n| stripped of every factor 2 and 3.
std::uint64_t strip_2_3(std::uint64_t n);

std::string to_string(i128 n);
i128 parse_i128(std::string_view text);

/// Natural log of a positive big integer (no overflow for huge values).
double log_of(const BigInt& n);

struct ZetaConstants {
    double zeta10 = 0;
    double zeta2 = 0;
    double c_density = 0;     // 4 / zeta(10)
    double c_semistable = 0;  // zeta(10) / zeta(2)
};

/// zeta(s) for integer s >= 2 to `digits` correct decimal digits (digits <= 30).
/// The partial sum runs to N - 1, the tail is N^{1-s}/(s-1) + N^{-s}/2 plus
/// Euler-Maclaurin corrections, and the returned remainder bound dominates the
/// truncation error.
struct ZetaValue {
    HighPrecision value;
    HighPrecision error_bound;
};
ZetaValue zeta_series(unsigned s, int digits);

ZetaConstants zeta_constants(int digits);

}  // namespace gl2census
