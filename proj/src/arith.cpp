#include "gl2census/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

namespace gl2census {

bool PrimeTable::contains(std::uint64_t n) const {
    return std::binary_search(primes.begin(), primes.end(), n);
}

PrimeTable sieve_primes(std::uint64_t bound) {
    if (bound < 2) throw std::invalid_argument("sieve_primes: bound must be >= 2");
    std::vector<bool> composite(bound + 1, false);
    PrimeTable table;
    table.bound = bound;
    for (std::uint64_t i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        table.primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
    }
    return table;
}

unsigned valuation(i128 n, std::uint64_t p) {
    if (n == 0) throw std::invalid_argument("valuation: n must be nonzero");
    if (p < 2) throw std::invalid_argument("valuation: p must be prime");
    unsigned k = 0;
    const i128 q = static_cast<i128>(p);
    while (n % q == 0) {
        n /= q;
        ++k;
    }
    return k;
}

unsigned valuation(const BigInt& n, std::uint64_t p) {
    if (n == 0) throw std::invalid_argument("valuation: n must be nonzero");
    if (p < 2) throw std::invalid_argument("valuation: p must be prime");
    unsigned k = 0;
    BigInt m = n;
    BigInt q, r;
    const BigInt bp = p;
    for (;;) {
        boost::multiprecision::divide_qr(m, bp, q, r);
        if (r != 0) break;
        m = q;
        ++k;
    }
    return k;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    u128 result = 1 % mod;
    u128 b = base % mod;
    while (exp > 0) {
        if (exp & 1) result = result * b % mod;
        b = b * b % mod;
        exp >>= 1;
    }
    return static_cast<std::uint64_t>(result);
}

int legendre(std::int64_t a, std::uint64_t p) {
    std::int64_t r = a % static_cast<std::int64_t>(p);
    if (r < 0) r += static_cast<std::int64_t>(p);
    std::uint64_t x = static_cast<std::uint64_t>(r);
    std::uint64_t n = p;
    int sign = 1;
    // Jacobi symbol via reciprocity; equals the Legendre symbol for prime n.
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            const std::uint64_t m8 = n & 7;
            if (m8 == 3 || m8 == 5) sign = -sign;
        }
        std::swap(x, n);
        if ((x & 3) == 3 && (n & 3) == 3) sign = -sign;
        x %= n;
    }
    return n == 1 ? sign : 0;
}

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}


// a * b mod m for m < 2^127, by doubling so no intermediate overflows.
u128 mul_mod(u128 a, u128 b, u128 m) {
    a %= m;
    b %= m;
    u128 r = 0;
    while (b > 0) {
        if (b & 1) {
            r += a;
            if (r >= m) r -= m;
        }
        a <<= 1;
        if (a >= m) a -= m;
        b >>= 1;
    }
    return r;
}

u128 gcd_u128(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool is_prime_wide(u128 n) {
    if (!(n >> 64)) return is_prime(static_cast<std::uint64_t>(n));
    BigInt b = static_cast<std::uint64_t>(n >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(n);
    return boost::multiprecision::miller_rabin_test(b, 40);
}

template <typename U>
U pollard_brent(U n) {
    if (n % 2 == 0) return 2;
    for (U c = 1;; ++c) {
        U y = 2, x = 2, g = 1, q = 1, ys = 2;
        const U m = 128;
        U r = 1;
        auto f = [&](U v) { return (mul_mod(v, v, n) + c) % n; };
        auto gcd = [](U a, U b) {
            if constexpr (sizeof(U) > 8) {
                return gcd_u128(a, b);
            } else {
                return std::gcd(a, b);
            }
        };
        do {
            x = y;
            for (U i = 0; i < r; ++i) y = f(y);
            U k = 0;
            do {
                ys = y;
                for (U i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                g = gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_u64(std::uint64_t n, std::vector<std::uint64_t>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    const std::uint64_t d = pollard_brent<std::uint64_t>(n);
    factor_u64(d, out);
    factor_u64(n / d, out);
}

// Cofactors here have no prime factor below 2^16, so every prime factor fits in 64 bits.
void factor_wide(u128 n, std::vector<std::uint64_t>& out) {
    if (!(n >> 64)) {
        factor_u64(static_cast<std::uint64_t>(n), out);
        return;
    }
    if (is_prime_wide(n)) throw std::overflow_error("factor: prime factor exceeds 64 bits");
    const u128 d = pollard_brent<u128>(n);
    factor_wide(d, out);
    factor_wide(n / d, out);
}

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = sieve_primes(1u << 16).primes;
    return primes;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<std::pair<std::uint64_t, unsigned>> factor(i128 n) {
    if (n == 0) throw std::invalid_argument("factor: n must be nonzero");
    u128 m = n < 0 ? static_cast<u128>(-n) : static_cast<u128>(n);
    std::vector<std::pair<std::uint64_t, unsigned>> result;
    for (std::uint32_t p : small_primes()) {
        if (static_cast<u128>(p) * p > m) break;
        if (m % p != 0) continue;
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        result.emplace_back(p, e);
    }
    if (m == 1) return result;
    std::vector<std::uint64_t> rest;
    factor_wide(m, rest);
    std::sort(rest.begin(), rest.end());
    for (std::uint64_t p : rest) {
        if (!result.empty() && result.back().first == p) {
            ++result.back().second;
        } else {
            result.emplace_back(p, 1);
        }
    }
    return result;
}

std::uint64_t strip_2_3(std::uint64_t n) {
    if (n == 0) return 0;
    while (n % 2 == 0) n /= 2;
    while (n % 3 == 0) n /= 3;
    return n;
}

std::string to_string(i128 n) {
    if (n == 0) return "0";
    const bool negative = n < 0;
    u128 m = negative ? static_cast<u128>(-n) : static_cast<u128>(n);
    std::string digits;
    while (m > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(m % 10)));
        m /= 10;
    }
    if (negative) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

i128 parse_i128(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("parse_i128: empty");
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        i = 1;
    }
    if (i == text.size()) throw std::invalid_argument("parse_i128: no digits");
    u128 value = 0;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') throw std::invalid_argument("parse_i128: bad digit");
        const u128 next = value * 10 + static_cast<unsigned>(c - '0');
        if (next / 10 != value || (next >> 127)) throw std::out_of_range("parse_i128: overflow");
        value = next;
    }
    return negative ? -static_cast<i128>(value) : static_cast<i128>(value);
}

double log_of(const BigInt& n) {
    if (n <= 0) throw std::invalid_argument("log_of: n must be positive");
    const auto bits = boost::multiprecision::msb(n);
    if (bits < 60) return std::log(n.convert_to<double>());
    const unsigned shift = static_cast<unsigned>(bits) - 60;
    const BigInt top = n >> shift;
    return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

ZetaValue zeta_series(unsigned s, int digits) {
    if (s < 2) throw std::invalid_argument("zeta_series: s must be >= 2");
    if (digits < 1 || digits > 30) throw std::invalid_argument("zeta_series: digits must be in [1, 30]");
    using boost::multiprecision::pow;
    const HighPrecision target = pow(HighPrecision(10), -(digits + 2));
    const unsigned n_cut = 40;
    const HighPrecision hs = s;
    const HighPrecision big_n = n_cut;

    HighPrecision sum = 0;
    for (unsigned n = n_cut - 1; n >= 1; --n) sum += pow(HighPrecision(n), -hs);

    // Tail: integral term, half term, then Bernoulli corrections until the
    // next correction is below the target; the first omitted term bounds the
    // remainder for real s > 1.
    HighPrecision tail = pow(big_n, 1 - hs) / (hs - 1) + pow(big_n, -hs) / 2;
    HighPrecision rising = hs;  // s (s+1) ... (s+2k-2)
    HighPrecision factorial = 2;  // (2k)!
    HighPrecision bound = 0;
    for (unsigned k = 1; k <= 80; ++k) {
        if (k > 1) {
            rising *= (hs + 2 * k - 3) * (hs + 2 * k - 2);
            factorial *= HighPrecision(2 * k - 1) * (2 * k);
        }
        const HighPrecision term = boost::math::bernoulli_b2n<HighPrecision>(k) / factorial * rising *
                                   pow(big_n, -hs - 2 * k + 1);
        if (abs(term) < target) {
            bound = abs(term);
            break;
        }
        tail += term;
    }
    if (bound == 0) throw std::runtime_error("zeta_series: remainder did not converge");
    return {sum + tail, bound};
}

ZetaConstants zeta_constants(int digits) {
    const HighPrecision z10 = zeta_series(10, digits).value;
    const HighPrecision z2 = zeta_series(2, digits).value;
    ZetaConstants c;
    c.zeta10 = z10.convert_to<double>();
    c.zeta2 = z2.convert_to<double>();
    c.c_density = HighPrecision(4 / z10).convert_to<double>();
    c.c_semistable = HighPrecision(z10 / z2).convert_to<double>();
    return c;
}

}  // namespace gl2census
