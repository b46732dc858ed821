#include "gl2census/curves.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gl2census {

namespace {

const std::vector<std::uint32_t>& primes_to_10k() {
    static const std::vector<std::uint32_t> primes = sieve_primes(10000).primes;
    return primes;
}

std::int64_t floor_power(double X, unsigned k) {
    BigRational x(X);
    BigRational power = 1;
    for (unsigned i = 0; i < k; ++i) power *= x;
    const BigInt q = numerator(power) / denominator(power);
    return q.convert_to<std::int64_t>();
}

std::int64_t ipow(std::int64_t base, unsigned k) {
    std::int64_t r = 1;
    for (unsigned i = 0; i < k; ++i) r *= base;
    return r;
}

// Primes p with p^4 | A. For A = 0 every prime qualifies; we return those
// with p^6 <= b_max, the only ones that can divide some nonzero B in range.
std::vector<std::int64_t> quartic_primes(std::int64_t A, std::int64_t b_max) {
    std::vector<std::int64_t> out;
    if (A == 0) {
        for (std::uint32_t p : primes_to_10k()) {
            if (ipow(p, 6) > b_max) break;
            out.push_back(p);
        }
        return out;
    }
    const std::int64_t a = std::llabs(A);
    for (std::uint32_t p : primes_to_10k()) {
        const std::int64_t p4 = ipow(p, 4);
        if (p4 > a) break;
        if (a % p4 == 0) out.push_back(p);
    }
    return out;
}

bool minimal_given(std::int64_t B, const std::vector<std::int64_t>& quartic) {
    for (std::int64_t p : quartic) {
        if (B % ipow(p, 6) == 0) return false;
    }
    return true;
}

// Number of nonzero B in [-b_max, b_max] divisible by no p^6, p in primes.
std::uint64_t count_nonzero_free(const std::vector<std::int64_t>& primes, std::int64_t b_max) {
    // Signed sum over squarefree products d of the listed primes with d^6 <= b_max.
    std::int64_t total = 0;
    const std::size_t n = primes.size();
    std::function<void(std::size_t, std::int64_t, int)> walk = [&](std::size_t from, std::int64_t d6, int sign) {
        total += sign * 2 * (b_max / d6);
        for (std::size_t i = from; i < n; ++i) {
            const std::int64_t p6 = ipow(primes[i], 6);
            if (d6 > b_max / p6) break;
            walk(i + 1, d6 * p6, -sign);
        }
    };
    walk(0, 1, 1);
    return static_cast<std::uint64_t>(total);
}

}  // namespace

CurveRecord CurveRecord::make(std::int64_t A, std::int64_t B) {
    CurveRecord E;
    E.A = A;
    E.B = B;
    const i128 a = A, b = B;
    E.delta = -16 * (4 * a * a * a + 27 * b * b);
    if (E.delta == 0) throw std::invalid_argument("CurveRecord: singular curve (delta = 0)");
    const i128 a3 = (a < 0 ? -a : a) * a * a;
    const i128 b2 = b * b;
    E.height = a3 > b2 ? a3 : b2;
    E.c4 = -48 * a;
    return E;
}

HeightBox height_box(double X) {
    if (!(X >= 1)) throw std::invalid_argument("height bound must satisfy X ≥ 1");
    if (X > kMaxHeight) throw std::invalid_argument("height bound X exceeds supported maximum");
    return {floor_power(X, 2), floor_power(X, 3)};
}

bool is_minimal_pair(std::int64_t A, std::int64_t B) {
    const std::uint64_t g = std::gcd(static_cast<std::uint64_t>(std::llabs(A)), static_cast<std::uint64_t>(std::llabs(B)));
    if (g == 0) return false;
    if (g == 1) return true;
    for (std::uint32_t p : primes_to_10k()) {
        const std::uint64_t p4 = static_cast<std::uint64_t>(ipow(p, 4));
        if (p4 > g) return true;
        if (A % static_cast<std::int64_t>(p4) == 0 && B % ipow(p, 6) == 0) return false;
    }
    // p > 10^4 would need p^4 | g with g <= 10^15; ruled out by kMaxHeight.
    return true;
}

void enumerate_curves_rows(double X, std::int64_t a_lo, std::int64_t a_hi,
                           const std::function<void(const CurveRecord&)>& sink) {
    const HeightBox box = height_box(X);
    a_lo = std::max(a_lo, -box.a_max);
    a_hi = std::min(a_hi, box.a_max);
    for (std::int64_t A = a_lo; A <= a_hi; ++A) {
        const std::vector<std::int64_t> quartic = quartic_primes(A, box.b_max);
        const bool row_free = A != 0 && quartic.empty();
        for (std::int64_t B = -box.b_max; B <= box.b_max; ++B) {
            if (A == 0 && B == 0) continue;
            if (!row_free && !minimal_given(B, quartic)) continue;
            const i128 a = A, b = B;
            if (4 * a * a * a + 27 * b * b == 0) continue;
            sink(CurveRecord::make(A, B));
        }
    }
}

void enumerate_curves(double X, const std::function<void(const CurveRecord&)>& sink) {
    const HeightBox box = height_box(X);
    enumerate_curves_rows(X, -box.a_max, box.a_max, sink);
}

std::uint64_t count_curves(double X) {
    const HeightBox box = height_box(X);
    std::uint64_t total = 0;
    for (std::int64_t A = -box.a_max; A <= box.a_max; ++A) {
        const std::vector<std::int64_t> quartic = quartic_primes(A, box.b_max);
        total += count_nonzero_free(quartic, box.b_max);
        if (A != 0 && quartic.empty()) ++total;  // B = 0
        if (A < 0 && (-A) % 3 == 0) {
            const std::int64_t k2 = -A / 3;
            const auto k = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(k2))));
            if (k * k == k2) {
                const std::int64_t b = 2 * k * k * k;
                if (b <= box.b_max && minimal_given(b, quartic)) total -= 2;  // B = +-2k^3
            }
        }
    }
    return total;
}

LocalData local_data(const CurveRecord& E, std::uint64_t p) {
    LocalData ld;
    ld.p = p;
    const i128 q = static_cast<i128>(p);
    ld.vDelta = E.delta % q == 0 ? valuation(E.delta, p) : 0;
    if (E.c4 != 0) {
        ld.vJnum = 3 * static_cast<int>(E.c4 % q == 0 ? valuation(E.c4, p) : 0) - static_cast<int>(ld.vDelta);
    }
    if (p == 2 || p == 3) {
        const TateResult t = tate(WeierstrassModel::short_form(E.A, E.B), p);
        ld.reduction = t.reduction;
        ld.cond_exp_bound = t.conductor_exponent;
        ld.vDeltaMin = t.min_disc_valuation;
        return ld;
    }
    ld.vDeltaMin = ld.vDelta;
    if (ld.vDelta == 0) {
        ld.reduction = Reduction::Good;
        ld.cond_exp_bound = 0;
    } else if (E.A % static_cast<std::int64_t>(p) == 0 && E.B % static_cast<std::int64_t>(p) == 0) {
        ld.reduction = Reduction::Additive;
        ld.cond_exp_bound = 2;
    } else {
        ld.reduction = Reduction::Multiplicative;
        ld.cond_exp_bound = 1;
    }
    return ld;
}

bool is_semistable_away_23(std::int64_t A, std::int64_t B) {
    const std::uint64_t g = std::gcd(static_cast<std::uint64_t>(std::llabs(A)), static_cast<std::uint64_t>(std::llabs(B)));
    if (g == 0) return false;
    return strip_2_3(g) == 1;
}

}  // namespace gl2census
