#include "gl2census/tate.hpp"

#include <stdexcept>

namespace gl2census {

const char* to_string(Reduction r) {
    switch (r) {
        case Reduction::Good: return "good";
        case Reduction::Multiplicative: return "multiplicative";
        case Reduction::Additive: return "additive";
    }
    return "?";
}

namespace {

struct Invariants {
    BigInt b2, b4, b6, b8, c4, c6, disc;
};

Invariants invariants(const std::array<BigInt, 5>& a) {
    const auto& [a1, a2, a3, a4, a6] = a;
    Invariants v;
    v.b2 = a1 * a1 + 4 * a2;
    v.b4 = a1 * a3 + 2 * a4;
    v.b6 = a3 * a3 + 4 * a6;
    v.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    v.c4 = v.b2 * v.b2 - 24 * v.b4;
    v.c6 = -v.b2 * v.b2 * v.b2 + 36 * v.b2 * v.b4 - 216 * v.b6;
    v.disc = -v.b2 * v.b2 * v.b8 - 8 * v.b4 * v.b4 * v.b4 - 27 * v.b6 * v.b6 + 9 * v.b2 * v.b4 * v.b6;
    return v;
}

// x = x' + r, y = y' + s x' + t
void rst_transform(std::array<BigInt, 5>& a, const BigInt& r, const BigInt& s, const BigInt& t) {
    const auto [a1, a2, a3, a4, a6] = a;
    a[0] = a1 + 2 * s;
    a[1] = a2 - s * a1 + 3 * r - s * s;
    a[2] = a3 + r * a1 + 2 * t;
    a[3] = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
    a[4] = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
}

constexpr unsigned kInfiniteValuation = 100000;

unsigned val(const BigInt& x, std::uint64_t p) {
    if (x == 0) return kInfiniteValuation;
    return valuation(x, p);
}

BigInt pmod(const BigInt& x, const BigInt& p) {
    BigInt r = x % p;
    if (r < 0) r += p;
    return r;
}

bool pdiv(const BigInt& x, const BigInt& p) { return x % p == 0; }

BigInt div_exact(const BigInt& x, const BigInt& d) {
    BigInt q, r;
    boost::multiprecision::divide_qr(x, d, q, r);
    if (r != 0) throw std::logic_error("tate: inexact division");
    return q;
}

BigInt inv_mod(const BigInt& x, const BigInt& p) {
    const std::uint64_t pu = p.convert_to<std::uint64_t>();
    const std::uint64_t xu = pmod(x, p).convert_to<std::uint64_t>();
    if (xu == 0) throw std::logic_error("tate: inverse of zero");
    return BigInt(pow_mod(xu, pu - 2, pu));
}

}  // namespace

WeierstrassModel WeierstrassModel::short_form(std::int64_t A, std::int64_t B) {
    return WeierstrassModel{{BigInt(0), BigInt(0), BigInt(0), BigInt(A), BigInt(B)}};
}

BigInt WeierstrassModel::discriminant() const { return invariants(a).disc; }
BigInt WeierstrassModel::c4() const { return invariants(a).c4; }

TateResult tate(const WeierstrassModel& model, std::uint64_t prime) {
    const BigInt p = prime;
    const BigInt p2 = p * p, p3 = p2 * p, p4 = p3 * p;
    std::array<BigInt, 5> a = model.a;
    if (invariants(a).disc == 0) throw std::invalid_argument("tate: singular model");

    for (;;) {
        Invariants v = invariants(a);
        const unsigned n = val(v.disc, prime);
        TateResult out;
        out.min_disc_valuation = n;
        if (n == 0) {
            out.reduction = Reduction::Good;
            out.kodaira = "I0";
            out.conductor_exponent = 0;
            out.components = 1;
            return out;
        }

        // Move the singular point of the reduction to (0, 0).
        BigInt r, t;
        if (prime <= 3) {
            bool found = false;
            for (std::uint64_t x0 = 0; x0 < prime && !found; ++x0) {
                for (std::uint64_t y0 = 0; y0 < prime && !found; ++y0) {
                    const BigInt x = x0, y = y0;
                    const BigInt f = y * y + a[0] * x * y + a[2] * y - x * x * x - a[1] * x * x - a[3] * x - a[4];
                    const BigInt fy = 2 * y + a[0] * x + a[2];
                    const BigInt fx = a[0] * y - 3 * x * x - 2 * a[1] * x - a[3];
                    if (pdiv(f, p) && pdiv(fx, p) && pdiv(fy, p)) {
                        r = x;
                        t = y;
                        found = true;
                    }
                }
            }
            if (!found) throw std::logic_error("tate: no singular point mod p");
        } else {
            const BigInt half = inv_mod(2, p);
            if (pdiv(v.c4, p)) {
                r = -inv_mod(12, p) * v.b2;
            } else {
                r = -inv_mod(12 * v.c4, p) * (v.c6 + v.b2 * v.c4);
            }
            r = pmod(r, p);
            t = pmod(-half * (a[0] * r + a[2]), p);
        }
        rst_transform(a, r, 0, t);
        v = invariants(a);

        if (!pdiv(v.c4, p)) {
            out.reduction = Reduction::Multiplicative;
            out.kodaira = "I" + std::to_string(n);
            out.conductor_exponent = 1;
            out.components = n;
            return out;
        }
        out.reduction = Reduction::Additive;
        auto finish = [&](const std::string& symbol, unsigned m) {
            out.kodaira = symbol;
            out.components = m;
            out.conductor_exponent = n - m + 1;
            return out;
        };
        if (val(a[4], prime) < 2) return finish("II", 1);
        if (val(v.b8, prime) < 3) return finish("III", 2);
        if (val(v.b6, prime) < 3) return finish("IV", 3);

        // Now p | a1, a2; p^2 | a3, a4; p^3 | a6.
        BigInt s;
        if (prime == 2) {
            s = pmod(a[1], p);
            t = p * pmod(div_exact(a[4], p2), p);
        } else if (prime == 3) {
            s = a[0];
            t = a[2];
        } else {
            const BigInt half = inv_mod(2, p);
            s = pmod(-a[0] * half, p);
            t = pmod(-a[2] * half, p);
        }
        rst_transform(a, 0, s, t);

        // Roots of T^3 + b T^2 + c T + d mod p.
        const BigInt b = div_exact(a[1], p);
        const BigInt c = div_exact(a[3], p2);
        const BigInt d = div_exact(a[4], p3);
        const BigInt w = 27 * d * d - b * b * c * c + 4 * b * b * b * d - 18 * b * c * d + 4 * c * c * c;
        const BigInt x = 3 * c - b * b;

        if (!pdiv(w, p)) return finish("I0*", 5);

        if (!pdiv(x, p)) {
            // One double root: I_m^*.
            BigInt root;
            if (prime == 2) {
                root = pmod(c, p);
            } else if (prime == 3) {
                root = pmod(b * c, p);
            } else {
                root = pmod((b * c - 9 * d) * inv_mod(2 * x, p), p);
            }
            rst_transform(a, p * root, 0, 0);
            unsigned ix = 3, iy = 3;
            BigInt mx = p2, my = p2;
            for (;;) {
                BigInt a2t = div_exact(a[1], p);
                BigInt a3t = div_exact(a[2], my);
                BigInt a4t = div_exact(a[3], p * mx);
                BigInt a6t = div_exact(a[4], mx * my);
                if (!pdiv(a3t * a3t + 4 * a6t, p)) break;
                BigInt tt = prime == 2 ? my * pmod(a6t, p) : my * pmod(-a3t * inv_mod(2, p), p);
                rst_transform(a, 0, 0, tt);
                my *= p;
                ++iy;
                a2t = div_exact(a[1], p);
                a3t = div_exact(a[2], my);
                a4t = div_exact(a[3], p * mx);
                a6t = div_exact(a[4], mx * my);
                if (!pdiv(a4t * a4t - 4 * a6t * a2t, p)) break;
                BigInt rr = prime == 2 ? mx * pmod(a6t * a2t, p) : mx * pmod(-a4t * inv_mod(2 * a2t, p), p);
                rst_transform(a, rr, 0, 0);
                mx *= p;
                ++ix;
            }
            const unsigned m = ix + iy - 5;
            return finish("I" + std::to_string(m) + "*", m + 5);
        }

        // Triple root: move it to 0.
        BigInt root;
        if (prime == 2) {
            root = pmod(b, p);
        } else if (prime == 3) {
            root = pmod(-d, p);
        } else {
            root = pmod(-b * inv_mod(3, p), p);
        }
        rst_transform(a, p * root, 0, 0);
        const BigInt x3t = div_exact(a[2], p2);
        const BigInt x6t = div_exact(a[4], p4);
        if (!pdiv(x3t * x3t + 4 * x6t, p)) return finish("IV*", 7);
        BigInt tt = prime == 2 ? pmod(x6t, p) : pmod(x3t * inv_mod(2, p), p);
        tt = -p2 * tt;
        rst_transform(a, 0, 0, tt);
        if (val(a[3], prime) < 4) return finish("III*", 8);
        if (val(a[4], prime) < 6) return finish("II*", 9);

        // Non-minimal at p: scale by u = p.
        BigInt scale = p;
        for (std::size_t i : {0u, 1u, 2u, 3u, 4u}) {
            const unsigned weight = i == 4 ? 6 : static_cast<unsigned>(i + 1);
            BigInt pw = 1;
            for (unsigned k = 0; k < weight; ++k) pw *= scale;
            a[i] = div_exact(a[i], pw);
        }
    }
}

}  // namespace gl2census
