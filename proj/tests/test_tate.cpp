#include <doctest.h>

#include "gl2census/curves.hpp"
#include "gl2census/tate.hpp"

using namespace gl2census;

namespace {

WeierstrassModel model(std::int64_t a1, std::int64_t a2, std::int64_t a3, std::int64_t a4, std::int64_t a6) {
    return WeierstrassModel{{BigInt(a1), BigInt(a2), BigInt(a3), BigInt(a4), BigInt(a6)}};
}

// Conductor as a product over the primes dividing the discriminant.
std::uint64_t conductor(const WeierstrassModel& m) {
    BigInt disc = m.discriminant();
    if (disc < 0) disc = -disc;
    std::uint64_t N = 1;
    for (std::uint64_t p = 2; disc > 1; ++p) {
        if (disc % p != 0) continue;
        while (disc % p == 0) disc /= p;
        const TateResult t = tate(m, p);
        for (unsigned i = 0; i < t.conductor_exponent; ++i) N *= p;
    }
    return N;
}

}  // namespace

TEST_CASE("discriminant and c4 of short models") {
    const WeierstrassModel m = WeierstrassModel::short_form(1, 1);
    CHECK(m.discriminant() == -496);
    CHECK(m.c4() == -48);
    CHECK(WeierstrassModel::short_form(0, 1).discriminant() == -432);
    CHECK(model(0, -1, 1, -10, -20).discriminant() == -161051);  // -11^5
}

TEST_CASE("conductors of well-known curves") {
    CHECK(conductor(WeierstrassModel::short_form(0, 1)) == 36);
    CHECK(conductor(WeierstrassModel::short_form(-1, 0)) == 32);
    CHECK(conductor(WeierstrassModel::short_form(1, 0)) == 64);
    CHECK(conductor(WeierstrassModel::short_form(0, -432)) == 27);
    CHECK(conductor(WeierstrassModel::short_form(1, 1)) == 496);
    CHECK(conductor(model(0, -1, 1, -10, -20)) == 11);
    CHECK(conductor(model(0, 0, 1, -1, 0)) == 37);
    CHECK(conductor(model(1, 0, 1, 4, -6)) == 14);
    CHECK(conductor(model(0, 0, 1, 0, -7)) == 27);
    CHECK(conductor(model(0, -1, 0, -4, 4)) == 24);
    CHECK(conductor(model(0, 1, 0, 4, 4)) == 20);
    CHECK(conductor(model(1, 1, 1, -10, -10)) == 15);
}

TEST_CASE("Kodaira symbols and minimal discriminants") {
    const TateResult t11 = tate(model(0, -1, 1, -10, -20), 11);
    CHECK(t11.reduction == Reduction::Multiplicative);
    CHECK(t11.kodaira == "I5");
    CHECK(t11.components == 5);

    // y^2 = x^3 - 432 is not minimal at 2; its minimal model has good reduction there.
    const TateResult t2 = tate(WeierstrassModel::short_form(0, -432), 2);
    CHECK(t2.reduction == Reduction::Good);
    CHECK(t2.conductor_exponent == 0);
    CHECK(t2.min_disc_valuation == 0);

    const TateResult t = tate(WeierstrassModel::short_form(1, 1), 2);
    CHECK(t.reduction == Reduction::Additive);
    CHECK(t.min_disc_valuation == 4);
    CHECK(t.conductor_exponent == 4);
}

TEST_CASE("Tate at p >= 5 agrees with the gcd criterion over C(4)") {
    enumerate_curves(4, [](const CurveRecord& E) {
        for (const auto& [p, e] : factor(E.delta)) {
            if (p < 5) continue;
            const TateResult t = tate(WeierstrassModel::short_form(E.A, E.B), p);
            const LocalData ld = local_data(E, p);
            CHECK(t.reduction == ld.reduction);
            CHECK(t.conductor_exponent == ld.cond_exp_bound);
            CHECK(t.min_disc_valuation == e);
        }
    });
}

TEST_CASE("Tate at 2 and 3 is invariant under rescaling the model") {
    enumerate_curves(2, [](const CurveRecord& E) {
        for (std::uint64_t p : {2, 3}) {
            const TateResult base = tate(WeierstrassModel::short_form(E.A, E.B), p);
            for (std::int64_t u : {2, 3}) {
                const TateResult scaled = tate(WeierstrassModel::short_form(u * u * u * u * E.A, u * u * u * u * u * u * E.B), p);
                CHECK(scaled.reduction == base.reduction);
                CHECK(scaled.kodaira == base.kodaira);
                CHECK(scaled.conductor_exponent == base.conductor_exponent);
                CHECK(scaled.min_disc_valuation == base.min_disc_valuation);
            }
        }
    });
}

TEST_CASE("Tate output respects Ogg's bounds at 2 and 3 over C(3)") {
    enumerate_curves(3, [](const CurveRecord& E) {
        for (std::uint64_t p : {2, 3}) {
            const TateResult t = tate(WeierstrassModel::short_form(E.A, E.B), p);
            const unsigned v = valuation(E.delta, p);
            CHECK(t.min_disc_valuation <= v);
            CHECK((v - t.min_disc_valuation) % 12 == 0);
            CHECK(t.conductor_exponent <= (p == 2 ? 8u : 5u));
            CHECK((t.reduction == Reduction::Good) == (t.conductor_exponent == 0));
            CHECK((t.reduction == Reduction::Multiplicative) == (t.conductor_exponent == 1));
            CHECK((t.reduction == Reduction::Good) == (t.min_disc_valuation == 0));
        }
    });
}
