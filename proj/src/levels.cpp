#include "gl2census/levels.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gl2census {

ExponentLedger::ExponentLedger(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> factors) {
    for (const auto& [p, e] : factors) multiply(p, e);
}

ExponentLedger ExponentLedger::of_integer(i128 n) {
    ExponentLedger ledger;
    for (const auto& [p, e] : factor(n)) ledger.multiply(p, e);
    return ledger;
}

void ExponentLedger::multiply(std::uint64_t p, std::uint64_t e) {
    if (e == 0) return;
    if (p < 2) throw std::invalid_argument("ExponentLedger: base must be >= 2");
    factors_[p] += e;
}

std::uint64_t ExponentLedger::exponent(std::uint64_t p) const {
    const auto it = factors_.find(p);
    return it == factors_.end() ? 0 : it->second;
}

BigInt ExponentLedger::value() const {
    BigInt v = 1;
    for (const auto& [p, e] : factors_) v *= boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(e));
    return v;
}

double ExponentLedger::log() const {
    double s = 0;
    for (const auto& [p, e] : factors_) s += static_cast<double>(e) * std::log(static_cast<double>(p));
    return s;
}

std::string ExponentLedger::to_string() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (const auto& [p, e] : factors_) {
        if (!out.empty()) out += ';';
        out += std::to_string(p) + '^' + std::to_string(e);
    }
    return out;
}

ExponentLedger ExponentLedger::parse(std::string_view text) {
    ExponentLedger ledger;
    if (text == "1") return ledger;
    if (text.empty()) throw std::invalid_argument("ExponentLedger::parse: empty");
    std::uint64_t last = 0;
    while (!text.empty()) {
        const std::size_t semi = text.find(';');
        const std::string_view item = text.substr(0, semi);
        const std::size_t caret = item.find('^');
        if (caret == std::string_view::npos) throw std::invalid_argument("ExponentLedger::parse: missing '^'");
        std::uint64_t p = 0, e = 0;
        const auto base = item.substr(0, caret), exp = item.substr(caret + 1);
        auto r1 = std::from_chars(base.data(), base.data() + base.size(), p);
        auto r2 = std::from_chars(exp.data(), exp.data() + exp.size(), e);
        if (r1.ec != std::errc() || r1.ptr != base.data() + base.size() || r2.ec != std::errc() ||
            r2.ptr != exp.data() + exp.size() || p < 2 || e == 0 || p <= last) {
            throw std::invalid_argument("ExponentLedger::parse: malformed factor '" + std::string(item) + "'");
        }
        ledger.multiply(p, e);
        last = p;
        text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
        if (semi != std::string_view::npos && text.empty()) throw std::invalid_argument("ExponentLedger::parse: trailing ';'");
    }
    return ledger;
}

bool ExponentLedger::divides(const ExponentLedger& other) const {
    for (const auto& [p, e] : factors_) {
        if (other.exponent(p) < e) return false;
    }
    return true;
}

int compare(const ExponentLedger& lhs, const BigInt& rhs) {
    if (rhs <= 0) return 1;
    const double diff = lhs.log() - log_of(rhs);
    if (diff > std::log(2.0)) return 1;
    if (diff < -std::log(2.0)) return -1;
    const BigInt v = lhs.value();
    return v < rhs ? -1 : (v > rhs ? 1 : 0);
}

int compare(const ExponentLedger& lhs, const ExponentLedger& rhs) {
    // Cancel common prime powers before comparing.
    ExponentLedger a, b;
    for (const auto& [p, e] : lhs.factors()) {
        const std::uint64_t f = rhs.exponent(p);
        if (e > f) a.multiply(p, e - f);
    }
    for (const auto& [p, e] : rhs.factors()) {
        const std::uint64_t f = lhs.exponent(p);
        if (e > f) b.multiply(p, e - f);
    }
    if (a.is_one() && b.is_one()) return 0;
    if (b.is_one()) return 1;
    if (a.is_one()) return -1;
    const double diff = a.log() - b.log();
    if (diff > std::log(2.0)) return 1;
    if (diff < -std::log(2.0)) return -1;
    const BigInt va = a.value(), vb = b.value();
    return va < vb ? -1 : (va > vb ? 1 : 0);
}

std::uint64_t gl2_order(std::uint64_t ell) { return (ell * ell - 1) * (ell * ell - ell); }

std::vector<LocalData> relevant_local_data(const CurveRecord& E) {
    std::vector<LocalData> out;
    out.push_back(local_data(E, 2));
    out.push_back(local_data(E, 3));
    for (const auto& [p, e] : factor(E.delta)) {
        if (p > 3) out.push_back(local_data(E, p));
    }
    return out;
}

namespace {

bool ell_divides_vj(const LocalData& ld, std::uint64_t ell) {
    // j = 0 counts as "ell | v_p(j)".
    if (!ld.vJnum) return true;
    return *ld.vJnum % static_cast<int>(ell) == 0;
}

std::uint64_t semistable_m_exponent(const LocalData& ld, std::uint64_t ell) {
    if (ld.reduction == Reduction::Good) return 0;
    if (ell_divides_vj(ld, ell)) return 0;
    // m = d D / e with d = #GL2(F_ell), D = ell - 1, e = ell.
    return gl2_order(ell) / ell * (ell - 1);
}

MExponent m_exponent_from(const LocalData& ld, std::uint64_t ell, std::uint64_t c_ell_exponent) {
    if (ld.p == ell) return {c_ell_exponent, true};
    if (ld.reduction == Reduction::Additive) {
        if (ld.p == 2 || ld.p == 3) return {kAdditive23DiscExponent, true};
        throw std::invalid_argument("m_exponent: additive reduction at p = " + std::to_string(ld.p) +
                                    " (curve is not semistable away from 2, 3)");
    }
    return {semistable_m_exponent(ld, ell), false};
}

void require_membership(const CurveRecord& E, std::uint64_t ell, const SurjectivityVerdict& verdict) {
    if (ell < 5 || !is_prime(ell)) throw std::invalid_argument("levels: ell must be a prime >= 5");
    if (!is_semistable_away_23(E)) throw std::invalid_argument("levels: curve is not semistable away from {2, 3}");
    if (!verdict.certified()) throw std::invalid_argument("levels: surjectivity is not certified");
}

SerreLevel serre_level_from(const std::vector<LocalData>& locals, std::uint64_t ell) {
    SerreLevel level;
    for (const LocalData& ld : locals) {
        if (ld.p == ell || ld.reduction == Reduction::Good) continue;
        if (ld.p == 2 || ld.p == 3) {
            // Curve conductor exponent as an upper bound for the level exponent.
            level.upper.multiply(ld.p, ld.cond_exp_bound);
            if (ld.reduction == Reduction::Additive) level.exact_away_23 = false;
            continue;
        }
        if (ld.reduction == Reduction::Multiplicative) {
            // Tate curve: rho-bar is unramified at p exactly when ell | v_p(j).
            if (!ell_divides_vj(ld, ell)) level.upper.multiply(ld.p, 1);
            continue;
        }
        throw std::invalid_argument("serre_level: additive reduction away from {2, 3}");
    }
    return level;
}

ExponentLedger disc_bound_from(const std::vector<LocalData>& locals, std::uint64_t ell, std::uint64_t c_ell_exponent) {
    ExponentLedger ledger;
    ledger.multiply(ell, c_ell_exponent);
    for (const LocalData& ld : locals) {
        if (ld.p == ell) continue;
        ledger.multiply(ld.p, m_exponent_from(ld, ell, c_ell_exponent).value);
    }
    return ledger;
}

}  // namespace

MExponent m_exponent(const CurveRecord& E, std::uint64_t ell, std::uint64_t p, std::uint64_t c_ell_exponent) {
    return m_exponent_from(local_data(E, p), ell, c_ell_exponent);
}

SerreLevel serre_level(const CurveRecord& E, std::uint64_t ell, const SurjectivityVerdict& verdict) {
    require_membership(E, ell, verdict);
    return serre_level_from(relevant_local_data(E), ell);
}

ExponentLedger disc_bound(const CurveRecord& E, std::uint64_t ell, std::uint64_t c_ell_exponent,
                          const SurjectivityVerdict& verdict) {
    require_membership(E, ell, verdict);
    return disc_bound_from(relevant_local_data(E), ell, c_ell_exponent);
}

LevelData compute_levels(const CurveRecord& E, std::uint64_t ell, std::uint64_t c_ell_exponent,
                         const SurjectivityVerdict& verdict) {
    require_membership(E, ell, verdict);
    const std::vector<LocalData> locals = relevant_local_data(E);
    const SerreLevel level = serre_level_from(locals, ell);
    LevelData data;
    data.ell = ell;
    data.serre_level_upper = level.upper;
    data.serre_level_exact_away_23 = level.exact_away_23;
    data.disc_bound = disc_bound_from(locals, ell, c_ell_exponent);
    data.c_ell_exponent = c_ell_exponent;
    return data;
}

ExponentLedger discriminant_ledger(const CurveRecord& E) { return ExponentLedger::of_integer(E.delta); }

ExponentLedger blanket_disc_bound(const CurveRecord& E, std::uint64_t ell, std::uint64_t c_ell_exponent) {
    const std::uint64_t k = gl2_order(ell) / ell * (ell - 1);
    ExponentLedger ledger{{2, kAdditive23DiscExponent}, {3, kAdditive23DiscExponent}};
    ledger.multiply(ell, c_ell_exponent);
    for (const auto& [p, e] : factor(E.delta)) ledger.multiply(p, e * k);
    return ledger;
}

double threshold_Y1(double X) {
    if (!(X > 0)) throw std::invalid_argument("threshold_Y1: X must be positive");
    return std::pow(X / 496.0, 1.0 / 6.0);
}

double threshold_Y1(const BigInt& X) {
    if (X <= 0) throw std::invalid_argument("threshold_Y1: X must be positive");
    return std::exp((log_of(X) - std::log(496.0)) / 6.0);
}

Fraction y2_exponent(std::uint64_t ell) {
    const std::uint64_t num = ell;
    const std::uint64_t den = 6 * (ell - 1) * gl2_order(ell);
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

double threshold_Y2_from_log(double log_X, std::uint64_t ell, std::uint64_t c_ell_exponent) {
    const Fraction f = y2_exponent(ell);
    const double base = log_X - static_cast<double>(kAdditive23DiscExponent) * std::log(6.0) -
                        static_cast<double>(c_ell_exponent) * std::log(static_cast<double>(ell));
    return std::exp(base * static_cast<double>(f.num) / static_cast<double>(f.den));
}

double threshold_Y2(const BigInt& X, std::uint64_t ell, std::uint64_t c_ell_exponent) {
    if (X <= 0) throw std::invalid_argument("threshold_Y2: X must be positive");
    return threshold_Y2_from_log(log_of(X), ell, c_ell_exponent);
}

namespace {

BigRational rational_power(const BigRational& base, std::uint64_t k) {
    BigRational result = 1, b = base;
    while (k > 0) {
        if (k & 1) result *= b;
        b *= b;
        k >>= 1;
    }
    return result;
}

}  // namespace

bool y1_within(const BigInt& X, double height) {
    return BigRational(X) <= 496 * rational_power(BigRational(height), 6);
}

bool y2_within(const BigInt& X, double height, std::uint64_t ell, std::uint64_t c_ell_exponent) {
    // Y2(X) <= h  <=>  X <= 6^3264 ell^c h^{6 (ell-1) #GL2 / ell}.
    const std::uint64_t k = 6 * (ell - 1) * (gl2_order(ell) / ell);
    const BigInt scale = boost::multiprecision::pow(BigInt(6), static_cast<unsigned>(kAdditive23DiscExponent)) *
                         boost::multiprecision::pow(BigInt(ell), static_cast<unsigned>(c_ell_exponent));
    return BigRational(X) <= BigRational(scale) * rational_power(BigRational(height), k);
}

}  // namespace gl2census
