// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gl2census/census.hpp"
#include "gl2census/cli.hpp"
#include "gl2census/sieve.hpp"
#include "gl2census/store.hpp"

using namespace gl2census;
namespace fs = std::filesystem;

namespace {

using Key = std::pair<std::int64_t, std::int64_t>;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- oracles

bool prime_by_trial(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

std::uint64_t brute_force_count(std::int64_t a_max, std::int64_t b_max) {
    std::uint64_t n = 0;
    for (std::int64_t A = -a_max; A <= a_max; ++A) {
        for (std::int64_t B = -b_max; B <= b_max; ++B) {
            if (4 * A * A * A + 27 * B * B == 0) continue;
            bool minimal = true;
            for (std::int64_t p = 2; p <= 40 && minimal; ++p) {
                if (!prime_by_trial(p)) continue;
                const std::int64_t p4 = p * p * p * p;
                if (A % p4 == 0 && B % (p4 * p * p) == 0) minimal = false;
            }
            n += minimal;
        }
    }
    return n;
}

std::int64_t residue(std::int64_t v, std::int64_t m) { return ((v % m) + m) % m; }

std::uint64_t brute_class_count(std::int64_t ell, std::int64_t t, std::int64_t d) {
    std::uint64_t n = 0;
    for (std::int64_t a = 0; a < ell; ++a)
        for (std::int64_t b = 0; b < ell; ++b)
            for (std::int64_t c = 0; c < ell; ++c)
                for (std::int64_t e = 0; e < ell; ++e)
                    n += residue(a + e, ell) == t && residue(a * e - b * c, ell) == d;
    return n;
}

std::int64_t naive_trace(std::int64_t A, std::int64_t B, std::int64_t p) {
    std::int64_t points = 1;
    for (std::int64_t x = 0; x < p; ++x)
        for (std::int64_t y = 0; y < p; ++y)
            points += residue(y * y, p) == residue(x * x * x + A * x + B, p);
    return p + 1 - points;
}

std::uint64_t scratch_pair_pi(const CurveRecord& E1, const CurveRecord& E2, std::uint64_t X, std::int64_t t1,
                              std::int64_t t2, std::uint64_t d) {
    std::uint64_t n = 0;
    for (std::uint64_t p = 2; p <= X; ++p) {
        if (!prime_by_trial(static_cast<std::int64_t>(p)) || p % 5 != d) continue;
        const std::int64_t sp = static_cast<std::int64_t>(p);
        if (E1.delta % sp == 0 || E2.delta % sp == 0) continue;
        n += residue(naive_trace(E1.A, E1.B, sp), 5) == t1 && residue(naive_trace(E2.A, E2.B, sp), 5) == t2;
    }
    return n;
}

std::vector<ClassifiedCurve> classify_family(double X, const ClassificationConfig& cfg) {
    std::vector<CurveRecord> curves;
    enumerate_curves(X, [&](const CurveRecord& E) { curves.push_back(E); });
    std::vector<ClassifiedCurve> out;
    classify_ordered(curves, cfg, 1, [&](ClassifiedCurve&& c) { out.push_back(std::move(c)); });
    return out;
}

std::vector<ClassifiedCurve> members_of_S(const std::vector<ClassifiedCurve>& all) {
    std::vector<ClassifiedCurve> out;
    for (const ClassifiedCurve& c : all)
        if (c.in_S()) out.push_back(c);
    return out;
}

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t c1 = count_curves(1), c2 = count_curves(2);
    const HeightBox box = height_box(2);
    const std::uint64_t oracle = brute_force_count(box.a_max, box.b_max);
    const double elapsed = seconds_since(t0);
    o.require(c1 == 8, "count_curves(1) = 8");
    o.require(c2 == oracle, "count_curves(2) equals the double-loop oracle");
    o.require(elapsed < 1.0, "runtime < 1 s");
    o.detail << "count(1)=" << c1 << " count(2)=" << c2 << " oracle=" << oracle << " time=" << std::setprecision(3)
             << elapsed << "s";
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t n = count_curves(40);
    const ZetaConstants z = zeta_constants(20);
    const double ratio = static_cast<double>(n) * z.zeta10 / (4.0 * std::pow(40.0, 5));
    o.require(std::abs(ratio - 1) <= 0.01, "|count(40) zeta(10) / (4 40^5) - 1| <= 0.01");
    o.detail << "count(40)=" << n << " zeta(10)=" << std::setprecision(13) << z.zeta10 << " ratio=" << std::setprecision(8)
             << ratio << " time=" << std::setprecision(3) << seconds_since(t0) << "s";
    return o;
}

Outcome criterion3() {
    Outcome o;
    std::uint64_t n = 0, semistable = 0, coprime = 0;
    enumerate_curves(20, [&](const CurveRecord& E) {
        ++n;
        semistable += is_semistable_away_23(E);
        coprime += std::gcd(E.A, E.B) == 1;
    });
    const ZetaConstants z = zeta_constants(20);
    const double target = z.c_semistable;  // zeta(10) / zeta(2)
    const double fraction = static_cast<double>(semistable) / static_cast<double>(n);
    const double coprime_fraction = static_cast<double>(coprime) / static_cast<double>(n);
    double local_product = 1;
    for (std::uint32_t p : sieve_primes(1000000).primes) {
        if (p < 5) continue;
        const double q = p;
        local_product *= (1 - 1 / (q * q)) / (1 - std::pow(q, -10));
    }
    o.require(std::abs(fraction - target) <= 0.02, "semistable fraction of C(20) within 0.02 of zeta(10)/zeta(2)");
    o.detail << std::setprecision(6) << "fraction=" << fraction << " target=" << target
             << " |diff|=" << std::abs(fraction - target);
    o.notes.push_back("the filter only tests primes p >= 5; its limiting density is prod_{p>=5} (1-p^-2)/(1-p^-10) = " +
                      std::to_string(local_product));
    o.notes.push_back("zeta(10)/zeta(2) is the density of gcd(A, B) = 1 (all primes); measured on C(20): " +
                      std::to_string(coprime_fraction));
    o.notes.push_back("the constant is a lower bound (liminf >= zeta(10)/zeta(2)), satisfied: " +
                      std::string(fraction >= target ? "yes" : "no"));
    return o;
}

Outcome criterion4() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    bool sums = true, agree = true;
    for (std::uint32_t d = 1; d < 5; ++d) {
        std::uint64_t s = 0, s_brute = 0;
        for (std::uint32_t t = 0; t < 5; ++t) {
            const std::uint64_t n = trace_count_oracle(5, t, d);
            agree = agree && n == brute_class_count(5, t, d);
            s += n;
            s_brute += brute_class_count(5, t, d);
        }
        sums = sums && s == 120 && s_brute == 120;
    }
    const std::uint64_t n01 = trace_count_oracle(5, 0, 1), n21 = trace_count_oracle(5, 2, 1);
    const double elapsed = seconds_since(t0);
    o.require(sums, "sum_t N(t, d) = 120 for every d");
    o.require(n01 == 30 && brute_class_count(5, 0, 1) == 30, "N(0, 1) = 30");
    o.require(n21 == 25 && brute_class_count(5, 2, 1) == 25, "N(2, 1) = 25");
    o.require(agree, "oracle equals brute force for all (t, d)");
    o.require(elapsed < 1.0, "runtime < 1 s");
    o.detail << "N(0,1)=" << n01 << " N(2,1)=" << n21 << " time=" << std::setprecision(3) << elapsed << "s";
    return o;
}

Outcome criterion5() {
    Outcome o;
    const std::int64_t a7 = trace_of_frobenius(0, 1, 7), a5 = trace_of_frobenius(0, 1, 5);
    o.require(a7 == -4 && naive_trace(0, 1, 7) == -4, "a_7(y^2 = x^3 + 1) = -4");
    o.require(a5 == 0 && naive_trace(0, 1, 5) == 0, "a_5(y^2 = x^3 + 1) = 0");

    const ClassificationConfig cfg;
    std::uint64_t samples = 0, violations = 0, curves = 0;
    const auto primes = probe_window(5, cfg.probe_bound);
    for (const ClassifiedCurve& c : classify_family(4, cfg)) {
        ++curves;
        const Classification& cls = *c.classification;
        std::vector<std::pair<std::uint32_t, std::int64_t>> checks;
        if (cls.verdict.witnesses)
            for (const FrobeniusSample& s : *cls.verdict.witnesses) checks.emplace_back(s.p, s.a_p);
        for (std::uint32_t p : {2u, 3u, 5u})
            if (c.curve.delta % p != 0) checks.emplace_back(p, trace_of_frobenius(c.curve.A, c.curve.B, p));
        for (std::uint32_t p : *primes)
            if (c.curve.delta % p != 0) checks.emplace_back(p, trace_of_frobenius(c.curve.A, c.curve.B, p));
        for (const auto& [p, a] : checks) {
            ++samples;
            violations += a * a > 4 * static_cast<std::int64_t>(p);
        }
    }
    o.require(violations == 0, "Hasse bound on every sample");
    o.detail << "a_7=" << a7 << " a_5=" << a5 << " C(4) curves=" << curves << " Hasse samples=" << samples
             << " violations=" << violations;
    return o;
}

Outcome criterion6() {
    Outcome o;
    const SurjectivityVerdict cm = certify_surjective(CurveRecord::make(0, 1), 5, 10000);
    o.require(!cm.certified(), "(0, 1) not certified at probe bound 10^4");
    const CurveRecord E = CurveRecord::make(1, 1);
    const SurjectivityVerdict v = certify_surjective(E, 5, 100);
    bool below_100 = v.witnesses.has_value();
    if (v.witnesses)
        for (const FrobeniusSample& s : *v.witnesses) below_100 = below_100 && s.p < 100;
    o.require(v.certified() && below_100, "(1, 1) certified with witnesses below 100");

    // Re-verify from the stored form: write, read back, check the witnesses.
    const fs::path p = fs::temp_directory_path() / "gl2census_acceptance_c6.csv";
    {
        StoreWriter w(p, StoreHeader::from_config({}, 1));
        w.append({E, classify(E, {})});
        w.close();
    }
    const StoreContents back = read_store(p);
    const bool reverified = back.records.size() == 1 && verify_witnesses(back.records[0].classification->verdict, E, 5);
    o.require(reverified, "witness re-verification from stored samples");

    const ClassificationConfig cfg;
    std::vector<double> fractions;
    for (double X : {4.0, 6.0, 8.0, 10.0}) {
        std::uint64_t n = 0, k = 0;
        enumerate_curves(X, [&](const CurveRecord& C) {
            ++n;
            k += classify(C, cfg).verdict.certified();
        });
        fractions.push_back(static_cast<double>(k) / static_cast<double>(n));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < fractions.size(); ++i) monotone = monotone && fractions[i] >= fractions[i - 1];
    o.require(monotone, "certified fraction nondecreasing over X = 4, 6, 8, 10");
    o.detail << "(0,1): " << cm.reason << "; (1,1) witnesses p=";
    if (v.witnesses)
        for (const FrobeniusSample& s : *v.witnesses) o.detail << s.p << ' ';
    o.detail << "; certified fraction X=4,6,8,10:" << std::setprecision(6);
    for (double f : fractions) o.detail << ' ' << f;
    fs::remove(p);
    return o;
}

Outcome criterion7() {
    Outcome o;
    const CurveRecord E = CurveRecord::make(1, 1);
    o.require(m_exponent(E, 5, 31, 960) == MExponent{384, false}, "m_exponent = 384 (multiplicative, 5 does not divide v_p(j))");
    o.require(std::abs(threshold_Y1(496.0) - 1) < 1e-12 && y1_within(BigInt(496), 1) && !y1_within(BigInt(497), 1),
              "threshold_Y1(496) = 1");
    o.require(y2_exponent(5) == Fraction{1, 2304}, "Y2 exponent for ell = 5 is 1/2304");

    const ClassificationConfig cfg;
    const std::vector<ClassifiedCurve> members = members_of_S(classify_family(3, cfg));
    auto in_box = [](const ClassifiedCurve& c, double h) { return in_family(c.curve, height_box(h)); };

    std::size_t level_checked = 0, level_bad = 0;
    for (const BigInt X : {BigInt(496), BigInt(496 * 64)}) {
        const double h = threshold_Y1(X);
        for (const ClassifiedCurve& c : members) {
            if (!in_box(c, h)) continue;
            ++level_checked;
            level_bad += !leq(c.classification->levels->serre_level_upper, X);
        }
    }
    o.require(level_checked > 0 && level_bad == 0, "serre_level_upper <= X on S_5(Y1(X)) for X in {496, 496 2^6}");

    const BigInt base = boost::multiprecision::pow(BigInt(6), 3264) * boost::multiprecision::pow(BigInt(5), 960);
    std::size_t disc_checked = 0, disc_bad = 0;
    for (unsigned h : {1u, 2u}) {
        const BigInt X = base * boost::multiprecision::pow(BigInt(h), 2304);
        for (const ClassifiedCurve& c : members) {
            if (!in_box(c, h)) continue;
            ++disc_checked;
            disc_bad += !leq(c.classification->levels->disc_bound, X);
        }
    }
    o.require(disc_checked > 0 && disc_bad == 0, "disc_bound <= X on S_5(Y2(X)) for Y2(X) in {1, 2}");
    o.detail << "level checks=" << level_checked << " violations=" << level_bad << "; disc checks=" << disc_checked
             << " violations=" << disc_bad;

    // Beyond the asserted cutoffs: the chain |Delta| <= Y2^6 drops the factor 496.
    const BigInt X3 = base * boost::multiprecision::pow(BigInt(3), 2304);
    std::size_t n3 = 0;
    std::vector<std::string> over;
    for (const ClassifiedCurve& c : members) {
        ++n3;
        if (!leq(c.classification->levels->disc_bound, X3))
            over.push_back("(" + std::to_string(c.curve.A) + "," + std::to_string(c.curve.B) + ")");
    }
    std::string listed;
    for (std::size_t i = 0; i < over.size() && i < 6; ++i) listed += (i ? " " : "") + over[i];
    o.notes.push_back("at Y2(X) = 3, " + std::to_string(over.size()) + " of " + std::to_string(n3) +
                      " members have disc_bound > X: " + listed +
                      " (the threshold omits 496^384; all satisfy disc_bound <= 6^3264 5^960 (496 Y2^6)^384)");
    return o;
}

std::set<std::set<Key>> as_sets(const std::vector<RepClassBucket>& buckets) {
    std::set<std::set<Key>> out;
    for (const RepClassBucket& b : buckets) out.insert(std::set<Key>(b.members.begin(), b.members.end()));
    return out;
}

Outcome criterion8() {
    Outcome o;
    ClassificationConfig wide_cfg, narrow_cfg;
    narrow_cfg.window_bound = 100;
    const std::vector<ClassifiedCurve> members = members_of_S(classify_family(2, wide_cfg));
    const BucketPartition partition = bucket(members, 5);

    // O(n^2) oracle: components of the pairwise compatibility graph, each a clique.
    const std::size_t n = members.size();
    std::vector<std::vector<bool>> compatible(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& a = members[i].classification->fingerprint.values;
            const auto& b = members[j].classification->fingerprint.values;
            std::size_t common = 0;
            bool conflict = false;
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (a[k] == kBadResidue || b[k] == kBadResidue) continue;
                ++common;
                conflict = conflict || a[k] != b[k];
            }
            compatible[i][j] = !conflict && common >= kMinCommonGood;
        }
    }
    std::vector<std::size_t> comp(n, n);
    std::size_t n_comp = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] != n) continue;
        std::vector<std::size_t> stack{s};
        comp[s] = n_comp;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j)
                if (comp[j] == n && compatible[i][j]) {
                    comp[j] = n_comp;
                    stack.push_back(j);
                }
        }
        ++n_comp;
    }
    bool cliques = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cliques = cliques && (comp[i] != comp[j] || compatible[i][j]);
    std::map<std::size_t, std::set<Key>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[comp[i]].insert(members[i].curve.key());
    std::set<std::set<Key>> oracle;
    for (auto& [c, g] : groups) oracle.insert(g);
    o.require(cliques && partition.dropped.empty() && as_sets(partition.buckets) == oracle,
              "bucket partition equals the pairwise oracle on S_5(2)");

    std::size_t unseparated = 0;
    for (std::size_t i = 0; i < partition.buckets.size(); ++i)
        for (std::size_t j = i + 1; j < partition.buckets.size(); ++j)
            unseparated += separating_position(partition.buckets[i], partition.buckets[j]) < 0;
    o.require(unseparated == 0, "every pair of buckets has a separating probe prime");

    const BucketPartition narrow = bucket(members_of_S(classify_family(2, narrow_cfg)), 5);
    std::map<Key, std::size_t> narrow_of;
    for (std::size_t i = 0; i < narrow.buckets.size(); ++i)
        for (const Key& k : narrow.buckets[i].members) narrow_of[k] = i;
    std::size_t merged = 0;
    for (const RepClassBucket& b : partition.buckets) {
        std::set<std::size_t> parents;
        for (const Key& k : b.members)
            if (narrow_of.count(k)) parents.insert(narrow_of.at(k));
        merged += parents.size() > 1;
    }
    o.require(merged == 0, "window [5,100] -> [5,200] never merges buckets");
    o.detail << "S_5(2) members=" << n << " buckets=" << partition.buckets.size() << " oracle classes=" << oracle.size()
             << " narrow-window buckets=" << narrow.buckets.size();
    return o;
}

Outcome criterion9() {
    Outcome o;
    std::vector<CurveRecord> c1;
    enumerate_curves(1, [&](const CurveRecord& E) { c1.push_back(E); });
    std::size_t self_nonzero = 0;
    for (const CurveRecord& E : c1)
        for (std::uint32_t d = 1; d < 5; ++d)
            for (std::uint32_t t1 = 0; t1 < 5; ++t1)
                for (std::uint32_t t2 = 0; t2 < 5; ++t2) {
                    if (t1 == t2) continue;
                    PairStatConfig cfg;
                    cfg.t1 = t1;
                    cfg.t2 = t2;
                    cfg.d = d;
                    cfg.prime_bound = 1000;
                    self_nonzero += pair_pi(E, E, cfg) != 0;
                }
    o.require(self_nonzero == 0, "pair_pi(E, E, t1 != t2) = 0 over C(1)");

    // In-bucket vanishing; every bucket at height <= 2 is a singleton, so height 3 is swept too.
    std::map<double, std::size_t> in_bucket_pairs;
    std::size_t in_bucket_nonzero = 0;
    for (double h : {2.0, 3.0}) {
        const BucketPartition partition = bucket(members_of_S(classify_family(h, {})), 5);
        for (const RepClassBucket& b : partition.buckets)
            for (const Key& k1 : b.members)
                for (const Key& k2 : b.members) {
                    if (k1 == k2) continue;
                    ++in_bucket_pairs[h];
                    const CurveRecord E1 = CurveRecord::make(k1.first, k1.second);
                    const CurveRecord E2 = CurveRecord::make(k2.first, k2.second);
                    for (std::uint32_t d = 1; d < 5; ++d)
                        for (std::uint32_t t1 = 0; t1 < 5; ++t1)
                            for (std::uint32_t t2 = 0; t2 < 5; ++t2) {
                                if (t1 == t2) continue;
                                PairStatConfig cfg;
                                cfg.t1 = t1;
                                cfg.t2 = t2;
                                cfg.d = d;
                                cfg.prime_bound = 2000;
                                in_bucket_nonzero += pair_pi(E1, E2, cfg) != 0;
                            }
                }
    }
    o.require(in_bucket_nonzero == 0, "in-bucket pairs give pair_pi = 0 for t1 != t2");

    bool exact = true;
    for (std::uint64_t X : {50ull, 300ull}) {
        for (std::uint32_t d : {1u, 3u}) {
            PairStatConfig cfg;
            cfg.t1 = 0;
            cfg.t2 = 1;
            cfg.d = d;
            cfg.prime_bound = X;
            const MeanSquareResult r = mean_square_statistic(cfg);
            std::uint64_t piD = 0;
            for (std::uint64_t p = 2; p <= X; ++p) piD += prime_by_trial(static_cast<std::int64_t>(p)) && p % 5 == d;
            const BigRational delta(brute_class_count(5, 0, d) * brute_class_count(5, 1, d), 120 * 120);
            BigRational sum = 0;
            for (const CurveRecord& E1 : c1)
                for (const CurveRecord& E2 : c1) {
                    const BigRational dev = BigRational(scratch_pair_pi(E1, E2, X, 0, 1, d)) - delta * piD;
                    sum += dev * dev;
                }
            exact = exact && r.exact == sum / BigRational(static_cast<std::int64_t>(c1.size() * c1.size())) && r.n_pairs == 64;
        }
    }
    o.require(exact, "mean_square_statistic at height 1 equals a from-scratch recomputation");

    // Trend report: a fixed family C(2), and pairs sampled from C(X) itself.
    std::ostringstream fixed, sampled;
    fixed << std::setprecision(4);
    sampled << std::setprecision(4);
    for (std::uint64_t X : {100ull, 1000ull, 10000ull}) {
        PairStatConfig cfg;
        cfg.t1 = 0;
        cfg.t2 = 0;
        cfg.d = 1;
        cfg.prime_bound = X;
        cfg.curve_height = 2;
        const MeanSquareResult r = mean_square_statistic(cfg);
        o.require(std::isfinite(r.normalized) && r.statistic >= 0, "normalized statistic finite");
        fixed << " X=" << X << ":" << r.normalized;

        // Uniform sample of 300 curves of C(X) (rejection from the height box).
        const HeightBox box = height_box(static_cast<double>(X));
        std::mt19937_64 rng(X);
        std::uniform_int_distribution<std::int64_t> pa(-box.a_max, box.a_max), pb(-box.b_max, box.b_max);
        std::vector<CurveRecord> sample;
        while (sample.size() < 300) {
            const std::int64_t A = pa(rng), B = pb(rng);
            const i128 disc = 4 * static_cast<i128>(A) * A * A + 27 * static_cast<i128>(B) * B;
            if (disc == 0 || !is_minimal_pair(A, B)) continue;
            sample.push_back(CurveRecord::make(A, B));
        }
        cfg.curve_height = static_cast<double>(X);
        const MeanSquareResult s = mean_square_statistic(sample, cfg);
        sampled << " X=" << X << ":" << s.normalized;
    }
    o.detail << "C(1) self pairs nonzero=" << self_nonzero << "; in-bucket ordered pairs h<=2: " << in_bucket_pairs[2.0]
             << ", h=3: " << in_bucket_pairs[3.0] << " (nonzero=" << in_bucket_nonzero << ")";
    o.notes.push_back("normalized statistic (t1=t2=0, d=1), family C(2):" + fixed.str());
    o.notes.push_back("normalized statistic (t1=t2=0, d=1), 300 curves sampled from C(X):" + sampled.str());
    return o;
}

struct CliRun {
    int code = 0;
    std::string out;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "gl2census");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion10() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "gl2census_acceptance_c10";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::string> census_args{"--grid", "496,31744,2031616", "--disc-grid", "6^3264*5^960*2^2304"};

    std::map<std::string, std::pair<std::string, std::string>> results;
    bool codes_ok = true;
    for (const std::string workers : {"1", "8"}) {
        const std::string store = (dir / ("w" + workers + ".csv")).string();
        codes_ok = codes_ok && cli({"enumerate", "--height-bound", "4", "--store", store}).code == 0;
        codes_ok = codes_ok && cli({"classify", "--store", store, "--workers", workers}).code == 0;
        std::vector<std::string> args{"census", "--store", store};
        args.insert(args.end(), census_args.begin(), census_args.end());
        const CliRun c = cli(args);
        codes_ok = codes_ok && c.code == 0;
        results[workers] = {slurp(store), c.out};
    }
    const bool same_store = results["1"].first == results["8"].first;
    const bool same_census = results["1"].second == results["8"].second;
    o.require(codes_ok, "pipeline exit codes are 0");
    o.require(same_store && same_census, "store and census CSV byte-identical for --workers 1 and 8");

    // Interrupted run: four classified rows and half of the fifth in the partial file.
    const std::string store = (dir / "resume.csv").string();
    codes_ok = cli({"enumerate", "--height-bound", "4", "--store", store}).code == 0;
    std::istringstream full(results["1"].first);
    std::string partial, line;
    for (int i = 0; i < 5 && std::getline(full, line); ++i) partial += line + "\n";
    std::getline(full, line);
    partial += line.substr(0, line.size() / 2);
    std::ofstream(store + ".partial", std::ios::binary) << partial;
    codes_ok = codes_ok && cli({"classify", "--store", store, "--workers", "8"}).code == 0;
    std::vector<std::string> args{"census", "--store", store};
    args.insert(args.end(), census_args.begin(), census_args.end());
    const CliRun c = cli(args);
    const bool resumed_same = slurp(store) == results["1"].first && c.out == results["1"].second;
    o.require(codes_ok && c.code == 0 && resumed_same, "resume after interrupt reproduces the uninterrupted output");

    std::size_t rows = 0;
    for (char ch : results["1"].first) rows += ch == '\n';
    o.detail << "store lines=" << rows << " bytes=" << results["1"].first.size() << " census bytes=" << results["1"].second.size();
    fs::remove_all(dir);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"enumeration exactness", criterion1},  {"density constant", criterion2},
        {"semistable density", criterion3},     {"trace oracle", criterion4},
        {"point counts and Hasse", criterion5}, {"surjectivity classifier", criterion6},
        {"level/discriminant formulas", criterion7}, {"bucketing soundness", criterion8},
        {"sieve identities", criterion9},       {"pipeline determinism", criterion10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        failures += !o.pass;
        std::cout << "criterion " << std::setw(2) << i + 1 << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << ": " << o.detail.str() << " [" << std::fixed << std::setprecision(2) << seconds_since(t0) << "s]"
                  << std::defaultfloat << "\n";
        for (const std::string& n : o.notes) std::cout << "    " << n << "\n";
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << "\n";
    return failures == 0 ? 0 : 1;
}
