#include "gl2census/galois.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gl2census {

namespace {

std::uint32_t residue(std::int64_t x, std::uint32_t m) {
    std::int64_t r = x % static_cast<std::int64_t>(m);
    if (r < 0) r += m;
    return static_cast<std::uint32_t>(r);
}

void check_hasse(std::int64_t a_p, std::uint32_t p) {
    if (a_p * a_p > 4 * static_cast<std::int64_t>(p)) {
        throw std::logic_error("Hasse bound violated at p = " + std::to_string(p));
    }
}

bool divides_delta(const CurveRecord& E, std::uint32_t p) { return E.delta % static_cast<i128>(p) == 0; }

// Subgroup of (Z/ell)^* generated so far, as a membership bitmap.
class UnitSubgroup {
public:
    explicit UnitSubgroup(std::uint32_t ell) : ell_(ell), member_(ell, false) {
        member_[1] = true;
        size_ = 1;
    }
    void add(std::uint32_t d) {
        if (d == 0 || member_[d]) return;
        // Close under multiplication by d.
        std::vector<std::uint32_t> current;
        for (std::uint32_t x = 1; x < ell_; ++x)
            if (member_[x]) current.push_back(x);
        std::vector<std::uint32_t> frontier = current;
        while (!frontier.empty()) {
            std::vector<std::uint32_t> next;
            for (std::uint32_t x : frontier) {
                const std::uint32_t y = static_cast<std::uint32_t>(static_cast<std::uint64_t>(x) * d % ell_);
                if (!member_[y]) {
                    member_[y] = true;
                    ++size_;
                    next.push_back(y);
                }
            }
            frontier = std::move(next);
        }
    }
    bool full() const { return size_ == ell_ - 1; }

private:
    std::uint32_t ell_;
    std::vector<bool> member_;
    std::uint32_t size_;
};

// Ascending primes covering at least [2, bound].
std::vector<std::uint32_t> primes_up_to(std::uint32_t bound) {
    static const std::vector<std::uint32_t> shared = sieve_primes(1000000).primes;
    if (bound <= 1000000) return {shared.begin(), std::upper_bound(shared.begin(), shared.end(), bound)};
    return sieve_primes(bound).primes;
}

}  // namespace

TraceTable::TraceTable(std::uint32_t bound) : bound_(bound), chi_(bound + 1) {
    const PrimeTable primes = sieve_primes(std::max<std::uint32_t>(bound, 2));
    for (std::uint32_t p : primes.primes) {
        if (p == 2) continue;
        auto& table = chi_[p];
        table.assign(p, -1);
        table[0] = 0;
        for (std::uint64_t x = 1; x <= p / 2; ++x) table[x * x % p] = 1;
    }
}

std::int64_t TraceTable::trace(std::int64_t A, std::int64_t B, std::uint32_t p) const {
    const auto& chi = chi_.at(p);
    if (chi.empty()) throw std::invalid_argument("TraceTable: p is not an odd prime within the table");
    // f(x) = x^3 + a x + b by forward differences: f(x+1) = f(x) + g(x),
    // g(x) = 3x^2 + 3x + 1 + a, g(x+1) = g(x) + h(x), h(x) = 6x + 6.
    const std::uint32_t six = 6 % p;
    std::uint32_t f = residue(B, p);
    std::uint32_t g = residue(1 + residue(A, p), p);
    std::uint32_t h = six;
    std::int64_t sum = 0;
    for (std::uint32_t x = 0; x < p; ++x) {
        sum += chi[f];
        f += g;
        if (f >= p) f -= p;
        g += h;
        if (g >= p) g -= p;
        h += six;
        if (h >= p) h -= p;
    }
    return -sum;
}

const TraceTable& default_trace_table() {
    static const TraceTable table(10000);
    return table;
}

std::int64_t trace_of_frobenius(std::int64_t A, std::int64_t B, std::uint32_t p) {
    const TraceTable& table = default_trace_table();
    std::int64_t a_p;
    if (p <= table.bound()) {
        a_p = table.trace(A, B, p);
    } else {
        std::int64_t sum = 0;
        const std::int64_t a = residue(A, p), b = residue(B, p);
        for (std::int64_t x = 0; x < p; ++x) {
            const std::int64_t fx = ((x * x % p) * x + a * x + b) % p;
            sum += legendre(fx, p);
        }
        a_p = -sum;
    }
    check_hasse(a_p, p);
    return a_p;
}

FrobeniusSample make_sample(std::uint32_t p, std::int64_t a_p, std::uint32_t ell) {
    return {p, a_p, residue(a_p, ell), p % ell};
}

FrobeniusSample point_count(std::int64_t A, std::int64_t B, std::uint32_t p, std::uint32_t ell) {
    if (p < 5) throw std::invalid_argument("point_count: p must be >= 5");
    if (p == ell) throw std::invalid_argument("point_count: p must differ from ell");
    const CurveRecord E = CurveRecord::make(A, B);
    if (divides_delta(E, p)) throw std::invalid_argument("point_count: bad reduction at p");
    return make_sample(p, trace_of_frobenius(A, B, p), ell);
}

std::shared_ptr<const std::vector<std::uint32_t>> probe_window(std::uint32_t ell, std::uint32_t bound) {
    static std::mutex mutex;
    static std::map<std::pair<std::uint32_t, std::uint32_t>, std::shared_ptr<const std::vector<std::uint32_t>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{ell, bound}];
    if (!slot) {
        auto primes = std::make_shared<std::vector<std::uint32_t>>();
        if (bound >= 5) {
            for (std::uint32_t p : sieve_primes(bound).primes) {
                if (p >= 5 && p != ell) primes->push_back(p);
            }
        }
        slot = std::move(primes);
    }
    return slot;
}

Fingerprint fingerprint(const CurveRecord& E, std::uint32_t ell, std::uint32_t window_bound) {
    Fingerprint fp;
    fp.ell = ell;
    fp.window = probe_window(ell, window_bound);
    fp.values.reserve(fp.window->size());
    for (std::uint32_t p : *fp.window) {
        if (divides_delta(E, p)) {
            fp.values.push_back(kBadResidue);
        } else {
            fp.values.push_back(static_cast<std::int16_t>(residue(trace_of_frobenius(E.A, E.B, p), ell)));
        }
    }
    return fp;
}

bool is_split_witness(std::uint32_t t, std::uint32_t d, std::uint32_t ell) {
    if (t == 0) return false;
    const std::int64_t disc = static_cast<std::int64_t>(t) * t - 4 * static_cast<std::int64_t>(d);
    return legendre(disc, ell) == 1;
}

bool is_nonsplit_witness(std::uint32_t t, std::uint32_t d, std::uint32_t ell) {
    if (t == 0) return false;
    const std::int64_t disc = static_cast<std::int64_t>(t) * t - 4 * static_cast<std::int64_t>(d);
    return legendre(disc, ell) == -1;
}

bool is_exceptional_excluder(std::uint32_t t, std::uint32_t d, std::uint32_t ell) {
    if (d % ell == 0) return false;
    // u = t^2 / d is the projective-order invariant of the element.
    const std::uint64_t u = static_cast<std::uint64_t>(t) * t % ell * pow_mod(d, ell - 2, ell) % ell;
    if (u == 0 || u == 1 || u == 2 || u == 4 % ell) return false;
    return (u * u + 3 * static_cast<std::uint64_t>(ell) - 3 * u + 1) % ell != 0;
}

SurjectivityVerdict certify_surjective(const CurveRecord& E, std::uint32_t ell, std::uint32_t probe_bound) {
    if (ell < 5 || !is_prime(ell)) throw std::invalid_argument("certify_surjective: ell must be a prime >= 5");
    SurjectivityVerdict verdict;
    std::optional<FrobeniusSample> split, nonsplit, excluder;
    UnitSubgroup dets(ell);
    std::size_t samples = 0, zero_traces = 0;
    if (probe_bound >= 5) {
        for (std::uint32_t p : primes_up_to(probe_bound)) {
            if (p > probe_bound) break;
            if (p < 5 || p == ell || divides_delta(E, p)) continue;
            const FrobeniusSample s = make_sample(p, trace_of_frobenius(E.A, E.B, p), ell);
            ++samples;
            if (s.a_p == 0) ++zero_traces;
            dets.add(s.d);
            if (!split && is_split_witness(s.t, s.d, ell)) split = s;
            if (!nonsplit && is_nonsplit_witness(s.t, s.d, ell)) nonsplit = s;
            if (!excluder && is_exceptional_excluder(s.t, s.d, ell)) excluder = s;
            if (split && nonsplit && excluder && dets.full()) {
                verdict.status = Certification::CertifiedSurjective;
                verdict.witnesses = std::array<FrobeniusSample, 3>{*split, *nonsplit, *excluder};
                return verdict;
            }
        }
    }
    verdict.status = Certification::NotCertified;
    verdict.reason = samples >= 20 && 3 * zero_traces >= samples ? kReasonCmLike : kReasonWitnessMissing;
    return verdict;
}

bool verify_witnesses(const SurjectivityVerdict& v, const CurveRecord& E, std::uint32_t ell) {
    if (!v.certified() || !v.witnesses) return false;
    const auto& [split, nonsplit, excluder] = *v.witnesses;
    for (const FrobeniusSample& s : *v.witnesses) {
        if (s.p < 5 || s.p == ell || divides_delta(E, s.p)) return false;
        if (s != make_sample(s.p, trace_of_frobenius(E.A, E.B, s.p), ell)) return false;
    }
    return is_split_witness(split.t, split.d, ell) && is_nonsplit_witness(nonsplit.t, nonsplit.d, ell) &&
           is_exceptional_excluder(excluder.t, excluder.d, ell);
}

std::uint64_t trace_count_oracle(std::uint32_t ell, std::uint32_t t, std::uint32_t d) {
    if (ell > 13 || ell < 2 || !is_prime(ell)) throw std::invalid_argument("trace_count_oracle: ell must be a prime <= 13");
    if (d % ell == 0) throw std::invalid_argument("trace_count_oracle: d must be a unit");
    static std::mutex mutex;
    static std::map<std::uint32_t, std::shared_ptr<const std::vector<std::uint64_t>>> tables;
    std::shared_ptr<const std::vector<std::uint64_t>> table;
    {
        std::lock_guard lock(mutex);
        auto& slot = tables[ell];
        if (!slot) {
            auto counts = std::make_shared<std::vector<std::uint64_t>>(ell * ell, 0);
            for (std::uint32_t a = 0; a < ell; ++a)
                for (std::uint32_t b = 0; b < ell; ++b)
                    for (std::uint32_t c = 0; c < ell; ++c)
                        for (std::uint32_t e = 0; e < ell; ++e) {
                            const std::uint32_t det = (a * e + ell * ell - b * c % ell) % ell;
                            if (det == 0) continue;
                            ++(*counts)[((a + e) % ell) * ell + det];
                        }
            slot = std::move(counts);
        }
        table = slot;
    }
    return (*table)[(t % ell) * ell + d % ell];
}

}  // namespace gl2census
