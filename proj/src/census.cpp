#include "gl2census/census.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace gl2census {

FingerprintComparison compare_fingerprints(const std::vector<std::int16_t>& a, const std::vector<std::int16_t>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("compare_fingerprints: length mismatch");
    FingerprintComparison c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == kBadResidue || b[i] == kBadResidue) continue;
        ++c.common_good;
        if (a[i] != b[i]) {
            c.conflict = true;
            return c;
        }
    }
    return c;
}

namespace {

// Buckets indexed by (position, residue), with kBadResidue mapped to slot ell.
class BucketIndex {
public:
    BucketIndex(std::size_t width, std::uint32_t ell) : ell_(ell), slots_(width, std::vector<std::vector<std::size_t>>(ell + 1)) {}

    void insert(std::size_t id, const std::vector<std::int16_t>& key) {
        for (std::size_t i = 0; i < key.size(); ++i) slots_[i][slot(key[i])].push_back(id);
    }

    // Position i of bucket `id` went from bad to `value`.
    void fill(std::size_t id, std::size_t i, std::int16_t value) {
        auto& bad = slots_[i][ell_];
        bad.erase(std::find(bad.begin(), bad.end(), id));
        slots_[i][slot(value)].push_back(id);
    }

    // Buckets that can be compatible with fp: those agreeing with fp, or bad,
    // at the good position of fp with the fewest such buckets.
    std::vector<std::size_t> candidates(const std::vector<std::int16_t>& fp, std::size_t n_buckets) const {
        std::size_t best = fp.size();
        std::size_t best_size = n_buckets + 1;
        for (std::size_t i = 0; i < fp.size(); ++i) {
            if (fp[i] == kBadResidue) continue;
            const std::size_t size = slots_[i][slot(fp[i])].size() + slots_[i][ell_].size();
            if (size < best_size) {
                best = i;
                best_size = size;
            }
        }
        std::vector<std::size_t> out;
        if (best == fp.size()) {
            out.resize(n_buckets);
            std::iota(out.begin(), out.end(), std::size_t{0});
            return out;
        }
        const auto& a = slots_[best][slot(fp[best])];
        const auto& b = slots_[best][ell_];
        out.reserve(a.size() + b.size());
        out.insert(out.end(), a.begin(), a.end());
        out.insert(out.end(), b.begin(), b.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::size_t slot(std::int16_t v) const { return v == kBadResidue ? ell_ : static_cast<std::size_t>(v); }

    std::uint32_t ell_;
    std::vector<std::vector<std::vector<std::size_t>>> slots_;
};

}  // namespace

BucketPartition bucket(std::vector<ClassifiedCurve> curves, std::uint32_t ell) {
    std::sort(curves.begin(), curves.end(),
              [](const ClassifiedCurve& a, const ClassifiedCurve& b) { return a.curve.key() < b.curve.key(); });
    BucketPartition result;
    if (curves.empty()) return result;
    std::optional<BucketIndex> index;
    for (const ClassifiedCurve& c : curves) {
        if (!c.classification || !c.classification->levels) {
            throw std::invalid_argument("bucket: curve (" + std::to_string(c.curve.A) + "," + std::to_string(c.curve.B) +
                                        ") lacks classification or level data");
        }
        if (!c.in_S()) throw std::invalid_argument("bucket: curve is not in S_ell");
        const Classification& cls = *c.classification;
        if (cls.fingerprint.ell != ell) throw std::invalid_argument("bucket: fingerprint computed for another ell");
        const std::vector<std::int16_t>& fp = cls.fingerprint.values;
        if (!index) index.emplace(fp.size(), ell);
        if (!result.buckets.empty() && result.buckets.front().key.size() != fp.size()) {
            throw std::invalid_argument("bucket: fingerprints of different windows");
        }

        std::optional<std::size_t> match;
        bool ambiguous = false, weak = false;
        for (std::size_t id : index->candidates(fp, result.buckets.size())) {
            const FingerprintComparison cmp = compare_fingerprints(fp, result.buckets[id].key);
            if (cmp.conflict) continue;
            if (cmp.common_good < kMinCommonGood) {
                weak = true;
                continue;
            }
            if (match) ambiguous = true;
            match = id;
        }
        if (weak || ambiguous) {
            result.dropped.push_back(c.curve.key());
            continue;
        }
        const LevelData& lv = *cls.levels;
        if (!match) {
            RepClassBucket b;
            b.key = fp;
            b.members.push_back(c.curve.key());
            b.min_serre_level = lv.serre_level_upper;
            b.min_disc_bound = lv.disc_bound;
            b.exact_flag = lv.serre_level_exact_away_23;
            index->insert(result.buckets.size(), b.key);
            result.buckets.push_back(std::move(b));
            continue;
        }
        RepClassBucket& b = result.buckets[*match];
        for (std::size_t i = 0; i < fp.size(); ++i) {
            if (b.key[i] == kBadResidue && fp[i] != kBadResidue) {
                b.key[i] = fp[i];
                index->fill(*match, i, fp[i]);
            }
        }
        b.members.push_back(c.curve.key());
        if (compare(lv.serre_level_upper, b.min_serre_level) < 0) b.min_serre_level = lv.serre_level_upper;
        if (compare(lv.disc_bound, b.min_disc_bound) < 0) b.min_disc_bound = lv.disc_bound;
        b.exact_flag = b.exact_flag && lv.serre_level_exact_away_23;
    }
    return result;
}

std::ptrdiff_t separating_position(const RepClassBucket& a, const RepClassBucket& b) {
    for (std::size_t i = 0; i < a.key.size() && i < b.key.size(); ++i) {
        if (a.key[i] != kBadResidue && b.key[i] != kBadResidue && a.key[i] != b.key[i]) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
}

bool twist_related(const std::vector<std::int16_t>& a, const std::vector<std::int16_t>& b,
                   const std::vector<std::uint32_t>& window, std::uint32_t ell, std::uint32_t k) {
    if (a.size() != b.size() || a.size() != window.size()) throw std::invalid_argument("twist_related: length mismatch");
    std::size_t common = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == kBadResidue || b[i] == kBadResidue) continue;
        ++common;
        const std::uint64_t chi = pow_mod(window[i] % ell, k, ell);
        if (static_cast<std::uint64_t>(b[i]) != chi * static_cast<std::uint64_t>(a[i]) % ell) return false;
    }
    return common >= kMinCommonGood;
}

std::vector<MergedBucket> merge_under_twists(const std::vector<RepClassBucket>& buckets,
                                             const std::vector<std::uint32_t>& window, std::uint32_t ell) {
    std::vector<std::size_t> parent(buckets.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        for (std::size_t j = i + 1; j < buckets.size(); ++j) {
            if (find(i) == find(j)) continue;
            for (std::uint32_t k = 0; k + 1 < ell; ++k) {
                if (twist_related(buckets[i].key, buckets[j].key, window, ell, k)) {
                    parent[std::max(find(i), find(j))] = std::min(find(i), find(j));
                    break;
                }
            }
        }
    }
    std::map<std::size_t, MergedBucket> groups;
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        MergedBucket& m = groups[find(i)];
        if (m.parts.empty() || compare(buckets[i].min_disc_bound, m.min_disc_bound) < 0) {
            m.min_disc_bound = buckets[i].min_disc_bound;
        }
        m.parts.push_back(i);
    }
    std::vector<MergedBucket> out;
    for (auto& [root, m] : groups) out.push_back(std::move(m));
    return out;
}

Cutoff Cutoff::parse(std::string_view text) {
    Cutoff c;
    c.label = std::string(text);
    if (text.empty()) throw std::invalid_argument("cutoff: empty");
    BigInt value = 1;
    auto parse_uint = [&](std::string_view s) {
        std::uint64_t v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
            throw std::invalid_argument("cutoff: malformed number '" + std::string(s) + "' in '" + c.label + "'");
        }
        return v;
    };
    while (!text.empty()) {
        const std::size_t star = text.find('*');
        const std::string_view factor = text.substr(0, star);
        const std::size_t caret = factor.find('^');
        if (caret == std::string_view::npos) {
            value *= parse_uint(factor);
        } else {
            const std::uint64_t e = parse_uint(factor.substr(caret + 1));
            if (e > 1000000) throw std::invalid_argument("cutoff: exponent too large in '" + c.label + "'");
            value *= boost::multiprecision::pow(BigInt(parse_uint(factor.substr(0, caret))), static_cast<unsigned>(e));
        }
        if (star == std::string_view::npos) break;
        text = text.substr(star + 1);
        if (text.empty()) throw std::invalid_argument("cutoff: trailing '*' in '" + c.label + "'");
    }
    if (value < 2) throw std::invalid_argument("cutoff: must be at least 2, got '" + c.label + "'");
    c.value = std::move(value);
    return c;
}

double required_height_level(const Cutoff& X, std::uint32_t ell, std::uint64_t c_ell_exponent) {
    return std::max(threshold_Y1(X.value), threshold_Y2(X.value, ell, c_ell_exponent));
}

double required_height_disc(const Cutoff& X, std::uint32_t ell, std::uint64_t c_ell_exponent) {
    return threshold_Y2(X.value, ell, c_ell_exponent);
}

namespace {

std::string format_height(double h) {
    std::ostringstream s;
    s << std::setprecision(6) << h;
    return s.str();
}

}  // namespace

UnderpopulatedError::UnderpopulatedError(const std::string& cutoff, double required, double available)
    : std::runtime_error("store underpopulated: cutoff " + cutoff + " needs curves up to height " + format_height(required) +
                         " (classify with --height-bound " + format_height(std::ceil(required)) +
                         "), but the store is complete only up to height " + format_height(available)),
      required_(required) {}

long double theory_M(const BigInt& X) {
    const long double lx = log_of(X);
    return std::exp(lx / 12.0L) / lx;
}

long double theory_F(const BigInt& X, std::uint32_t ell) {
    const long double lx = log_of(X);
    const long double e = static_cast<long double>(ell) / (12.0L * (ell - 1) * static_cast<long double>(gl2_order(ell)));
    return std::exp(lx * e) / lx;
}

CensusReport census(const std::vector<ClassifiedCurve>& curves, const CensusInput& input) {
    CensusReport report;
    report.ell = input.ell;

    // Collapse both grids into one ascending list, remembering which
    // admission test each cutoff needs.
    struct Entry {
        Cutoff cutoff;
        bool level = false, disc = false;
    };
    std::vector<Entry> entries;
    auto add = [&](const Cutoff& c, bool level) {
        for (Entry& e : entries) {
            if (e.cutoff.value == c.value) {
                (level ? e.level : e.disc) = true;
                return;
            }
        }
        entries.push_back({c, level, !level});
    };
    for (const Cutoff& c : input.level_grid) add(c, true);
    for (const Cutoff& c : input.disc_grid) add(c, false);
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.cutoff.value < b.cutoff.value; });

    for (const Entry& e : entries) {
        const bool y2_ok = y2_within(e.cutoff.value, input.store_height, input.ell, input.c_ell_exponent);
        const bool y1_ok = !e.level || y1_within(e.cutoff.value, input.store_height);
        if (!y1_ok || !y2_ok) {
            const double need = e.level ? required_height_level(e.cutoff, input.ell, input.c_ell_exponent)
                                        : required_height_disc(e.cutoff, input.ell, input.c_ell_exponent);
            throw UnderpopulatedError(e.cutoff.label, need, input.store_height);
        }
    }

    std::vector<ClassifiedCurve> members;
    const HeightBox box = height_box(input.store_height);
    for (const ClassifiedCurve& c : curves) {
        if (c.in_S() && in_family(c.curve, box)) members.push_back(c);
    }
    report.n_curves = members.size();
    const BucketPartition partition = bucket(std::move(members), input.ell);
    report.n_dropped = partition.dropped.size();
    report.n_buckets = partition.buckets.size();

    for (std::size_t i = 0; i < partition.buckets.size(); ++i) {
        for (std::size_t j = i + 1; j < partition.buckets.size(); ++j) {
            if (separating_position(partition.buckets[i], partition.buckets[j]) < 0) {
                throw std::logic_error("census: buckets " + std::to_string(i) + " and " + std::to_string(j) +
                                       " have no separating probe prime");
            }
        }
    }

    const auto window = probe_window(input.ell, input.window_bound);
    if (!partition.buckets.empty() && window->size() != partition.buckets.front().key.size()) {
        throw std::invalid_argument("census: window bound does not match the stored fingerprints");
    }
    const std::vector<MergedBucket> merged = merge_under_twists(partition.buckets, *window, input.ell);
    report.n_merged = merged.size();
    for (const MergedBucket& m : merged) report.max_orbit = std::max(report.max_orbit, m.parts.size());

    for (const Entry& e : entries) {
        CensusRow row;
        row.cutoff = e.cutoff;
        for (const RepClassBucket& b : partition.buckets) row.M_hat += leq(b.min_serre_level, e.cutoff.value);
        for (const MergedBucket& m : merged) row.F_hat += leq(m.min_disc_bound, e.cutoff.value);
        row.theory_M = theory_M(e.cutoff.value);
        row.theory_F = theory_F(e.cutoff.value, input.ell);
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string format_real(long double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

}  // namespace

void write_census_csv(std::ostream& out, const CensusReport& report, const std::string& header_comment) {
    if (!header_comment.empty()) out << header_comment;
    out << "cutoff_X,M_hat,F_hat,theory_M,theory_F,ratio_M,ratio_F\n";
    for (const CensusRow& r : report.rows) {
        out << r.cutoff.label << ',' << r.M_hat << ',' << r.F_hat << ',' << format_real(r.theory_M) << ','
            << format_real(r.theory_F) << ',' << format_real(static_cast<long double>(r.M_hat) / r.theory_M) << ','
            << format_real(static_cast<long double>(r.F_hat) / r.theory_F) << '\n';
    }
}

void write_density_csv(std::ostream& out, const std::vector<DensityRow>& rows, const std::string& header_comment) {
    if (!header_comment.empty()) out << header_comment;
    out << "height_X,n_C,n_D,n_E,n_S,d_ratio,s_ratio\n";
    for (const DensityRow& r : rows) {
        out << format_real(r.height) << ',' << r.n_C << ',' << r.n_D << ',' << r.n_E << ',' << r.n_S << ','
            << format_real(r.d_ratio()) << ',' << format_real(r.s_ratio()) << '\n';
    }
}

}  // namespace gl2census
