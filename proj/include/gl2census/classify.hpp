#pragma once

// Per-curve classification (semistability, surjectivity, fingerprint, levels)
// and the nested-family density table.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gl2census/curves.hpp"
#include "gl2census/galois.hpp"
#include "gl2census/levels.hpp"

namespace gl2census {

struct ClassificationConfig {
    std::uint32_t ell = 5;
    std::uint32_t window_bound = 200;
    std::uint32_t probe_bound = 1000;
    /// Second probe bound tried for curves not certified at probe_bound.
    std::uint32_t probe_escalation = 10000;
    std::uint64_t c_ell_exponent = 960;

    /// Throws std::invalid_argument for ell < 5, composite ell, or escalation < probe_bound.
    void validate() const;
    friend bool operator==(const ClassificationConfig&, const ClassificationConfig&) = default;
};

struct Classification {
    bool semistable = false;  // semistable away from {2, 3}
    SurjectivityVerdict verdict;
    Fingerprint fingerprint;
    std::optional<LevelData> levels;  // present iff semistable and certified
};

struct ClassifiedCurve {
    CurveRecord curve;
    std::optional<Classification> classification;  // empty for bare rows

    /// Member of S_ell: semistable away from {2, 3} and certified surjective.
    bool in_S() const {
        return classification && classification->semistable && classification->verdict.certified();
    }
};

Classification classify(const CurveRecord& E, const ClassificationConfig& cfg);

/// Classifies `curves` with `workers` threads and hands results to `sink`
/// in input order.
void classify_ordered(const std::vector<CurveRecord>& curves, const ClassificationConfig& cfg, unsigned workers,
                      const std::function<void(ClassifiedCurve&&)>& sink);

struct DensityRow {
    double height = 0;
    std::uint64_t n_C = 0;  // all curves
    std::uint64_t n_D = 0;  // semistable away from {2, 3}
    std::uint64_t n_E = 0;  // certified surjective
    std::uint64_t n_S = 0;  // both
    double d_ratio() const { return n_C ? static_cast<double>(n_D) / static_cast<double>(n_C) : 0.0; }
    double s_ratio() const { return n_C ? static_cast<double>(n_S) / static_cast<double>(n_C) : 0.0; }
};

/// True iff (A, B) lies in the box of C(X).
bool in_family(const CurveRecord& E, const HeightBox& box);

/// One row per height in `heights`, counting the classified curves of C(X).
std::vector<DensityRow> density_table(const std::vector<ClassifiedCurve>& curves, const std::vector<double>& heights);

}  // namespace gl2census
