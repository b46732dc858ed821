#include "gl2census/classify.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace gl2census {

void ClassificationConfig::validate() const {
    if (ell < 5 || !is_prime(ell)) throw std::invalid_argument("ell must be a prime >= 5");
    if (window_bound < 5) throw std::invalid_argument("window bound must be >= 5");
    if (probe_bound < 5) throw std::invalid_argument("probe bound must be >= 5");
    if (probe_escalation < probe_bound) throw std::invalid_argument("probe escalation must be >= probe bound");
}

Classification classify(const CurveRecord& E, const ClassificationConfig& cfg) {
    Classification c;
    c.semistable = is_semistable_away_23(E);
    c.verdict = certify_surjective(E, cfg.ell, cfg.probe_bound);
    if (!c.verdict.certified() && cfg.probe_escalation > cfg.probe_bound) {
        c.verdict = certify_surjective(E, cfg.ell, cfg.probe_escalation);
    }
    c.fingerprint = fingerprint(E, cfg.ell, cfg.window_bound);
    if (c.semistable && c.verdict.certified()) c.levels = compute_levels(E, cfg.ell, cfg.c_ell_exponent, c.verdict);
    return c;
}

void classify_ordered(const std::vector<CurveRecord>& curves, const ClassificationConfig& cfg, unsigned workers,
                      const std::function<void(ClassifiedCurve&&)>& sink) {
    cfg.validate();
    if (workers == 0) throw std::invalid_argument("workers must be positive");
    std::vector<std::optional<Classification>> results(curves.size());
    constexpr std::size_t kChunk = 32;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= curves.size()) return;
                const std::size_t end = std::min(curves.size(), begin + kChunk);
                for (std::size_t i = begin; i < end; ++i) results[i] = classify(curves[i], cfg);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = curves.size();
        }
    };
    const unsigned n_threads = std::min<std::size_t>(workers, (curves.size() + kChunk - 1) / kChunk);
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = 0; i < curves.size(); ++i) sink(ClassifiedCurve{curves[i], std::move(results[i])});
}

bool in_family(const CurveRecord& E, const HeightBox& box) {
    return E.A >= -box.a_max && E.A <= box.a_max && E.B >= -box.b_max && E.B <= box.b_max;
}

std::vector<DensityRow> density_table(const std::vector<ClassifiedCurve>& curves, const std::vector<double>& heights) {
    std::vector<DensityRow> rows;
    for (double X : heights) {
        const HeightBox box = height_box(X);
        DensityRow row;
        row.height = X;
        for (const ClassifiedCurve& c : curves) {
            if (!in_family(c.curve, box)) continue;
            if (!c.classification) throw std::invalid_argument("density_table: curve is not classified");
            ++row.n_C;
            const bool d = c.classification->semistable;
            const bool e = c.classification->verdict.certified();
            row.n_D += d;
            row.n_E += e;
            row.n_S += d && e;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gl2census
