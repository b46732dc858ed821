#include "gl2census/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gl2census/census.hpp"
#include "gl2census/sieve.hpp"
#include "gl2census/store.hpp"

namespace gl2census {

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kProgressEvery = 1000000;
constexpr std::size_t kClassifyBlock = 4096;

struct RunConfig {
    std::uint32_t ell = 5;
    std::optional<double> height_bound;
    std::uint32_t window_bound = 200;
    std::uint32_t probe_bound = 1000;
    std::uint32_t probe_escalation = 10000;
    std::optional<std::uint64_t> c_ell_exponent;
    std::vector<std::string> grid;
    std::vector<std::string> disc_grid;
    std::string store;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    bool force = false;
    std::uint32_t d = 1;
    std::optional<std::uint32_t> t1, t2;
    std::optional<std::uint64_t> sample_pairs;

    // Options given explicitly on the command line.
    bool ell_given = false, window_given = false, probe_given = false, escalation_given = false, cexp_given = false;

    ClassificationConfig classification() const {
        ClassificationConfig cfg;
        cfg.ell = ell;
        cfg.window_bound = window_bound;
        cfg.probe_bound = probe_bound;
        cfg.probe_escalation = probe_escalation;
        cfg.c_ell_exponent = c_ell_exponent ? *c_ell_exponent : default_c_ell_exponent(ell);
        return cfg;
    }
};

void validate_common(const RunConfig& cfg) {
    if (cfg.ell < 5 || !is_prime(cfg.ell)) throw ConfigError("--ell must be a prime >= 5 (got " + std::to_string(cfg.ell) + ")");
    if (cfg.workers == 0) throw ConfigError("--workers must be positive");
    try {
        cfg.classification().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::filesystem::path require_store(const RunConfig& cfg) {
    if (cfg.store.empty()) throw ConfigError("--store is required");
    return cfg.store;
}

double require_height(const RunConfig& cfg) {
    if (!cfg.height_bound) throw ConfigError("--height-bound is required");
    const double X = *cfg.height_bound;
    if (!(X >= 1)) throw ConfigError("height bound must satisfy X ≥ 1");
    if (X > kMaxHeight) throw ConfigError("height bound exceeds the supported maximum");
    return X;
}

// Explicit flags must agree with the store header; unset ones are taken from it.
ClassificationConfig config_from_store(const RunConfig& cfg, const StoreHeader& h) {
    auto check = [](bool given, std::uint64_t flag, std::uint64_t stored, const char* name) {
        if (given && flag != stored) {
            throw HeaderMismatchError(std::string("--") + name + "=" + std::to_string(flag) +
                                      " does not match the store header value " + std::to_string(stored));
        }
    };
    check(cfg.ell_given, cfg.ell, h.ell, "ell");
    check(cfg.window_given, cfg.window_bound, h.window_bound, "window-bound");
    check(cfg.probe_given, cfg.probe_bound, h.probe_bound, "probe-bound");
    check(cfg.escalation_given, cfg.probe_escalation, h.probe_escalation, "probe-escalation");
    check(cfg.cexp_given, cfg.c_ell_exponent.value_or(0), h.c_ell_exponent, "cexp");
    return h.config();
}

std::vector<Cutoff> parse_grid(const std::vector<std::string>& items, const char* flag) {
    std::vector<Cutoff> out;
    for (const std::string& s : items) {
        try {
            out.push_back(Cutoff::parse(s));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string(flag) + ": " + e.what());
        }
        if (out.size() > 1 && !(out[out.size() - 2].value < out.back().value)) {
            throw ConfigError(std::string(flag) + " must be strictly ascending");
        }
    }
    return out;
}

std::vector<double> parse_real_grid(const std::vector<std::string>& items, const char* flag) {
    std::vector<double> out;
    for (const std::string& s : items) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw ConfigError(std::string(flag) + ": malformed value '" + s + "'");
        if (!out.empty() && !(out.back() < v)) throw ConfigError(std::string(flag) + " must be strictly ascending");
        out.push_back(v);
    }
    return out;
}

std::string report_header(const StoreHeader& h) { return "# " + h.to_line().substr(1) + "\n"; }

void progress(std::ostream& err, const char* what, std::uint64_t n) {
    if (n % kProgressEvery == 0) err << what << ": " << n << " curves\n";
}

int cmd_enumerate(const RunConfig& cfg, std::ostream&, std::ostream& err) {
    validate_common(cfg);
    const double X = require_height(cfg);
    const std::filesystem::path path = require_store(cfg);
    if (std::filesystem::exists(path) && !cfg.force) {
        throw StoreError("store " + path.string() + " already exists; pass --force to overwrite it");
    }
    const std::filesystem::path partial = path.string() + ".partial";
    std::uint64_t n = 0;
    {
        StoreWriter writer(partial, StoreHeader::from_config(cfg.classification(), X));
        enumerate_curves(X, [&](const CurveRecord& E) {
            writer.append(ClassifiedCurve{E, std::nullopt});
            progress(err, "enumerate", ++n);
        });
        writer.close();
    }
    std::filesystem::rename(partial, path);
    err << "enumerate: wrote " << n << " curves to " << path.string() << "\n";
    return kExitOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream&, std::ostream& err) {
    validate_common(cfg);
    const std::filesystem::path path = require_store(cfg);
    if (!std::filesystem::exists(path)) throw StoreError("store " + path.string() + " does not exist; run enumerate first");
    const StoreHeader source = read_store_header(path);
    const ClassificationConfig ccfg = cfg.classification();
    const StoreHeader target = StoreHeader::from_config(ccfg, source.height_completed);

    // Decide whether the store already holds classified rows.
    bool classified = false;
    {
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        if (std::getline(in, line) && !in.eof()) {
            classified = std::count(line.begin(), line.end(), ',') > 3;
        }
    }
    if (classified && !cfg.force) {
        if (source.same_config(target)) {
            err << "classify: " << path.string() << " is already classified\n";
            return kExitOk;
        }
        throw HeaderMismatchError("store " + path.string() + " was classified as '" + source.to_line() +
                                  "'; pass --force to reclassify with '" + target.to_line() + "'");
    }

    const std::filesystem::path partial = path.string() + ".partial";
    std::optional<StoreWriter> writer;
    std::optional<std::pair<std::int64_t, std::int64_t>> resume_after;
    if (std::filesystem::exists(partial) && !cfg.force) {
        const StoreHeader h = read_store_header(partial);
        if (h != target) {
            throw HeaderMismatchError("partial store " + partial.string() + " has header '" + h.to_line() +
                                      "'; pass --force to discard it");
        }
        const ScanResult r = scan_store(partial, [](const ClassifiedCurve&) { return false; }, [](ClassifiedCurve&&) {});
        writer.emplace(partial, target, r.last_key, r.complete_bytes);
        resume_after = r.last_key;
        err << "classify: resuming after " << (r.last_key ? "(" + std::to_string(r.last_key->first) + "," +
                                                                 std::to_string(r.last_key->second) + ")"
                                                           : std::string("the header"))
            << (r.truncated ? " (dropped a torn final line)" : "") << "\n";
    } else {
        writer.emplace(partial, target);
    }
    std::vector<CurveRecord> block;
    std::uint64_t done = 0;
    auto drain = [&] {
        classify_ordered(block, ccfg, cfg.workers, [&](ClassifiedCurve&& c) {
            writer->append(c);
            progress(err, "classify", ++done);
        });
        writer->flush();
        block.clear();
    };
    const ScanResult scanned = scan_store(
        path, [&](const ClassifiedCurve& c) { return !resume_after || c.curve.key() > *resume_after; },
        [&](ClassifiedCurve&& c) {
            block.push_back(c.curve);
            if (block.size() == kClassifyBlock) drain();
        });
    if (scanned.truncated) throw StoreError("store " + path.string() + " ends in a torn line; re-run enumerate");
    drain();
    writer->close();
    std::filesystem::rename(partial, path);
    err << "classify: classified " << done << " curves\n";
    return kExitOk;
}

std::vector<ClassifiedCurve> load_classified(const std::filesystem::path& path, StoreHeader& header) {
    StoreContents contents = read_store(path);
    if (contents.truncated) throw StoreError("store " + path.string() + " ends in a torn line");
    for (const ClassifiedCurve& c : contents.records) {
        if (!c.classification) throw StoreError("store " + path.string() + " is not classified; run classify first");
    }
    header = contents.header;
    return std::move(contents.records);
}

int cmd_census(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::filesystem::path path = require_store(cfg);
    const std::vector<Cutoff> level_grid = parse_grid(cfg.grid, "--grid");
    const std::vector<Cutoff> disc_grid = parse_grid(cfg.disc_grid, "--disc-grid");
    StoreHeader header = read_store_header(path);
    const ClassificationConfig ccfg = config_from_store(cfg, header);
    const std::vector<ClassifiedCurve> curves = load_classified(path, header);

    CensusInput input;
    input.ell = ccfg.ell;
    input.c_ell_exponent = ccfg.c_ell_exponent;
    input.window_bound = ccfg.window_bound;
    input.store_height = header.height_completed;
    input.level_grid = level_grid;
    input.disc_grid = disc_grid;
    const CensusReport report = census(curves, input);

    std::ostringstream comment;
    comment << report_header(header)
            << "# M_hat: fingerprint classes of certified surjections with Serre level <= X (lower bound for pairs (L, rho))\n"
            << "# F_hat: classes merged under det-power twists with division-field discriminant bound <= X\n"
            << "# curves=" << report.n_curves << " dropped=" << report.n_dropped << " buckets=" << report.n_buckets
            << " merged=" << report.n_merged << " max_orbit=" << report.max_orbit << "\n";
    write_census_csv(out, report, comment.str());
    err << "census: " << report.n_buckets << " buckets, " << report.n_merged << " after twist merging\n";
    return kExitOk;
}

int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const std::filesystem::path path = require_store(cfg);
    const std::vector<double> heights = parse_real_grid(cfg.grid, "--grid");
    StoreHeader header = read_store_header(path);
    config_from_store(cfg, header);
    for (double h : heights) {
        if (!(h >= 1)) throw ConfigError("density heights must satisfy X ≥ 1");
        if (h > header.height_completed) {
            throw UnderpopulatedError("height " + std::to_string(h), h, header.height_completed);
        }
    }
    const std::vector<ClassifiedCurve> curves = load_classified(path, header);
    write_density_csv(out, density_table(curves, heights), report_header(header));
    return kExitOk;
}

int cmd_sieve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.ell < 5 || !is_prime(cfg.ell)) throw ConfigError("--ell must be a prime >= 5");
    if (cfg.d % cfg.ell == 0) throw ConfigError("--d must be nonzero mod ell");
    if (cfg.d >= cfg.ell) throw ConfigError("--d must be a residue in [1, ell)");
    const double height = cfg.height_bound.value_or(1.0);
    std::vector<std::uint64_t> bounds;
    for (const std::string& s : cfg.grid) {
        std::uint64_t X = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), X);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || X < 2) {
            throw ConfigError("--grid: prime bounds must be integers >= 2, got '" + s + "'");
        }
        if (!bounds.empty() && bounds.back() >= X) throw ConfigError("--grid must be strictly ascending");
        bounds.push_back(X);
    }
    std::vector<std::uint32_t> t1s, t2s;
    for (std::uint32_t t = 0; t < cfg.ell; ++t) {
        if (!cfg.t1 || *cfg.t1 == t) t1s.push_back(t);
        if (!cfg.t2 || *cfg.t2 == t) t2s.push_back(t);
    }
    if (t1s.empty() || t2s.empty()) throw ConfigError("--t1 and --t2 must be residues in [0, ell)");

    std::vector<CurveRecord> curves;
    try {
        check_pair_budget(height, cfg.sample_pairs);
        enumerate_curves(height, [&](const CurveRecord& E) { curves.push_back(E); });
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    out << "# gl2census v" << kStoreFormatVersion << " sieve ell=" << cfg.ell << " curve_height=" << height
        << " curves=" << curves.size() << " delta=N(t1,d)N(t2,d)/(ell^3-ell)^2 pairs="
        << (cfg.sample_pairs ? "sampled:" + std::to_string(*cfg.sample_pairs) : std::string("all")) << " seed=" << cfg.seed
        << "\n";
    write_sieve_csv_header(out);
    for (std::uint64_t X : bounds) {
        for (std::uint32_t t1 : t1s) {
            for (std::uint32_t t2 : t2s) {
                PairStatConfig pc;
                pc.ell = cfg.ell;
                pc.t1 = t1;
                pc.t2 = t2;
                pc.d = cfg.d;
                pc.prime_bound = X;
                pc.curve_height = height;
                const MeanSquareResult r = mean_square_statistic(curves, pc, cfg.sample_pairs, cfg.seed);
                write_sieve_csv_row(out, pc, r);
            }
        }
    }
    err << "sieve: " << curves.size() << " curves\n";
    return kExitOk;
}

void add_options(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--ell", cfg.ell, "Prime ell >= 5")->capture_default_str();
    sub.add_option("--height-bound", cfg.height_bound, "Height bound X of the curve family C(X)");
    sub.add_option("--window-bound", cfg.window_bound, "Largest fingerprint probe prime")->capture_default_str();
    sub.add_option("--probe-bound", cfg.probe_bound, "Probe bound of the surjectivity certificate")->capture_default_str();
    sub.add_option("--probe-escalation", cfg.probe_escalation, "Second probe bound for uncertified curves")
        ->capture_default_str();
    sub.add_option("--cexp", cfg.c_ell_exponent, "Exponent cap for ell in the discriminant bound (default 2 #GL2)");
    sub.add_option("--grid", cfg.grid, "Cutoffs: census levels, density heights or sieve prime bounds")->delimiter(',');
    sub.add_option("--disc-grid", cfg.disc_grid, "Census discriminant cutoffs")->delimiter(',');
    sub.add_option("--store", cfg.store, "Store file");
    sub.add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
    sub.add_option("--seed", cfg.seed, "Seed for sampled sweeps")->capture_default_str();
    sub.add_flag("--force", cfg.force, "Overwrite or reclassify existing output");
    sub.add_option("--d", cfg.d, "Sieve residue class d of p mod ell")->capture_default_str();
    sub.add_option("--t1", cfg.t1, "Sieve trace residue of E1 (all when omitted)");
    sub.add_option("--t2", cfg.t2, "Sieve trace residue of E2 (all when omitted)");
    sub.add_option("--sample-pairs", cfg.sample_pairs, "Sieve: sample this many ordered pairs instead of all");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Elliptic-curve census of GL2(F_ell) extensions"};
    app.require_subcommand(1, 1);
    RunConfig cfg;
    const char* names[] = {"enumerate", "classify", "census", "density", "sieve"};
    const char* help[] = {"Write the bare curves of C(X) to a store", "Classify every curve of a store in place",
                          "Census CSV: M_hat and F_hat per cutoff", "Density CSV of the nested families per height",
                          "Mean-square pair statistic CSV"};
    std::vector<CLI::App*> subs;
    for (int i = 0; i < 5; ++i) {
        subs.push_back(app.add_subcommand(names[i], help[i]));
        add_options(*subs.back(), cfg);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    CLI::App* sub = app.get_subcommands().front();
    cfg.ell_given = sub->count("--ell") > 0;
    cfg.window_given = sub->count("--window-bound") > 0;
    cfg.probe_given = sub->count("--probe-bound") > 0;
    cfg.escalation_given = sub->count("--probe-escalation") > 0;
    cfg.cexp_given = sub->count("--cexp") > 0;
    if (!cfg.escalation_given && cfg.probe_escalation < cfg.probe_bound) cfg.probe_escalation = cfg.probe_bound;

    const std::string name = sub->get_name();
    try {
        if (name == "enumerate") return cmd_enumerate(cfg, out, err);
        if (name == "classify") return cmd_classify(cfg, out, err);
        if (name == "census") return cmd_census(cfg, out, err);
        if (name == "density") return cmd_density(cfg, out, err);
        return cmd_sieve(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StoreError& e) {
        err << "error: " << e.what() << "\n";
        return kExitStore;
    } catch (const UnderpopulatedError& e) {
        err << "error: " << e.what() << "\n";
        return kExitStore;
    } catch (const PairBudgetError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace gl2census
