#include "gl2census/store.hpp"

#include <charconv>
#include <sstream>

namespace gl2census {

CorruptLineError::CorruptLineError(std::size_t line, const std::string& what)
    : StoreError("corrupt store line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const std::size_t pos = s.find(sep);
        out.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) return out;
        s = s.substr(pos + 1);
    }
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), value);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

const char* verdict_code(const SurjectivityVerdict& v) {
    if (v.certified()) return "S";
    return v.reason == kReasonCmLike ? "N-cm" : "N-missing";
}

}  // namespace

StoreHeader StoreHeader::from_config(const ClassificationConfig& cfg, double height) {
    StoreHeader h;
    h.ell = cfg.ell;
    h.window_bound = cfg.window_bound;
    h.probe_bound = cfg.probe_bound;
    h.probe_escalation = cfg.probe_escalation;
    h.c_ell_exponent = cfg.c_ell_exponent;
    h.height_completed = height;
    return h;
}

ClassificationConfig StoreHeader::config() const {
    ClassificationConfig cfg;
    cfg.ell = ell;
    cfg.window_bound = window_bound;
    cfg.probe_bound = probe_bound;
    cfg.probe_escalation = probe_escalation;
    cfg.c_ell_exponent = c_ell_exponent;
    return cfg;
}

std::string StoreHeader::to_line() const {
    std::string probe = std::to_string(probe_bound);
    if (probe_escalation != probe_bound) probe += ':' + std::to_string(probe_escalation);
    return "#gl2census v" + std::to_string(format_version) + " ell=" + std::to_string(ell) +
           " window=" + std::to_string(window_bound) + " probe=" + probe + " cexp=" + std::to_string(c_ell_exponent) +
           " height=" + format_double(height_completed);
}

StoreHeader StoreHeader::parse(std::string_view line) {
    const auto fail = [&](const std::string& why) -> StoreError {
        return StoreError("malformed store header '" + std::string(line) + "': " + why);
    };
    const std::vector<std::string_view> parts = split(line, ' ');
    if (parts.size() != 7 || parts[0] != "#gl2census" || parts[1].size() < 2 || parts[1][0] != 'v') {
        throw fail("expected '#gl2census v<n> ell= window= probe= cexp= height='");
    }
    StoreHeader h;
    if (!parse_number(parts[1].substr(1), h.format_version)) throw fail("bad version");
    if (h.format_version != kStoreFormatVersion) throw fail("unsupported format version");
    const char* keys[] = {"ell=", "window=", "probe=", "cexp=", "height="};
    std::string_view values[5];
    for (int i = 0; i < 5; ++i) {
        const std::string_view part = parts[2 + i];
        const std::string_view key = keys[i];
        if (part.substr(0, key.size()) != key) throw fail("expected field " + std::string(key));
        values[i] = part.substr(key.size());
    }
    if (!parse_number(values[0], h.ell) || !parse_number(values[1], h.window_bound) ||
        !parse_number(values[3], h.c_ell_exponent) || !parse_number(values[4], h.height_completed)) {
        throw fail("bad numeric field");
    }
    const std::size_t colon = values[2].find(':');
    if (!parse_number(values[2].substr(0, colon), h.probe_bound)) throw fail("bad probe bound");
    h.probe_escalation = h.probe_bound;
    if (colon != std::string_view::npos && !parse_number(values[2].substr(colon + 1), h.probe_escalation)) {
        throw fail("bad probe escalation");
    }
    if (h.to_line() != line) throw fail("non-canonical header");
    return h;
}

bool StoreHeader::same_config(const StoreHeader& other) const {
    return format_version == other.format_version && ell == other.ell && window_bound == other.window_bound &&
           probe_bound == other.probe_bound && probe_escalation == other.probe_escalation &&
           c_ell_exponent == other.c_ell_exponent;
}

std::string format_record(const ClassifiedCurve& rec) {
    const CurveRecord& E = rec.curve;
    std::string out = std::to_string(E.A) + ',' + std::to_string(E.B) + ',' + to_string(E.delta) + ',' + to_string(E.height);
    if (!rec.classification) return out;
    const Classification& c = *rec.classification;
    out += c.semistable ? ",1," : ",0,";
    out += verdict_code(c.verdict);
    out += ',';
    if (c.verdict.witnesses) {
        bool first = true;
        for (const FrobeniusSample& s : *c.verdict.witnesses) {
            if (!first) out += ';';
            first = false;
            out += std::to_string(s.p) + '/' + std::to_string(s.a_p);
        }
    } else {
        out += '-';
    }
    out += ',';
    for (std::size_t i = 0; i < c.fingerprint.values.size(); ++i) {
        if (i) out += ';';
        const std::int16_t v = c.fingerprint.values[i];
        out += v == kBadResidue ? std::string("x") : std::to_string(v);
    }
    out += ',';
    if (c.levels) {
        out += c.levels->serre_level_upper.to_string();
        out += c.levels->serre_level_exact_away_23 ? ",1," : ",0,";
        out += c.levels->disc_bound.to_string();
    } else {
        out += "-,-,-";
    }
    return out;
}

void check_record_against_header(const ClassifiedCurve& rec, const StoreHeader& header) {
    if (!rec.classification) return;
    const Classification& c = *rec.classification;
    if (c.fingerprint.ell != header.ell) {
        throw HeaderMismatchError("record fingerprint uses ell=" + std::to_string(c.fingerprint.ell) +
                                  " but the store has ell=" + std::to_string(header.ell));
    }
    if (c.fingerprint.values.size() != probe_window(header.ell, header.window_bound)->size()) {
        throw HeaderMismatchError("record fingerprint length does not match window=" + std::to_string(header.window_bound));
    }
    if (c.levels && (c.levels->ell != header.ell || c.levels->c_ell_exponent != header.c_ell_exponent)) {
        throw HeaderMismatchError("record levels were computed for another ell or cexp");
    }
}

ClassifiedCurve parse_record(std::string_view line, const StoreHeader& header, std::size_t line_no) {
    const auto fail = [&](const std::string& why) { return CorruptLineError(line_no, why); };
    const std::vector<std::string_view> f = split(line, ',');
    if (f.size() != 4 && f.size() != 11) throw fail("expected 4 or 11 fields, found " + std::to_string(f.size()));
    std::int64_t A = 0, B = 0;
    if (!parse_number(f[0], A) || !parse_number(f[1], B)) throw fail("bad coefficients");
    ClassifiedCurve rec;
    try {
        rec.curve = CurveRecord::make(A, B);
        if (parse_i128(f[2]) != rec.curve.delta) throw fail("delta does not match (A, B)");
        if (parse_i128(f[3]) != rec.curve.height) throw fail("height does not match (A, B)");
    } catch (const CorruptLineError&) {
        throw;
    } catch (const std::exception& e) {
        throw fail(e.what());
    }
    if (f.size() == 4) return rec;

    const std::uint32_t ell = header.ell;
    Classification c;
    if (f[4] != "0" && f[4] != "1") throw fail("semistable flag must be 0 or 1");
    c.semistable = f[4] == "1";
    if (c.semistable != is_semistable_away_23(rec.curve)) throw fail("semistable flag does not match (A, B)");

    if (f[5] == "S") {
        c.verdict.status = Certification::CertifiedSurjective;
    } else if (f[5] == "N-missing") {
        c.verdict.reason = kReasonWitnessMissing;
    } else if (f[5] == "N-cm") {
        c.verdict.reason = kReasonCmLike;
    } else {
        throw fail("unknown verdict '" + std::string(f[5]) + "'");
    }
    if (f[6] == "-") {
        if (c.verdict.certified()) throw fail("certified verdict without witnesses");
    } else {
        if (!c.verdict.certified()) throw fail("witnesses on an uncertified verdict");
        const std::vector<std::string_view> w = split(f[6], ';');
        if (w.size() != 3) throw fail("expected three witnesses");
        std::array<FrobeniusSample, 3> samples;
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t slash = w[i].find('/');
            std::uint32_t p = 0;
            std::int64_t a_p = 0;
            if (slash == std::string_view::npos || !parse_number(w[i].substr(0, slash), p) ||
                !parse_number(w[i].substr(slash + 1), a_p)) {
                throw fail("malformed witness '" + std::string(w[i]) + "'");
            }
            samples[i] = make_sample(p, a_p, ell);
        }
        c.verdict.witnesses = samples;
        try {
            if (!verify_witnesses(c.verdict, rec.curve, ell)) throw fail("witnesses do not verify");
        } catch (const CorruptLineError&) {
            throw;
        } catch (const std::exception& e) {
            throw fail(std::string("witnesses do not verify: ") + e.what());
        }
    }

    c.fingerprint.ell = ell;
    c.fingerprint.window = probe_window(ell, header.window_bound);
    const std::vector<std::string_view> fp = split(f[7], ';');
    const std::vector<std::uint32_t>& window = *c.fingerprint.window;
    if (window.empty() ? !(fp.size() == 1 && fp[0].empty()) : fp.size() != window.size()) {
        throw fail("fingerprint length does not match the window");
    }
    for (std::size_t i = 0; i < window.size(); ++i) {
        const bool bad = rec.curve.delta % static_cast<i128>(window[i]) == 0;
        std::int16_t v = kBadResidue;
        if (fp[i] != "x" && (!parse_number(fp[i], v) || v < 0 || v >= static_cast<std::int16_t>(ell))) {
            throw fail("bad fingerprint residue '" + std::string(fp[i]) + "'");
        }
        if (bad != (v == kBadResidue)) throw fail("fingerprint bad positions do not match delta");
        c.fingerprint.values.push_back(v);
    }

    const bool has_levels = f[8] != "-";
    if (has_levels != (f[9] != "-") || has_levels != (f[10] != "-")) throw fail("level fields must all be present or all '-'");
    if (has_levels != (c.semistable && c.verdict.certified())) throw fail("level data present iff the curve is in S_ell");
    if (has_levels) {
        LevelData lv;
        lv.ell = ell;
        lv.c_ell_exponent = header.c_ell_exponent;
        try {
            lv.serre_level_upper = ExponentLedger::parse(f[8]);
            lv.disc_bound = ExponentLedger::parse(f[10]);
        } catch (const std::exception& e) {
            throw fail(e.what());
        }
        if (f[9] != "0" && f[9] != "1") throw fail("level_exact must be 0, 1 or '-'");
        lv.serre_level_exact_away_23 = f[9] == "1";
        c.levels = std::move(lv);
    }
    rec.classification = std::move(c);
    return rec;
}

StoreWriter::StoreWriter(const std::filesystem::path& path, const StoreHeader& header)
    : path_(path), header_(header), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw StoreError("cannot create store file " + path.string());
    out_ << header_.to_line() << '\n';
    if (!out_) throw StoreError("cannot write store header to " + path.string());
}

StoreWriter::StoreWriter(const std::filesystem::path& path, const StoreHeader& header,
                         std::optional<std::pair<std::int64_t, std::int64_t>> last_key, std::uintmax_t keep_bytes)
    : path_(path), header_(header), last_key_(last_key) {
    std::error_code ec;
    std::filesystem::resize_file(path, keep_bytes, ec);
    if (ec) throw StoreError("cannot truncate " + path.string() + ": " + ec.message());
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw StoreError("cannot reopen store file " + path.string());
}

void StoreWriter::append(const ClassifiedCurve& rec) {
    check_record_against_header(rec, header_);
    const auto key = rec.curve.key();
    if (last_key_ && key <= *last_key_) {
        throw DuplicateKeyError("store key (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                                (key == *last_key_ ? ") is already present" : ") is out of order"));
    }
    out_ << format_record(rec) << '\n';
    if (!out_) throw StoreError("write failed on " + path_.string());
    last_key_ = key;
    ++appended_;
}

void StoreWriter::flush() {
    out_.flush();
    if (!out_) throw StoreError("flush failed on " + path_.string());
}

void StoreWriter::close() {
    if (out_.is_open()) {
        flush();
        out_.close();
    }
}

ScanResult scan_store(const std::filesystem::path& path, const std::function<bool(const ClassifiedCurve&)>& predicate,
                      const std::function<void(ClassifiedCurve&&)>& sink) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open store file " + path.string());
    ScanResult result;
    std::string line;
    if (!std::getline(in, line) || in.eof()) throw StoreError("store file " + path.string() + " has no complete header line");
    result.header = StoreHeader::parse(line);
    result.complete_bytes = line.size() + 1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (in.eof()) {
            // No trailing newline: a torn final write.
            if (!line.empty()) result.truncated = true;
            break;
        }
        ClassifiedCurve rec = parse_record(line, result.header, line_no);
        const auto key = rec.curve.key();
        if (result.last_key && key <= *result.last_key) {
            throw CorruptLineError(line_no, key == *result.last_key ? "duplicate key" : "key out of order");
        }
        result.last_key = key;
        result.complete_bytes += line.size() + 1;
        if (predicate(rec)) {
            ++result.records;
            sink(std::move(rec));
        }
    }
    return result;
}

StoreContents read_store(const std::filesystem::path& path) {
    StoreContents contents;
    const ScanResult r = scan_store(
        path, [](const ClassifiedCurve&) { return true; },
        [&](ClassifiedCurve&& rec) { contents.records.push_back(std::move(rec)); });
    contents.header = r.header;
    contents.truncated = r.truncated;
    return contents;
}

StoreHeader read_store_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open store file " + path.string());
    std::string line;
    if (!std::getline(in, line) || in.eof()) throw StoreError("store file " + path.string() + " has no complete header line");
    return StoreHeader::parse(line);
}

}  // namespace gl2census
