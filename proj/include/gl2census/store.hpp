#pragma once

// Line-oriented curve store.
//
//   #gl2census v1 ell=5 window=200 probe=1000:10000 cexp=960 height=4
//   A,B,delta,height                                          (bare row)
//   A,B,delta,height,semistable,verdict,witnesses,fingerprint,level,level_exact,disc
//
// semistable: 0|1. verdict: S | N-missing | N-cm. witnesses: p/a_p;p/a_p;p/a_p
// (split, nonsplit, excluder) or '-'. fingerprint: residues joined by ';' with
// 'x' at bad primes. level and disc: ledgers "2^4;31^1" ("1" for the empty
// product) or '-' outside S_ell; level_exact: 0|1 or '-'. Rows are strictly
// increasing in (A, B). A final line without a newline is a torn write and is
// dropped on read.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gl2census/classify.hpp"

namespace gl2census {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DuplicateKeyError : public StoreError {
public:
    using StoreError::StoreError;
};

class HeaderMismatchError : public StoreError {
public:
    using StoreError::StoreError;
};

class CorruptLineError : public StoreError {
public:
    CorruptLineError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline constexpr int kStoreFormatVersion = 1;

struct StoreHeader {
    int format_version = kStoreFormatVersion;
    std::uint32_t ell = 5;
    std::uint32_t window_bound = 200;
    std::uint32_t probe_bound = 1000;
    std::uint32_t probe_escalation = 10000;
    std::uint64_t c_ell_exponent = 960;
    double height_completed = 0;

    static StoreHeader from_config(const ClassificationConfig& cfg, double height);
    ClassificationConfig config() const;

    std::string to_line() const;
    static StoreHeader parse(std::string_view line);

    /// Same classification configuration (everything except the height).
    bool same_config(const StoreHeader& other) const;
    friend bool operator==(const StoreHeader&, const StoreHeader&) = default;
};

std::string format_record(const ClassifiedCurve& rec);

/// Parses one record line; `line_no` is used in error messages. Checks the
/// row against the header configuration and recomputes delta and height.
ClassifiedCurve parse_record(std::string_view line, const StoreHeader& header, std::size_t line_no);

/// Rejects a classified record whose data were produced under another configuration.
void check_record_against_header(const ClassifiedCurve& rec, const StoreHeader& header);

class StoreWriter {
public:
    /// Creates (or truncates) `path` and writes the header.
    StoreWriter(const std::filesystem::path& path, const StoreHeader& header);
    /// Continues an existing file whose header and last key are known.
    StoreWriter(const std::filesystem::path& path, const StoreHeader& header,
                std::optional<std::pair<std::int64_t, std::int64_t>> last_key, std::uintmax_t keep_bytes);

    /// Throws DuplicateKeyError for a key that is not larger than the previous
    /// one and HeaderMismatchError for a record of another configuration.
    void append(const ClassifiedCurve& rec);
    void flush();
    void close();

    const StoreHeader& header() const { return header_; }
    std::size_t appended() const { return appended_; }

private:
    std::filesystem::path path_;
    StoreHeader header_;
    std::ofstream out_;
    std::optional<std::pair<std::int64_t, std::int64_t>> last_key_;
    std::size_t appended_ = 0;
};

struct ScanResult {
    StoreHeader header;
    std::size_t records = 0;        // records passed to the sink
    bool truncated = false;         // a torn final line was dropped
    std::uintmax_t complete_bytes = 0;  // length of the file up to the last complete line
    std::optional<std::pair<std::int64_t, std::int64_t>> last_key;
};

/// Streams the records accepted by `predicate` to `sink` in file order.
ScanResult scan_store(const std::filesystem::path& path, const std::function<bool(const ClassifiedCurve&)>& predicate,
                      const std::function<void(ClassifiedCurve&&)>& sink);

struct StoreContents {
    StoreHeader header;
    std::vector<ClassifiedCurve> records;
    bool truncated = false;
};

StoreContents read_store(const std::filesystem::path& path);

/// Header only; throws StoreError when the file is missing or malformed.
StoreHeader read_store_header(const std::filesystem::path& path);

}  // namespace gl2census
