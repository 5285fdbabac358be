#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aprand/experiments.hpp"
#include "aprand/limitlaw.hpp"

namespace aprand {

/// A malformed results file. line is 1-based; field names the offending column.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string field, const std::string& what);

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what);

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// One persisted row: trial,n,stat,value,s,p,seed_hex. s = p = 0 when there is no witness.
struct RecordRow {
    std::uint64_t trial = 0;
    std::size_t n = 0;
    Statistic stat = Statistic::W;
    std::size_t value = 0;
    std::size_t s = 0;
    std::size_t p = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const RecordRow&, const RecordRow&) = default;
};

std::vector<RecordRow> to_rows(std::span<const RunRecord> records);

/// Inverse of to_rows; rows of one (trial, n) must be adjacent.
std::vector<RunRecord> from_rows(std::span<const RecordRow> rows);

/// Provenance echo of the config. The worker count is omitted.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Overlays the keys present in `j` onto `base`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

// Tabular forms. A leading "# {json}" line carries the config echo; readers skip '#' lines.
void write_records_csv(std::ostream& os, std::span<const RecordRow> rows, const nlohmann::json& echo = nullptr);
std::vector<RecordRow> read_records_csv(std::istream& is);

void write_cdf_csv(std::ostream& os, std::span<const CdfComparison> comparisons, const nlohmann::json& echo = nullptr);
std::vector<CdfComparison> read_cdf_csv(std::istream& is);

nlohmann::json report_to_json(const DistributionReport& report);
DistributionReport report_from_json(const nlohmann::json& j);

/// Format is chosen by extension: ".json" writes the whole report, anything else
/// writes the records CSV (and the CDF table next to it as "<stem>.cdf.csv").
void persist_results(const DistributionReport& report, const std::filesystem::path& path);

/// Loads what persist_results wrote. For CSV the config comes from the echo line
/// and the CDF table from the sibling file when present.
DistributionReport load_results(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace aprand
