#include "aprand/results_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace aprand {

ParseError::ParseError(std::size_t line, std::string field, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
      line_(line),
      field_(std::move(field)) {}

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(path) {}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Record rows

std::vector<RecordRow> to_rows(std::span<const RunRecord> records) {
    std::vector<RecordRow> rows;
    rows.reserve(records.size() * 2);
    for (const RunRecord& r : records) {
        for (const Statistic stat : {Statistic::W, Statistic::U}) {
            const auto& res = stat == Statistic::W ? r.w : r.u;
            if (!res) continue;
            RecordRow row;
            row.trial = r.trial;
            row.n = r.n;
            row.stat = stat;
            row.value = res->value;
            if (res->witness) {
                row.s = res->witness->s;
                row.p = res->witness->p;
            }
            row.seed = r.seed;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<RunRecord> from_rows(std::span<const RecordRow> rows) {
    std::vector<RunRecord> out;
    for (const RecordRow& row : rows) {
        if (out.empty() || out.back().trial != row.trial || out.back().n != row.n) {
            RunRecord r;
            r.trial = row.trial;
            r.n = row.n;
            r.seed = row.seed;
            out.push_back(r);
        }
        ApResult res;
        res.mode = row.stat == Statistic::W ? ApMode::wrapped : ApMode::straight;
        res.value = row.value;
        if (row.value > 0) res.witness = ApWitness{row.s, row.p, row.value};
        (row.stat == Statistic::W ? out.back().w : out.back().u) = res;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config echo

nlohmann::json config_to_json(const ExperimentConfig& c) {
    return nlohmann::json{
        {"master", c.master}, {"ns", c.ns},     {"trials", c.trials}, {"stats", to_string(c.stats)},
        {"x_lo", c.x_lo},     {"x_hi", c.x_hi}, {"eps", c.eps},       {"beta", c.beta},
        {"output", c.output},
    };
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    if (j.contains("master")) base.master = j.at("master").get<std::uint64_t>();
    if (j.contains("ns")) base.ns = j.at("ns").get<std::vector<std::size_t>>();
    if (j.contains("trials")) base.trials = j.at("trials").get<std::size_t>();
    if (j.contains("stats")) base.stats = selection_from_string(j.at("stats").get<std::string>());
    if (j.contains("x_lo")) base.x_lo = j.at("x_lo").get<double>();
    if (j.contains("x_hi")) base.x_hi = j.at("x_hi").get<double>();
    if (j.contains("eps")) base.eps = j.at("eps").get<double>();
    if (j.contains("beta")) base.beta = j.at("beta").get<double>();
    if (j.contains("workers")) base.workers = j.at("workers").get<std::size_t>();
    if (j.contains("output")) base.output = j.at("output").get<std::string>();
    return base;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct CsvRow {
    std::size_t line;
    std::vector<std::string> fields;
};

struct CsvTable {
    std::size_t header_line = 0;
    std::map<std::string, std::size_t> columns;
    std::vector<CsvRow> rows;

    std::size_t column(const std::string& name) const {
        const auto it = columns.find(name);
        if (it == columns.end()) throw ParseError(header_line, name, "missing column");
        return it->second;
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        if (header.empty()) {
            header = split(line);
            t.header_line = lineno;
            for (std::size_t i = 0; i < header.size(); ++i) t.columns[header[i]] = i;
            continue;
        }
        auto fields = split(line);
        if (fields.size() != header.size()) {
            const std::string field = fields.size() < header.size() ? header[fields.size()] : "<extra>";
            throw ParseError(lineno, field,
                             "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        t.rows.push_back({lineno, std::move(fields)});
    }
    if (header.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "<header>", "no header line");
    return t;
}

template <typename T>
T parse_uint(const CsvRow& row, const CsvTable& t, const std::string& name, int base = 10) {
    const std::string& s = row.fields[t.column(name)];
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError(row.line, name, "not a non-negative integer: '" + s + "'");
    }
    return v;
}

double parse_double(const CsvRow& row, const CsvTable& t, const std::string& name) {
    const std::string& s = row.fields[t.column(name)];
    double v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError(row.line, name, "not a number: '" + s + "'");
    }
    return v;
}

long parse_long(const CsvRow& row, const CsvTable& t, const std::string& name) {
    const std::string& s = row.fields[t.column(name)];
    long v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError(row.line, name, "not an integer: '" + s + "'");
    }
    return v;
}

Statistic parse_stat(const CsvRow& row, const CsvTable& t) {
    const std::string& s = row.fields[t.column("stat")];
    if (s == "W") return Statistic::W;
    if (s == "U") return Statistic::U;
    throw ParseError(row.line, "stat", "expected W or U, got '" + s + "'");
}

void write_echo(std::ostream& os, const nlohmann::json& echo) {
    if (!echo.is_null()) os << "# " << echo.dump() << '\n';
}

}  // namespace

void write_records_csv(std::ostream& os, std::span<const RecordRow> rows, const nlohmann::json& echo) {
    write_echo(os, echo);
    os << "trial,n,stat,value,s,p,seed_hex\n";
    for (const RecordRow& r : rows) {
        os << r.trial << ',' << r.n << ',' << to_string(r.stat) << ',' << r.value << ',' << r.s << ',' << r.p << ','
           << to_hex64(r.seed) << '\n';
    }
}

std::vector<RecordRow> read_records_csv(std::istream& is) {
    const CsvTable t = read_csv(is);
    for (const char* c : {"trial", "n", "stat", "value", "s", "p", "seed_hex"}) t.column(c);
    std::vector<RecordRow> rows;
    rows.reserve(t.rows.size());
    for (const CsvRow& row : t.rows) {
        RecordRow r;
        r.trial = parse_uint<std::uint64_t>(row, t, "trial");
        r.n = parse_uint<std::size_t>(row, t, "n");
        r.stat = parse_stat(row, t);
        r.value = parse_uint<std::size_t>(row, t, "value");
        r.s = parse_uint<std::size_t>(row, t, "s");
        r.p = parse_uint<std::size_t>(row, t, "p");
        r.seed = parse_uint<std::uint64_t>(row, t, "seed_hex", 16);
        rows.push_back(r);
    }
    return rows;
}

void write_cdf_csv(std::ostream& os, std::span<const CdfComparison> comparisons, const nlohmann::json& echo) {
    write_echo(os, echo);
    os << "n,stat,threshold,empirical,predicted,stderr,trials\n";
    for (const CdfComparison& c : comparisons) {
        for (const CdfRow& r : c.rows) {
            os << c.n << ',' << to_string(c.stat) << ',' << r.threshold << ',' << format_double(r.empirical) << ','
               << format_double(r.predicted) << ',' << format_double(r.stderr_) << ',' << r.trials << '\n';
        }
    }
}

std::vector<CdfComparison> read_cdf_csv(std::istream& is) {
    const CsvTable t = read_csv(is);
    for (const char* c : {"n", "stat", "threshold", "empirical", "predicted", "stderr", "trials"}) t.column(c);
    std::vector<CdfComparison> out;
    for (const CsvRow& row : t.rows) {
        const auto n = parse_uint<std::size_t>(row, t, "n");
        const Statistic stat = parse_stat(row, t);
        if (out.empty() || out.back().n != n || out.back().stat != stat) {
            CdfComparison c;
            c.n = n;
            c.stat = stat;
            out.push_back(c);
        }
        CdfRow r;
        r.threshold = parse_long(row, t, "threshold");
        r.empirical = parse_double(row, t, "empirical");
        r.predicted = parse_double(row, t, "predicted");
        r.stderr_ = parse_double(row, t, "stderr");
        r.trials = parse_uint<std::size_t>(row, t, "trials");
        out.back().ks = std::max(out.back().ks, std::abs(r.empirical - r.predicted));
        out.back().rows.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json report_to_json(const DistributionReport& report) {
    nlohmann::json records = nlohmann::json::array();
    for (const RecordRow& r : to_rows(report.records)) {
        records.push_back({{"trial", r.trial}, {"n", r.n}, {"stat", to_string(r.stat)}, {"value", r.value},
                           {"s", r.s}, {"p", r.p}, {"seed_hex", to_hex64(r.seed)}});
    }
    nlohmann::json cdf = nlohmann::json::array();
    for (const CdfComparison& c : report.comparisons) {
        for (const CdfRow& r : c.rows) {
            cdf.push_back({{"n", c.n}, {"stat", to_string(c.stat)}, {"threshold", r.threshold},
                           {"empirical", r.empirical}, {"predicted", r.predicted}, {"stderr", r.stderr_},
                           {"trials", r.trials}});
        }
    }
    return {{"config", config_to_json(report.config)}, {"records", records}, {"cdf", cdf}};
}

DistributionReport report_from_json(const nlohmann::json& j) {
    DistributionReport out;
    try {
        out.config = config_from_json(j.at("config"));
        std::vector<RecordRow> rows;
        for (const auto& r : j.at("records")) {
            RecordRow row;
            row.trial = r.at("trial").get<std::uint64_t>();
            row.n = r.at("n").get<std::size_t>();
            row.stat = statistic_from_string(r.at("stat").get<std::string>());
            row.value = r.at("value").get<std::size_t>();
            row.s = r.at("s").get<std::size_t>();
            row.p = r.at("p").get<std::size_t>();
            row.seed = std::stoull(r.at("seed_hex").get<std::string>(), nullptr, 16);
            rows.push_back(row);
        }
        out.records = from_rows(rows);
        for (const auto& r : j.at("cdf")) {
            const auto n = r.at("n").get<std::size_t>();
            const Statistic stat = statistic_from_string(r.at("stat").get<std::string>());
            if (out.comparisons.empty() || out.comparisons.back().n != n || out.comparisons.back().stat != stat) {
                CdfComparison c;
                c.n = n;
                c.stat = stat;
                out.comparisons.push_back(c);
            }
            CdfRow row;
            row.threshold = r.at("threshold").get<long>();
            row.empirical = r.at("empirical").get<double>();
            row.predicted = r.at("predicted").get<double>();
            row.stderr_ = r.at("stderr").get<double>();
            row.trials = r.at("trials").get<std::size_t>();
            auto& back = out.comparisons.back();
            back.ks = std::max(back.ks, std::abs(row.empirical - row.predicted));
            back.rows.push_back(row);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, "json", e.what());
    }
    return out;
}

namespace {

std::filesystem::path cdf_sibling(const std::filesystem::path& path) {
    auto p = path;
    p.replace_filename(path.stem().string() + ".cdf.csv");
    return p;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(path, "cannot open for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(path, "cannot open for reading");
    return is;
}

}  // namespace

void persist_results(const DistributionReport& report, const std::filesystem::path& path) {
    if (path.extension() == ".json") {
        auto os = open_out(path);
        os << report_to_json(report).dump(2) << '\n';
        if (!os) throw IoError(path, "write failed");
        return;
    }
    const auto echo = config_to_json(report.config);
    {
        auto os = open_out(path);
        write_records_csv(os, to_rows(report.records), echo);
        if (!os) throw IoError(path, "write failed");
    }
    const auto sibling = cdf_sibling(path);
    auto os = open_out(sibling);
    write_cdf_csv(os, report.comparisons, echo);
    if (!os) throw IoError(sibling, "write failed");
}

DistributionReport load_results(const std::filesystem::path& path) {
    auto is = open_in(path);
    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(is);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(0, "json", e.what());
        }
        return report_from_json(j);
    }
    DistributionReport out;
    std::stringstream buf;
    buf << is.rdbuf();
    const std::string text = buf.str();
    if (text.rfind("# {", 0) == 0) {
        const auto echo = nlohmann::json::parse(text.substr(2, text.find('\n') - 2), nullptr, false);
        if (echo.is_discarded()) throw ParseError(1, "config", "malformed config echo");
        out.config = config_from_json(echo);
    }
    std::istringstream body(text);
    const auto rows = read_records_csv(body);
    out.records = from_rows(rows);
    const auto sibling = cdf_sibling(path);
    if (std::filesystem::exists(sibling)) {
        auto cs = open_in(sibling);
        out.comparisons = read_cdf_csv(cs);
    }
    return out;
}

}  // namespace aprand
