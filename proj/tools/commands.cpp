#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aprand/apscan.hpp"
#include "aprand/chenstein.hpp"
#include "aprand/experiments.hpp"
#include "aprand/limitlaw.hpp"
#include "aprand/parallel.hpp"
#include "aprand/results_io.hpp"
#include "aprand/rngword.hpp"

namespace aprand::cli {

namespace {

using nlohmann::json;

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> seed_from_env() {
    const char* v = std::getenv("AP_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const auto seed = std::stoull(v, &used, 0);
        if (used != std::string_view(v).size()) throw std::invalid_argument("trailing characters");
        return seed;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("AP_SEED is not an unsigned integer: '") + v + "'");
    }
}

// Flag beats environment beats the built-in default.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value, std::uint64_t fallback) {
    if (flag->count() > 0) return flag_value;
    if (auto env = seed_from_env()) return *env;
    return fallback;
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(path, "cannot open for writing");
    os << text;
    if (!os) throw IoError(path, "write failed");
}

json witness_json(const ApResult& r) {
    if (!r.witness) return nullptr;
    return {{"s", r.witness->s}, {"p", r.witness->p}, {"k", r.witness->k}};
}

json read_json_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(path, "cannot open for reading");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ParseError(0, "json", e.what());
    }
}

// ---------------------------------------------------------------------------
// gen

struct GenOpts {
    CLI::Option* seed_opt = nullptr;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::size_t n = 0;
    std::string format = "bits";
    std::string out;
};

void cmd_gen(const GenOpts& o, std::ostream& out) {
    const StreamSeed seed{resolve_seed(o.seed_opt, o.seed, 0), o.trial};
    const BinaryWord w = generate_word(seed, o.n);
    if (w.empty()) {
        emit(out, o.out, "");
        return;
    }
    emit(out, o.out, (o.format == "hex" ? w.to_hex() : w.to_bits()) + "\n");
}

// ---------------------------------------------------------------------------
// stat

struct StatOpts {
    CLI::Option* seed_opt = nullptr;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::size_t n = 0;
    std::string word;
    bool naive = false;
    std::string out;
};

void cmd_stat(const StatOpts& o, std::ostream& out) {
    BinaryWord w;
    json config;
    if (!o.word.empty()) {
        w = BinaryWord::from_bits(o.word);
        config = {{"word", o.word}};
    } else {
        if (o.n < 1) throw std::invalid_argument("stat needs --word or --n >= 1");
        const StreamSeed seed{resolve_seed(o.seed_opt, o.seed, 0), o.trial};
        w = generate_word(seed, o.n);
        config = {{"seed", seed.master}, {"trial", seed.trial}, {"n", o.n}};
    }
    const ApResult rw = o.naive ? max_w_naive(w) : max_w(w);
    const ApResult ru = o.naive ? max_u_naive(w) : max_u(w);
    const json doc = {{"n", w.size()},          {"W", rw.value},      {"U", ru.value},
                      {"W_witness", witness_json(rw)}, {"U_witness", witness_json(ru)}, {"config", config}};
    emit(out, o.out, doc.dump() + "\n");
}

// ---------------------------------------------------------------------------
// dist

struct DistOpts {
    std::string config_path;
    CLI::Option* seed_opt = nullptr;
    std::uint64_t seed = 1;
    CLI::Option* ns_opt = nullptr;
    std::vector<std::size_t> ns;
    CLI::Option* trials_opt = nullptr;
    std::size_t trials = 1;
    CLI::Option* stats_opt = nullptr;
    std::string stats = "both";
    CLI::Option* xlo_opt = nullptr;
    double x_lo = -2.0;
    CLI::Option* xhi_opt = nullptr;
    double x_hi = 4.0;
    CLI::Option* workers_opt = nullptr;
    std::size_t workers = 1;
    CLI::Option* out_opt = nullptr;
    std::string out;
    std::string format = "csv";
    bool check = false;
    double z = 3.0;
    double slack = 0.02;
    double prediction_shift = 0.0;
};

ExperimentConfig effective_dist_config(const DistOpts& o) {
    ExperimentConfig c;
    if (auto env = seed_from_env()) c.master = *env;
    if (!o.config_path.empty()) c = config_from_json(read_json_file(o.config_path), c);
    if (o.seed_opt->count()) c.master = o.seed;
    if (o.ns_opt->count()) c.ns = o.ns;
    if (o.trials_opt->count()) c.trials = o.trials;
    if (o.stats_opt->count()) c.stats = selection_from_string(o.stats);
    if (o.xlo_opt->count()) c.x_lo = o.x_lo;
    if (o.xhi_opt->count()) c.x_hi = o.x_hi;
    if (o.workers_opt->count()) c.workers = o.workers;
    if (o.out_opt->count()) c.output = o.out;
    c.validate();
    return c;
}

void check_comparisons(std::span<const CdfComparison> comparisons, double z, double slack, std::ostream& err) {
    bool ok = true;
    for (const CdfComparison& c : comparisons) {
        for (const CdfRow& r : c.rows) {
            const double gap = std::abs(r.empirical - r.predicted);
            if (gap > z * r.stderr_ + slack) {
                ok = false;
                err << "check failed: n=" << c.n << " stat=" << to_string(c.stat) << " t=" << r.threshold
                    << " empirical=" << r.empirical << " predicted=" << r.predicted << " allowed=" << z * r.stderr_ + slack
                    << '\n';
            }
        }
    }
    if (!ok) throw CheckFailed("empirical CDF outside tolerance");
}

void cmd_dist(const DistOpts& o, std::ostream& out, std::ostream& err) {
    const ExperimentConfig config = effective_dist_config(o);
    DistributionReport report = run_distribution(config);
    if (o.prediction_shift != 0.0) {
        for (CdfComparison& c : report.comparisons) {
            for (CdfRow& r : c.rows) {
                const double x = static_cast<double>(r.threshold) - centering_for(c.stat, c.n) + o.prediction_shift;
                r.predicted = std::exp(-lambda_of(x));
            }
        }
    }
    if (!config.output.empty() && config.output != "-") {
        persist_results(report, config.output);
    } else if (o.format == "json") {
        out << report_to_json(report).dump(2) << '\n';
    } else {
        std::ostringstream os;
        write_cdf_csv(os, report.comparisons, config_to_json(config));
        out << os.str();
    }
    if (o.check) check_comparisons(report.comparisons, o.z, o.slack, err);
}

// ---------------------------------------------------------------------------
// chenstein

struct ChensteinOpts {
    std::size_t n = 64;
    double x = 0.0;
    double eps = 0.1;
    bool exact = false;
    std::string mode = "both";
    std::size_t trials = 0;
    CLI::Option* seed_opt = nullptr;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    bool check = false;
    std::string out;
};

json summary_json(const DependencySummary& d) {
    json j = {{"mode", to_string(d.mode)}, {"b1", d.b1}, {"b2", d.b2}, {"sum", d.b1 + d.b2}};
    return j;
}

void cmd_chenstein(const ChensteinOpts& o, std::ostream& out, std::ostream& err) {
    const TruncationParams params(o.n, o.eps);
    const ThresholdSpec spec(o.n, o.x);
    const DependencySummary bound = b1_b2_paper_bound(o.n, o.x, o.eps);
    const double lam = lambda_exact_w(o.n, o.x);
    json doc = {
        {"config", {{"n", o.n}, {"x", o.x}, {"eps", o.eps}, {"mode", o.mode}, {"trials", o.trials}}},
        {"M", params.M()},
        {"m_ones", spec.m_ones()},
        {"lambda_paper", lambda_paper(o.n, o.x)},
        {"lambda_exact", lam},
        {"bound", summary_json(bound)},
    };
    bool ok = true;
    std::optional<DependencySummary> residue;
    if (o.exact) {
        json exact = json::object();
        if (o.mode == "integer" || o.mode == "both") {
            const auto d = b1_b2_exact(o.n, o.x, o.eps, IntersectionMode::integer);
            json j = summary_json(d);
            j["b1_le_bound"] = d.b1 <= bound.b1;
            j["b2_le_bound"] = d.b2 <= bound.b2;
            ok = ok && d.b1 <= bound.b1 && d.b2 <= bound.b2;
            exact["integer"] = j;
        }
        if (o.mode == "residue" || o.mode == "both") {
            residue = b1_b2_exact(o.n, o.x, o.eps, IntersectionMode::residue);
            exact["residue"] = summary_json(*residue);
        }
        doc["exact"] = exact;
    }
    if (o.trials > 0) {
        const std::uint64_t master = resolve_seed(o.seed_opt, o.seed, 1);
        std::vector<char> zero(o.trials, 0);
        parallel_for(o.trials, o.workers, [&](std::size_t i) {
            const BinaryWord w = generate_word(StreamSeed{master, i}, o.n);
            zero[i] = s_count(w, spec, params) == 0;
        });
        std::size_t zeros = 0;
        for (const char z : zero) zeros += static_cast<std::size_t>(z);
        const double p0 = static_cast<double>(zeros) / static_cast<double>(o.trials);
        const double se = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(o.trials));
        json mc = {{"seed", master}, {"p_zero", p0}, {"stderr", se}, {"poisson_p_zero", std::exp(-lam)}};
        if (residue) {
            const double allowed = residue->b1 + residue->b2 + 4.0 * se;
            const bool holds = std::abs(p0 - std::exp(-lam)) <= allowed;
            mc["allowed"] = allowed;
            mc["agg_holds"] = holds;
            ok = ok && holds;
        }
        doc["monte_carlo"] = mc;
    }
    emit(out, o.out, doc.dump(2) + "\n");
    if (o.check && !ok) {
        err << "check failed: exact values exceed bounds or AGG inequality violated\n";
        throw CheckFailed("chenstein check");
    }
}

// ---------------------------------------------------------------------------
// nested

struct NestedOpts {
    CLI::Option* seed_opt = nullptr;
    std::uint64_t seed = 1;
    std::uint64_t trial = 0;
    std::size_t seeds = 1;
    std::vector<std::size_t> checkpoints;
    unsigned min_exp = 6;
    unsigned max_exp = 14;
    std::size_t workers = 1;
    std::string out;
};

void cmd_nested(const NestedOpts& o, std::ostream& out) {
    const std::uint64_t master = resolve_seed(o.seed_opt, o.seed, 1);
    std::vector<std::size_t> cps = o.checkpoints;
    if (cps.empty()) {
        if (o.min_exp < 1 || o.min_exp > o.max_exp || o.max_exp > 24) throw std::invalid_argument("bad exponent range");
        for (unsigned e = o.min_exp; e <= o.max_exp; ++e) cps.push_back(std::size_t{1} << e);
    }
    std::vector<std::vector<TrajectoryPoint>> runs(o.seeds);
    parallel_for(o.seeds, o.workers, [&](std::size_t i) {
        runs[i] = run_nested_trajectory(StreamSeed{master, o.trial + i}, cps);
    });
    std::ostringstream os;
    os << "# " << json{{"seed", master}, {"trial", o.trial}, {"seeds", o.seeds}, {"checkpoints", cps}}.dump() << '\n';
    os << "trial,N,U,W,u_ratio,w_ratio\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (const TrajectoryPoint& pt : runs[i]) {
            os << o.trial + i << ',' << pt.N << ',' << pt.U << ',' << pt.W << ',' << format_double(pt.u_ratio) << ','
               << format_double(pt.w_ratio) << '\n';
        }
    }
    emit(out, o.out, os.str());
}

// ---------------------------------------------------------------------------
// lattice

struct LatticeOpts {
    std::size_t n = 512;
    double beta = 0.5;
    std::size_t streams = 200;
    CLI::Option* seed_opt = nullptr;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    bool check = false;
    std::string out;
};

void cmd_lattice(const LatticeOpts& o, std::ostream& out, std::ostream& err) {
    const std::uint64_t master = resolve_seed(o.seed_opt, o.seed, 1);
    const SecondMomentReport r = second_moment_report(o.streams, o.n, o.beta, master, o.workers);
    const double expected = expected_lambda_n(o.n, o.beta);
    const bool mean_ok = std::abs(r.mean - expected) <= 3.0 * r.se_mean;
    const bool cheb_ok = r.chebyshev_holds(4.0);
    const json doc = {
        {"config", {{"n", o.n}, {"beta", o.beta}, {"streams", o.streams}, {"seed", master}}},
        {"expected", expected},
        {"mean", r.mean},
        {"variance", r.variance},
        {"se_mean", r.se_mean},
        {"p_zero", r.p_zero},
        {"chebyshev", r.chebyshev},
        {"combined_error", r.combined_error},
        {"mean_within_3se", mean_ok},
        {"chebyshev_holds", cheb_ok},
        {"values", r.values},
    };
    emit(out, o.out, doc.dump(2) + "\n");
    if (o.check && !(mean_ok && cheb_ok)) {
        err << "check failed: lattice first/second moment check\n";
        throw CheckFailed("lattice check");
    }
}

// ---------------------------------------------------------------------------
// report

struct ReportOpts {
    std::string in;
    bool check = false;
    double z = 3.0;
    double slack = 0.02;
    std::string out;
};

void cmd_report(const ReportOpts& o, std::ostream& out, std::ostream& err) {
    std::vector<CdfComparison> comparisons;
    const std::filesystem::path path(o.in);
    if (path.extension() == ".json") {
        comparisons = report_from_json(read_json_file(o.in)).comparisons;
    } else {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw IoError(path, "cannot open for reading");
        comparisons = read_cdf_csv(is);
    }
    std::ostringstream os;
    os << "n,stat,rows,ks,within\n";
    for (const CdfComparison& c : comparisons) {
        os << c.n << ',' << to_string(c.stat) << ',' << c.rows.size() << ',' << format_double(c.ks) << ','
           << (c.within(o.z, o.slack) ? "yes" : "no") << '\n';
    }
    emit(out, o.out, os.str());
    if (o.check) check_comparisons(comparisons, o.z, o.slack, err);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximal arithmetic progressions in random binary words"};
    app.require_subcommand(1);

    GenOpts gen;
    auto* g = app.add_subcommand("gen", "Dump the word generated from (seed, trial)");
    gen.seed_opt = g->add_option("--seed", gen.seed, "Master seed (default: $AP_SEED or 0)");
    g->add_option("--trial", gen.trial, "Trial index");
    g->add_option("--n", gen.n, "Word length")->required();
    g->add_option("--format", gen.format, "bits or hex")->check(CLI::IsMember({"bits", "hex"}));
    g->add_option("--out", gen.out, "Output file (default stdout)");

    StatOpts stat;
    auto* st = app.add_subcommand("stat", "Compute W^(N) and U^(N) with witnesses");
    stat.seed_opt = st->add_option("--seed", stat.seed, "Master seed (default: $AP_SEED or 0)");
    st->add_option("--trial", stat.trial, "Trial index");
    st->add_option("--n", stat.n, "Word length");
    st->add_option("--word", stat.word, "Explicit 0/1 word instead of a generated one");
    st->add_flag("--naive", stat.naive, "Use the brute-force oracle");
    st->add_option("--out", stat.out, "Output file (default stdout)");

    DistOpts dist;
    auto* d = app.add_subcommand("dist", "Empirical CDFs of W and U against the limit law");
    d->add_option("--config", dist.config_path, "JSON config file; flags override its values");
    dist.seed_opt = d->add_option("--seed", dist.seed, "Master seed (default: $AP_SEED or 1)");
    dist.ns_opt = d->add_option("--n", dist.ns, "Word lengths (repeatable)");
    dist.trials_opt = d->add_option("--trials", dist.trials, "Trials per n");
    dist.stats_opt = d->add_option("--stats", dist.stats, "W, U or both");
    dist.xlo_opt = d->add_option("--xmin", dist.x_lo, "Lowest offset from the centering");
    dist.xhi_opt = d->add_option("--xmax", dist.x_hi, "Highest offset from the centering");
    dist.workers_opt = d->add_option("--workers", dist.workers, "Worker threads");
    dist.out_opt = d->add_option("--out", dist.out, "Output path (.json or .csv)");
    d->add_option("--format", dist.format, "stdout format: csv or json")->check(CLI::IsMember({"csv", "json"}));
    d->add_flag("--check", dist.check, "Exit 3 unless every row is within z*SE + slack");
    d->add_option("--z", dist.z, "Standard errors allowed by --check");
    d->add_option("--slack", dist.slack, "Model slack allowed by --check");
    d->add_option("--prediction-shift", dist.prediction_shift, "Shift the predicted column by this offset (negative controls)");

    ChensteinOpts cs;
    auto* c = app.add_subcommand("chenstein", "Exact and bounded B1/B2, first moments, Poisson check");
    c->add_option("--n", cs.n, "Word length")->required();
    c->add_option("--x", cs.x, "Threshold offset");
    c->add_option("--eps", cs.eps, "Truncation epsilon");
    c->add_flag("--exact", cs.exact, "Enumerate exact B1/B2 (n <= 128)");
    c->add_option("--mode", cs.mode, "integer, residue or both")->check(CLI::IsMember({"integer", "residue", "both"}));
    c->add_option("--trials", cs.trials, "Monte Carlo trials for P(S(x) = 0)");
    cs.seed_opt = c->add_option("--seed", cs.seed, "Master seed (default: $AP_SEED or 1)");
    c->add_option("--workers", cs.workers, "Worker threads");
    c->add_flag("--check", cs.check, "Exit 3 when exact > bound or the AGG inequality fails");
    c->add_option("--out", cs.out, "Output file (default stdout)");

    NestedOpts nested;
    auto* ne = app.add_subcommand("nested", "W and U along one growing word per seed");
    nested.seed_opt = ne->add_option("--seed", nested.seed, "Master seed (default: $AP_SEED or 1)");
    ne->add_option("--trial", nested.trial, "First trial index");
    ne->add_option("--seeds", nested.seeds, "Number of consecutive trials");
    ne->add_option("--checkpoints", nested.checkpoints, "Explicit increasing lengths");
    ne->add_option("--min-exp", nested.min_exp, "Smallest checkpoint 2^k");
    ne->add_option("--max-exp", nested.max_exp, "Largest checkpoint 2^k");
    ne->add_option("--workers", nested.workers, "Worker threads");
    ne->add_option("--out", nested.out, "Output file (default stdout)");

    LatticeOpts lat;
    auto* la = app.add_subcommand("lattice", "Lattice exceedance count and second-moment report");
    la->add_option("--n", lat.n, "Lattice base n");
    la->add_option("--beta", lat.beta, "Exponent slack beta in (0, 1)");
    la->add_option("--streams", lat.streams, "Independent streams");
    lat.seed_opt = la->add_option("--seed", lat.seed, "Master seed (default: $AP_SEED or 1)");
    la->add_option("--workers", lat.workers, "Worker threads");
    la->add_flag("--check", lat.check, "Exit 3 when the moment checks fail");
    la->add_option("--out", lat.out, "Output file (default stdout)");

    ReportOpts rep;
    auto* r = app.add_subcommand("report", "Summarise or check a saved CDF table");
    r->add_option("--in", rep.in, "CDF CSV or report JSON")->required();
    r->add_flag("--check", rep.check, "Exit 3 unless every row is within z*SE + slack");
    r->add_option("--z", rep.z, "Standard errors allowed");
    r->add_option("--slack", rep.slack, "Model slack allowed");
    r->add_option("--out", rep.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (g->parsed()) cmd_gen(gen, out);
        if (st->parsed()) cmd_stat(stat, out);
        if (d->parsed()) cmd_dist(dist, out, err);
        if (c->parsed()) cmd_chenstein(cs, out, err);
        if (ne->parsed()) cmd_nested(nested, out);
        if (la->parsed()) cmd_lattice(lat, out, err);
        if (r->parsed()) cmd_report(rep, out, err);
    } catch (const CheckFailed& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

}  // namespace aprand::cli
