// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aprand/apscan.hpp"
#include "aprand/chenstein.hpp"
#include "aprand/experiments.hpp"
#include "aprand/limitlaw.hpp"
#include "aprand/parallel.hpp"
#include "aprand/results_io.hpp"
#include "aprand/rngword.hpp"

using namespace aprand;

namespace {

const std::size_t kWorkers = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string describe_rows(const CdfComparison& c, double z, double slack) {
    std::ostringstream os;
    os << to_string(c.stat) << "@n=" << c.n << " ks=" << fmt("%.4f", c.ks);
    for (const CdfRow& r : c.rows) {
        const double allowed = z * r.stderr_ + slack;
        if (std::abs(r.empirical - r.predicted) > allowed) {
            os << " [t=" << r.threshold << " emp=" << fmt("%.4f", r.empirical) << " pred=" << fmt("%.4f", r.predicted)
               << " allowed=" << fmt("%.4f", allowed) << "]";
        }
    }
    return os.str();
}

// 1 ---------------------------------------------------------------------------
Outcome oracle_equivalence() {
    Outcome o;
    for (std::size_t n : {16u, 64u, 128u, 1024u}) {
        std::atomic<std::size_t> mismatches{0};
        parallel_for(200, kWorkers, [&](std::size_t t) {
            const BinaryWord w = generate_word({101, t}, n);
            if (!(max_w(w) == max_w_naive(w)) || !(max_u(w) == max_u_naive(w))) ++mismatches;
        });
        o.require(mismatches == 0, "n=" + std::to_string(n) + " mismatches=" + std::to_string(mismatches.load()));
    }
    return o;
}

// 2, 3 ------------------------------------------------------------------------
DistributionReport law_run(StatSelection stats, std::vector<std::size_t> ns, std::size_t trials) {
    ExperimentConfig c;
    c.master = 20240611;
    c.ns = std::move(ns);
    c.trials = trials;
    c.stats = stats;
    c.x_lo = -2.0;
    c.x_hi = 4.0;
    c.workers = kWorkers;
    return run_distribution(c);
}

Outcome limit_law_w() {
    Outcome o;
    const auto report = law_run(StatSelection::W, {1 << 10, 1 << 12}, 5000);
    for (const CdfComparison& c : report.comparisons) o.require(c.within(3.0, 0.02), describe_rows(c, 3.0, 0.02));
    return o;
}

Outcome limit_law_u() {
    Outcome o;
    const auto report = law_run(StatSelection::U, {1 << 10, 1 << 12}, 5000);
    for (const CdfComparison& c : report.comparisons) o.require(c.within(3.0, 0.02), describe_rows(c, 3.0, 0.02));

    const auto big = law_run(StatSelection::U, {1 << 14}, 1000);
    for (std::size_t n : {std::size_t{1} << 10, std::size_t{1} << 12, std::size_t{1} << 14}) {
        const auto& records = n == (1 << 14) ? big.records : report.records;
        std::vector<std::size_t> values;
        for (const RunRecord& r : records) {
            if (r.n == n) values.push_back(r.u->value);
        }
        const double median = static_cast<double>(sample_median(values));
        const double centre = centering_for_u(n);
        o.require(std::abs(median - centre) <= 2.0,
                  "median U@n=" + std::to_string(n) + " " + fmt("%.0f", median) + " vs centering " + fmt("%.3f", centre));
    }
    return o;
}

// 4 ---------------------------------------------------------------------------
Outcome chen_stein_chain() {
    Outcome o;
    for (std::size_t n : {32u, 64u, 128u}) {
        const double x = 0.0;
        const double eps = 0.1;
        const auto bound = b1_b2_paper_bound(n, x, eps);
        const auto exact = b1_b2_exact(n, x, eps, IntersectionMode::integer);
        o.require(exact.b1 <= bound.b1 && exact.b2 <= bound.b2,
                  "n=" + std::to_string(n) + " exact B1=" + fmt("%.3g", exact.b1) + " B2=" + fmt("%.3g", exact.b2) +
                      " bound B1=" + fmt("%.3g", bound.b1) + " B2=" + fmt("%.3g", bound.b2));

        const auto residue = b1_b2_exact(n, x, eps, IntersectionMode::residue);
        const ThresholdSpec spec(n, x);
        const TruncationParams params(n, eps);
        const std::size_t trials = 100'000;
        std::vector<char> zero(trials, 0);
        parallel_for(trials, kWorkers, [&](std::size_t t) {
            zero[t] = s_count(generate_word({4040 + n, t}, n), spec, params) == 0;
        });
        const double p0 = static_cast<double>(std::count(zero.begin(), zero.end(), 1)) / trials;
        const double se = std::sqrt(p0 * (1 - p0) / trials);
        const double gap = std::abs(p0 - std::exp(-lambda_exact_w(n, x)));
        const double allowed = residue.b1 + residue.b2 + 4 * se;
        o.require(gap <= allowed, "n=" + std::to_string(n) + " |P(S=0)-e^-lambda|=" + fmt("%.4f", gap) +
                                      " <= " + fmt("%.4f", allowed));
    }
    return o;
}

// 5 ---------------------------------------------------------------------------
Outcome d_bounds() {
    Outcome o;
    for (std::size_t n : {24u, 64u, 100u, 151u, 200u}) {
        const TruncationParams params(n, 0.1);
        const std::size_t M = params.M();
        std::atomic<std::size_t> over{0};
        std::atomic<std::size_t> nonzero_tail{0};
        parallel_for(n, kWorkers, [&](std::size_t si) {
            const std::size_t s = si + 1;
            for (std::size_t p = 1; p <= n; ++p) {
                const auto table = count_D_table(s, p, params, IntersectionMode::integer);
                for (std::size_t k = 1; k < table.size(); ++k) {
                    if (table[k] > d_bound(params, k)) ++over;
                    if (2 * k > M + 2 && table[k] != 0) ++nonzero_tail;
                }
            }
        });
        o.require(over == 0 && nonzero_tail == 0, "n=" + std::to_string(n) + " M=" + std::to_string(M) +
                                                     " over=" + std::to_string(over.load()) +
                                                     " tail=" + std::to_string(nonzero_tail.load()));
    }
    return o;
}

// 6 ---------------------------------------------------------------------------
Outcome first_moments() {
    Outcome o;
    {
        const std::size_t n = 1024;
        const ThresholdSpec spec(n, 0.0);
        const TruncationParams params(n, 0.1);
        const std::size_t trials = 10'000;
        std::vector<double> s(trials);
        parallel_for(trials, kWorkers, [&](std::size_t t) {
            s[t] = static_cast<double>(s_count(generate_word({6060, t}, n), spec, params));
        });
        double mean = 0;
        for (double v : s) mean += v;
        mean /= trials;
        double var = 0;
        for (double v : s) var += (v - mean) * (v - mean);
        var /= trials - 1;
        const double se = std::sqrt(var / trials);
        const double target = lambda_exact_w(n, 0.0);
        o.require(std::abs(mean - target) <= 3 * se,
                  "S mean " + fmt("%.4f", mean) + " vs " + fmt("%.5f", target) + " (SE " + fmt("%.4f", se) + ")");
    }
    {
        const auto r = second_moment_report(200, 512, 0.5, 7070, kWorkers);
        const double target = expected_lambda_n(512, 0.5);
        o.require(std::abs(r.mean - target) <= 3 * r.se_mean, "Lambda mean " + fmt("%.4f", r.mean) + " vs " +
                                                                 fmt("%.4f", target) + " (SE " + fmt("%.4f", r.se_mean) +
                                                                 ")");
    }
    const double ratio = lambda_exact_w(1024, 0.0) / lambda_paper(1024, 0.0);
    o.require(ratio == 1008.0 / 1024.0, "exact/uniform ratio " + fmt("%.6f", ratio));
    return o;
}

// 7 ---------------------------------------------------------------------------
Outcome second_moment() {
    Outcome o;
    const auto r = second_moment_report(200, 512, 0.5, 7070, kWorkers);
    o.require(r.chebyshev_holds(4.0), "P(Lambda=0)=" + fmt("%.3f", r.p_zero) + " <= " + fmt("%.3f", r.chebyshev) +
                                          " + 4*" + fmt("%.3f", r.combined_error));

    std::vector<std::size_t> cps;
    for (unsigned e = 6; e <= 14; ++e) cps.push_back(std::size_t{1} << e);
    std::vector<char> above(20, 0);
    parallel_for(20, kWorkers, [&](std::size_t t) {
        const auto traj = run_nested_trajectory({2024, t}, cps);
        double w = 0;
        double u = 0;
        for (const auto& pt : traj) {
            w = std::max(w, pt.w_ratio);
            u = std::max(u, pt.u_ratio);
        }
        above[t] = w > u;
    });
    const auto wins = std::count(above.begin(), above.end(), 1);
    o.require(wins > 10, "max W-ratio > max U-ratio in " + std::to_string(wins) + "/20 seeds");
    return o;
}

// 8 ---------------------------------------------------------------------------
Outcome monotone_u() {
    Outcome o;
    std::atomic<std::size_t> drops{0};
    parallel_for(100, kWorkers, [&](std::size_t t) {
        const BinaryWord stream = generate_word({8080, t}, 512);
        std::size_t prev = 0;
        for (std::size_t n = 1; n <= 512; ++n) {
            const std::size_t u = max_u(stream.prefix(n)).value;
            if (u < prev) ++drops;
            prev = u;
        }
    });
    o.require(drops == 0, "decreases=" + std::to_string(drops.load()) + " over 100 streams, N<=512");
    return o;
}

// 9 ---------------------------------------------------------------------------
std::string experiment_bytes(std::size_t workers) {
    ExperimentConfig c;
    c.master = 9090;
    c.ns = {64, 300};
    c.trials = 400;
    c.workers = workers;
    const auto report = run_distribution(c);
    std::ostringstream os;
    os << report_to_json(report).dump() << '\n';
    write_records_csv(os, to_rows(report.records), config_to_json(c));
    write_cdf_csv(os, report.comparisons, config_to_json(c));
    const auto lattice = second_moment_report(40, 64, 0.5, 9090, workers);
    for (auto v : lattice.values) os << v << ',';
    os << format_double(lattice.mean) << ',' << format_double(lattice.variance) << ','
       << format_double(lattice.se_chebyshev) << '\n';
    return os.str();
}

Outcome reproducibility() {
    Outcome o;
    const std::string one = experiment_bytes(1);
    for (std::size_t w : {4u, 8u}) {
        o.require(experiment_bytes(w) == one, "workers=" + std::to_string(w) + " identical to workers=1");
    }
    o.require(experiment_bytes(1) == one, "rerun identical");
    return o;
}

}  // namespace

// Optional arguments select criteria by number, e.g. `acceptance 2 9`.
int main(int argc, char** argv) {
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::stoul(argv[i]));
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"limit law for W", limit_law_w},
        {"limit law for U", limit_law_u},
        {"Chen-Stein bound chain", chen_stein_chain},
        {"D-count bounds", d_bounds},
        {"first moments", first_moments},
        {"second-moment dichotomy", second_moment},
        {"monotonicity of U", monotone_u},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    int ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), i + 1) == selected.end()) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
