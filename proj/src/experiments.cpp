#include "aprand/experiments.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "aprand/chenstein.hpp"
#include "aprand/packed_scan.hpp"
#include "aprand/parallel.hpp"

namespace aprand {

std::string to_string(StatSelection sel) {
    switch (sel) {
        case StatSelection::W: return "W";
        case StatSelection::U: return "U";
        case StatSelection::both: return "both";
    }
    return "both";
}

StatSelection selection_from_string(std::string_view name) {
    if (name == "W" || name == "w") return StatSelection::W;
    if (name == "U" || name == "u") return StatSelection::U;
    if (name == "both") return StatSelection::both;
    throw std::invalid_argument("statistic selection must be W, U or both");
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (ns.empty()) throw std::invalid_argument("at least one n is required");
    for (const auto n : ns) {
        if (n < 2) throw std::invalid_argument("every n must be >= 2");
    }
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (!(x_lo <= x_hi)) throw std::invalid_argument("x window must satisfy x_lo <= x_hi");
}

bool ExperimentConfig::wants(Statistic stat) const noexcept {
    if (stats == StatSelection::both) return true;
    return (stat == Statistic::W) == (stats == StatSelection::W);
}

RunRecord run_single(std::uint64_t master, std::uint64_t trial, std::size_t n, StatSelection stats) {
    const StreamSeed seed{master, trial};
    const BinaryWord word = generate_word(seed, n);
    RunRecord r;
    r.trial = trial;
    r.n = n;
    r.seed = derive_trial_seed(seed);
    if (stats != StatSelection::U) r.w = max_w_packed(word);
    if (stats != StatSelection::W) r.u = max_u_packed(word);
    return r;
}

DistributionReport run_distribution(const ExperimentConfig& config) {
    config.validate();
    DistributionReport report;
    report.config = config;
    const std::size_t per_trial = config.ns.size();
    report.records.resize(config.trials * per_trial);
    parallel_for(report.records.size(), config.workers, [&](std::size_t i) {
        report.records[i] = run_single(config.master, i / per_trial, config.ns[i % per_trial], config.stats);
    });

    for (std::size_t ni = 0; ni < per_trial; ++ni) {
        const std::size_t n = config.ns[ni];
        for (const Statistic stat : {Statistic::W, Statistic::U}) {
            if (!config.wants(stat)) continue;
            std::vector<std::size_t> samples;
            samples.reserve(config.trials);
            for (std::size_t t = 0; t < config.trials; ++t) {
                const RunRecord& r = report.records[t * per_trial + ni];
                samples.push_back(stat == Statistic::W ? r.w->value : r.u->value);
            }
            const auto thresholds = thresholds_for(stat, n, config.x_lo, config.x_hi);
            CdfComparison cmp = empirical_cdf(samples, thresholds, [&](long t) { return predicted_cdf(stat, n, t).cdf; });
            cmp.n = n;
            cmp.stat = stat;
            report.comparisons.push_back(std::move(cmp));
        }
    }
    return report;
}

std::vector<TrajectoryPoint> run_nested_trajectory(const StreamSeed& seed, std::span<const std::size_t> checkpoints) {
    if (checkpoints.empty()) throw std::invalid_argument("at least one checkpoint is required");
    if (checkpoints.front() < 2) throw std::invalid_argument("checkpoints must be >= 2");
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
        if (checkpoints[i] <= checkpoints[i - 1]) throw std::invalid_argument("checkpoints must be strictly increasing");
    }
    std::vector<TrajectoryPoint> out;
    out.reserve(checkpoints.size());
    BinaryWord word;
    for (const std::size_t N : checkpoints) {
        word = extend_word(word, seed, N);
        TrajectoryPoint pt;
        pt.N = N;
        pt.W = max_w_packed(word).value;
        pt.U = max_u_packed(word).value;
        const double c = centering_w(N);
        pt.w_ratio = static_cast<double>(pt.W) / c;
        pt.u_ratio = static_cast<double>(pt.U) / c;
        out.push_back(pt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lattice statistic

LatticeSpec::LatticeSpec(std::size_t n_, double beta_) : n(n_), beta(beta_) {
    if (n < 2) throw std::invalid_argument("lattice requires n >= 2");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
}

std::size_t LatticeSpec::M_N(std::size_t N) const {
    return static_cast<std::size_t>(std::ceil((2.0 + beta) * std::log2(static_cast<double>(N))));
}

bool LatticeSpec::contains(std::size_t s, std::size_t p, std::size_t N) const noexcept {
    return N >= n && N <= 2 * n && s >= 1 && s <= N && p >= p_min(N) && p <= p_max(N);
}

int indicator_I_spN(const BinaryWord& stream, std::size_t s, std::size_t p, std::size_t N, const LatticeSpec& spec) {
    if (!spec.contains(s, p, N)) throw std::out_of_range("(s, p, N) outside the lattice");
    if (stream.size() < N) throw std::invalid_argument("stream shorter than N");
    if (stream[s] != 0) return 0;
    const std::size_t m = spec.M_N(N);
    std::size_t at = s;
    for (std::size_t i = 1; i <= m; ++i) {
        at += p;
        if (at > N) at -= N;
        if (stream[at] == 0) return 0;
    }
    return 1;
}

std::size_t lambda_n(const BinaryWord& stream, const LatticeSpec& spec, std::size_t cap) {
    if (spec.n > cap) throw std::invalid_argument("lambda_n limited to n <= " + std::to_string(cap));
    if (stream.size() < 2 * spec.n) throw std::invalid_argument("stream must hold at least 2n bits");
    std::size_t total = 0;
    for (std::size_t N = spec.n; N <= 2 * spec.n; ++N) {
        const std::size_t lo = LatticeSpec::p_min(N);
        const std::size_t hi = LatticeSpec::p_max(N);
        if (lo > hi) continue;
        const PackedScanner scan(stream.prefix(N), ApMode::wrapped);
        const std::size_t m = spec.M_N(N);
        for (std::size_t p = lo; p <= hi; ++p) total += scan.count_at_least(p, m);
    }
    return total;
}

double expected_lambda_n(std::size_t n, double beta) {
    const LatticeSpec spec(n, beta);
    double total = 0.0;
    for (std::size_t N = n; N <= 2 * n; ++N) {
        const std::size_t m = spec.M_N(N);
        std::size_t live = 0;
        for (std::size_t p = LatticeSpec::p_min(N); p <= LatticeSpec::p_max(N); ++p) {
            if (N / std::gcd(N, p) >= m + 1) ++live;
        }
        total += std::ldexp(static_cast<double>(N * live), -static_cast<int>(m + 1));
    }
    return total;
}

bool SecondMomentReport::chebyshev_holds(double z) const { return p_zero <= chebyshev + z * combined_error; }

SecondMomentReport second_moment_report(std::size_t streams, std::size_t n, double beta, std::uint64_t master,
                                        std::size_t workers) {
    if (streams < 2) throw std::invalid_argument("second moment report needs at least 2 streams");
    const LatticeSpec spec(n, beta);
    SecondMomentReport r;
    r.streams = streams;
    r.n = n;
    r.beta = beta;
    r.master = master;
    r.values.resize(streams);
    parallel_for(streams, workers, [&](std::size_t i) {
        r.values[i] = lambda_n(generate_word(StreamSeed{master, i}, 2 * n), spec);
    });

    const double S = static_cast<double>(streams);
    double s1 = 0.0;
    double s2 = 0.0;
    std::size_t zeros = 0;
    for (const auto v : r.values) {
        const double x = static_cast<double>(v);
        s1 += x;
        s2 += x * x;
        if (v == 0) ++zeros;
    }
    r.mean = s1 / S;
    r.variance = (s2 - S * r.mean * r.mean) / (S - 1.0);
    r.p_zero = static_cast<double>(zeros) / S;
    r.chebyshev = r.mean > 0.0 ? r.variance / (r.mean * r.mean) : std::numeric_limits<double>::infinity();
    r.se_mean = std::sqrt(r.variance / S);
    r.se_p_zero = std::sqrt(r.p_zero * (1.0 - r.p_zero) / S);

    // Jackknife over leave-one-out Var / mean^2; needs three streams for a leave-one-out variance.
    if (streams >= 3 && r.mean > 0.0) {
        std::vector<double> loo;
        loo.reserve(streams);
        for (const auto v : r.values) {
            const double x = static_cast<double>(v);
            const double m = (s1 - x) / (S - 1.0);
            const double var = ((s2 - x * x) - (S - 1.0) * m * m) / (S - 2.0);
            if (m > 0.0) loo.push_back(var / (m * m));
        }
        if (loo.size() == streams) {
            const double avg = std::accumulate(loo.begin(), loo.end(), 0.0) / S;
            double ss = 0.0;
            for (const double l : loo) ss += (l - avg) * (l - avg);
            r.se_chebyshev = std::sqrt((S - 1.0) / S * ss);
        } else {
            r.se_chebyshev = std::numeric_limits<double>::infinity();
        }
    }
    r.combined_error = std::sqrt(r.se_p_zero * r.se_p_zero + r.se_chebyshev * r.se_chebyshev);
    return r;
}

}  // namespace aprand
