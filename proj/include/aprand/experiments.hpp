#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aprand/apscan.hpp"
#include "aprand/limitlaw.hpp"
#include "aprand/rngword.hpp"

namespace aprand {

enum class StatSelection { W, U, both };

std::string to_string(StatSelection sel);
StatSelection selection_from_string(std::string_view name);

struct ExperimentConfig {
    std::uint64_t master = 1;
    std::vector<std::size_t> ns;
    std::size_t trials = 1;
    StatSelection stats = StatSelection::both;
    double x_lo = -2.0;
    double x_hi = 4.0;
    double eps = 0.1;
    double beta = 0.5;
    std::size_t workers = 1;
    std::string output;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    bool wants(Statistic stat) const noexcept;
};

struct RunRecord {
    std::uint64_t trial = 0;
    std::size_t n = 0;
    std::optional<ApResult> w;
    std::optional<ApResult> u;
    std::uint64_t seed = 0;  // derive_trial_seed({master, trial})

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct DistributionReport {
    ExperimentConfig config;
    std::vector<RunRecord> records;            // ordered by (trial, n)
    std::vector<CdfComparison> comparisons;    // ordered by (n, stat)
};

/// Draws every (n, trial) word from (master, trial), scans W and/or U, and
/// compares empirical CDFs with the limit law. Output is independent of workers.
DistributionReport run_distribution(const ExperimentConfig& config);

/// One record computed directly, for composition checks.
RunRecord run_single(std::uint64_t master, std::uint64_t trial, std::size_t n, StatSelection stats);

struct TrajectoryPoint {
    std::size_t N = 0;
    std::size_t U = 0;
    std::size_t W = 0;
    double u_ratio = 0.0;  // U / (C ln N)
    double w_ratio = 0.0;  // W / (C ln N)
};

/// Grows one word per stream through the strictly increasing checkpoints and
/// records both statistics at each.
std::vector<TrajectoryPoint> run_nested_trajectory(const StreamSeed& seed, std::span<const std::size_t> checkpoints);

/// Lattice N in [n, 2n], s in [1, N], p in [ceil(N/6), floor(N/5)] with run requirement
/// M_N = ceil((2 + beta) log2 N).
struct LatticeSpec {
    std::size_t n = 0;
    double beta = 0.5;

    LatticeSpec(std::size_t n_, double beta_);

    std::size_t M_N(std::size_t N) const;
    static std::size_t p_min(std::size_t N) noexcept { return (N + 5) / 6; }
    static std::size_t p_max(std::size_t N) noexcept { return N / 5; }
    bool contains(std::size_t s, std::size_t p, std::size_t N) const noexcept;
};

/// 1 iff xi_s = 0 and xi at pos(s, i, p, N) is 1 for i = 1..M_N, on the first N
/// bits of `stream`. Throws std::out_of_range for triples outside the lattice.
int indicator_I_spN(const BinaryWord& stream, std::size_t s, std::size_t p, std::size_t N, const LatticeSpec& spec);

inline constexpr std::size_t kLambdaCap = 2048;

/// Sum of indicator_I_spN over the lattice. `stream` must hold at least 2n bits.
std::size_t lambda_n(const BinaryWord& stream, const LatticeSpec& spec, std::size_t cap = kLambdaCap);

/// Exact E[Lambda(n)].
double expected_lambda_n(std::size_t n, double beta);

struct SecondMomentReport {
    std::size_t streams = 0;
    std::size_t n = 0;
    double beta = 0.0;
    std::uint64_t master = 0;
    std::vector<std::size_t> values;  // Lambda(n) per stream, in stream order
    double mean = 0.0;
    double variance = 0.0;   // unbiased sample variance
    double p_zero = 0.0;     // fraction of streams with Lambda(n) = 0
    double chebyshev = 0.0;  // variance / mean^2
    double se_mean = 0.0;
    double se_p_zero = 0.0;
    double se_chebyshev = 0.0;  // jackknife
    double combined_error = 0.0;

    /// p_zero <= chebyshev + z * combined_error
    bool chebyshev_holds(double z) const;
};

/// Lambda(n) over `streams` independent streams (master, 0..streams-1).
SecondMomentReport second_moment_report(std::size_t streams, std::size_t n, double beta, std::uint64_t master,
                                        std::size_t workers = 1);

}  // namespace aprand
