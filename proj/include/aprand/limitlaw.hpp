#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace aprand {

enum class Statistic { W, U };

std::string_view to_string(Statistic stat) noexcept;
Statistic statistic_from_string(std::string_view name);

/// 2^-(x+2)
double lambda_of(double x);

/// Centering of W^(N): C ln n = 2 log2 n.
double centering_for_w(std::size_t n);

/// Centering of U^(N): C ln n - log2(2 C ln n). The inner log is natural, the outer base 2.
double centering_for_u(std::size_t n);

double centering_for(Statistic stat, std::size_t n);

/// Limit-law prediction for P(stat <= threshold).
struct LimitPrediction {
    std::size_t n = 0;
    Statistic stat = Statistic::W;
    long threshold = 0;
    double x = 0.0;       // threshold minus centering
    double lambda = 0.0;  // 2^-(x+2)
    double cdf = 0.0;     // exp(-lambda) = P(Poisson(lambda) = 0)
};

/// Threshold t >= 1; throws std::invalid_argument otherwise.
LimitPrediction predicted_cdf_w(std::size_t n, long t);
LimitPrediction predicted_cdf_u(std::size_t n, long t);
LimitPrediction predicted_cdf(Statistic stat, std::size_t n, long t);

/// Integer thresholds t with x_lo <= t - centering <= x_hi, ascending, all >= 1.
std::vector<long> thresholds_for(Statistic stat, std::size_t n, double x_lo, double x_hi);

struct CdfRow {
    long threshold = 0;
    double empirical = 0.0;
    double predicted = 0.0;
    double stderr_ = 0.0;  // sqrt(p (1 - p) / trials)
    std::size_t trials = 0;
};

struct CdfComparison {
    std::size_t n = 0;
    Statistic stat = Statistic::W;
    std::vector<CdfRow> rows;
    double ks = 0.0;  // max |empirical - predicted| over rows

    /// Every row within z * stderr + slack of its prediction.
    bool within(double z, double slack) const;
};

using CdfPredictor = std::function<double(long threshold)>;

/// Empirical P(value <= t) per threshold against `predictor`. Throws on empty samples.
CdfComparison empirical_cdf(std::span<const std::size_t> samples, std::span<const long> thresholds,
                            const CdfPredictor& predictor);

/// Median of an integer sample (lower median for even sizes).
std::size_t sample_median(std::span<const std::size_t> samples);

}  // namespace aprand
