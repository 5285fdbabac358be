#include "aprand/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aprand/chenstein.hpp"

namespace aprand {

std::string_view to_string(Statistic stat) noexcept { return stat == Statistic::W ? "W" : "U"; }

Statistic statistic_from_string(std::string_view name) {
    if (name == "W" || name == "w") return Statistic::W;
    if (name == "U" || name == "u") return Statistic::U;
    throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

double lambda_of(double x) { return std::exp2(-(x + 2.0)); }

double centering_for_w(std::size_t n) { return centering_w(n); }

double centering_for_u(std::size_t n) {
    const double c = centering_w(n);
    return c - std::log2(2.0 * c);
}

double centering_for(Statistic stat, std::size_t n) {
    return stat == Statistic::W ? centering_for_w(n) : centering_for_u(n);
}

LimitPrediction predicted_cdf(Statistic stat, std::size_t n, long t) {
    if (t < 1) throw std::invalid_argument("threshold must be >= 1");
    LimitPrediction out;
    out.n = n;
    out.stat = stat;
    out.threshold = t;
    out.x = static_cast<double>(t) - centering_for(stat, n);
    out.lambda = lambda_of(out.x);
    out.cdf = std::exp(-out.lambda);
    return out;
}

LimitPrediction predicted_cdf_w(std::size_t n, long t) { return predicted_cdf(Statistic::W, n, t); }

LimitPrediction predicted_cdf_u(std::size_t n, long t) { return predicted_cdf(Statistic::U, n, t); }

std::vector<long> thresholds_for(Statistic stat, std::size_t n, double x_lo, double x_hi) {
    if (x_lo > x_hi) throw std::invalid_argument("empty offset window");
    const double c = centering_for(stat, n);
    // Round-trip guard: for powers of two the centering is integral and the
    // window ends must be hit exactly.
    const long lo = std::max(1L, static_cast<long>(std::ceil(c + x_lo - 1e-9)));
    const long hi = static_cast<long>(std::floor(c + x_hi + 1e-9));
    std::vector<long> out;
    for (long t = lo; t <= hi; ++t) out.push_back(t);
    return out;
}

bool CdfComparison::within(double z, double slack) const {
    return std::all_of(rows.begin(), rows.end(), [&](const CdfRow& r) {
        return std::abs(r.empirical - r.predicted) <= z * r.stderr_ + slack;
    });
}

CdfComparison empirical_cdf(std::span<const std::size_t> samples, std::span<const long> thresholds,
                            const CdfPredictor& predictor) {
    if (samples.empty()) throw std::invalid_argument("empirical_cdf needs at least one sample");
    std::vector<std::size_t> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double trials = static_cast<double>(sorted.size());

    CdfComparison out;
    for (const long t : thresholds) {
        CdfRow row;
        row.threshold = t;
        row.trials = sorted.size();
        const auto below = t < 0 ? sorted.begin()
                                 : std::upper_bound(sorted.begin(), sorted.end(), static_cast<std::size_t>(t));
        row.empirical = static_cast<double>(below - sorted.begin()) / trials;
        row.stderr_ = std::sqrt(row.empirical * (1.0 - row.empirical) / trials);
        row.predicted = predictor(t);
        out.ks = std::max(out.ks, std::abs(row.empirical - row.predicted));
        out.rows.push_back(row);
    }
    return out;
}

std::size_t sample_median(std::span<const std::size_t> samples) {
    if (samples.empty()) throw std::invalid_argument("median of an empty sample");
    std::vector<std::size_t> v(samples.begin(), samples.end());
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

}  // namespace aprand
