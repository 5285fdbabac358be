#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aprand/rngword.hpp"

namespace aprand {

/// C = 2 / ln 2, so C * ln n = 2 * log2(n).
inline constexpr double kC = 2.0 / std::numbers::ln2;

/// C * ln n, evaluated as 2 * log2(n) so powers of two give exact integers.
double centering_w(std::size_t n);

/// Exact non-negative dyadic rational num / 2^exp.
class Dyadic {
public:
    constexpr Dyadic() = default;
    constexpr Dyadic(unsigned __int128 num, int exp) : num_(num), exp_(exp) {}

    static constexpr Dyadic pow2_neg(int e) { return Dyadic(1, e); }

    unsigned __int128 numerator() const noexcept { return num_; }
    int exponent() const noexcept { return exp_; }
    bool is_zero() const noexcept { return num_ == 0; }

    long double value() const;

    Dyadic& operator+=(const Dyadic& other);
    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    /// Scales by an integer count.
    friend Dyadic operator*(Dyadic a, std::uint64_t c);

    friend bool operator==(const Dyadic& a, const Dyadic& b);
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

private:
    unsigned __int128 num_ = 0;
    int exp_ = 0;
};

/// Truncation length M = floor((C + eps) ln n); recomputed on every call.
struct TruncationParams {
    std::size_t n = 0;
    double eps = 0.1;

    TruncationParams(std::size_t n_, double eps_);

    std::size_t M() const;
};

/// Threshold C ln n + x resolved to the number of ones it requires.
struct ThresholdSpec {
    std::size_t n = 0;
    double x = 0.0;

    ThresholdSpec(std::size_t n_, double x_);

    /// floor(C ln n + x) + 1: a run exceeds the threshold iff it has at least this many ones.
    std::size_t m_ones() const;
};

enum class IntersectionMode { integer, residue };

std::string to_string(IntersectionMode mode);

/// {s + i p : i = 0..M} as integers, or its image in 1..n under pos().
class ProgressionSet {
public:
    ProgressionSet(std::size_t s, std::size_t p, std::size_t M, std::size_t n, IntersectionMode mode);

    /// Sorted, distinct.
    const std::vector<std::size_t>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    IntersectionMode mode() const noexcept { return mode_; }

    std::size_t intersection_size(const ProgressionSet& other) const;

private:
    std::vector<std::size_t> elements_;
    IntersectionMode mode_;
};

/// min(w_sp(w, s, p), M)
std::size_t truncated_w_sp(const BinaryWord& w, std::size_t s, std::size_t p, const TruncationParams& params);

/// 1 iff xi_s = 0 and pos(s, i, p, n) carries 1 for i = 1..m_ones.
/// Requires spec.x < eps ln n; throws std::domain_error otherwise.
int indicator(const BinaryWord& w, std::size_t s, std::size_t p, const ThresholdSpec& spec, const TruncationParams& params);

/// Sum of indicator() over all (s, p) in [1, n]^2.
std::size_t s_count(const BinaryWord& w, const ThresholdSpec& spec, const TruncationParams& params);

inline constexpr std::size_t kCountDCap = 512;
inline constexpr std::size_t kExactBCap = 128;

/// D_{s,p}(k) for every k in 0..M+1 at once: entry k counts pairs (t, q), q != p,
/// with |A(s,p) & A(t,q)| = k.
std::vector<std::uint64_t> count_D_table(std::size_t s, std::size_t p, const TruncationParams& params,
                                         IntersectionMode mode, std::size_t cap = kCountDCap);

std::uint64_t count_D(std::size_t s, std::size_t p, const TruncationParams& params, std::size_t k,
                      IntersectionMode mode, std::size_t cap = kCountDCap);

/// (M+1)^2 n for k = 1, (M+1)^2 M^2 for 2 <= k <= M/2 + 1, 0 beyond.
std::uint64_t d_bound(std::size_t n, std::size_t M, std::size_t k);
std::uint64_t d_bound(const TruncationParams& params, std::size_t k);

/// n^2 * 2^-floor(C ln n + x + 2)
double lambda_paper(std::size_t n, double x);

/// n * #{p : n / gcd(n, p) >= m_ones + 1} * 2^-(m_ones + 1); the exact E[S(x)].
double lambda_exact_w(std::size_t n, double x);
Dyadic lambda_exact_w_dyadic(std::size_t n, std::size_t m_ones);

/// 2^-(m_ones + 1) * sum_{p=1}^{floor((n-1)/m_ones)} (n - m_ones p)
double lambda_exact_u(std::size_t n, std::size_t m_ones);

/// E[I_{s,p}] for the wrapped indicator: 2^-(m+1) unless the progression revisits s.
Dyadic indicator_expectation(std::size_t p, std::size_t n, std::size_t m_ones);

/// Exact E[I_{s,p} I_{t,q}] for wrapped indicators of m_ones ones.
Dyadic joint_expectation(std::size_t s, std::size_t p, std::size_t t, std::size_t q, std::size_t n, std::size_t m_ones);

struct DependencySummary {
    enum class Kind { exact, paper_bound };

    std::size_t n = 0;
    double x = 0.0;
    double eps = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    Kind kind = Kind::exact;
    IntersectionMode mode = IntersectionMode::integer;
    std::size_t M = 0;
    std::size_t m_ones = 0;
    std::optional<Dyadic> b1_exact;
    std::optional<Dyadic> b2_exact;
};

/// Exact B1, B2 by enumeration of neighbour pairs. Neighbours share an element of
/// their progression sets. Integer mode uses {s+ip}_{i=0..M}; residue mode uses the
/// residues of {s+ip}_{i=0..max(M, m_ones)}, which always covers each indicator's support.
DependencySummary b1_b2_exact(std::size_t n, double x, double eps, IntersectionMode mode, std::size_t cap = kExactBCap);

/// Closed-form evaluation of the bound chains on B1 and B2.
DependencySummary b1_b2_paper_bound(std::size_t n, double x, double eps);

}  // namespace aprand
