#include "aprand/chenstein.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aprand/apscan.hpp"
#include "aprand/packed_scan.hpp"

namespace aprand {

double centering_w(std::size_t n) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    return 2.0 * std::log2(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Dyadic

long double Dyadic::value() const {
    // Split so the conversion keeps all 128 bits of the numerator.
    const auto hi = static_cast<std::uint64_t>(num_ >> 64);
    const auto lo = static_cast<std::uint64_t>(num_);
    return std::ldexp(static_cast<long double>(hi), 64 - exp_) + std::ldexp(static_cast<long double>(lo), -exp_);
}

namespace {

// Brings both operands to the larger exponent; numerators stay small in practice.
void align(Dyadic& a, Dyadic& b) {
    if (a.exponent() == b.exponent()) return;
    if (a.exponent() < b.exponent()) {
        a = Dyadic(a.numerator() << (b.exponent() - a.exponent()), b.exponent());
    } else {
        b = Dyadic(b.numerator() << (a.exponent() - b.exponent()), a.exponent());
    }
}

}  // namespace

Dyadic& Dyadic::operator+=(const Dyadic& other) {
    if (other.is_zero()) return *this;
    if (is_zero()) return *this = other;
    Dyadic b = other;
    align(*this, b);
    num_ += b.num_;
    return *this;
}

Dyadic operator*(Dyadic a, std::uint64_t c) {
    a.num_ *= c;
    return a;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    Dyadic x = a;
    Dyadic y = b;
    if (x.is_zero() || y.is_zero()) return x.num_ <=> y.num_;
    align(x, y);
    return x.num_ <=> y.num_;
}

bool operator==(const Dyadic& a, const Dyadic& b) { return (a <=> b) == std::strong_ordering::equal; }

// ---------------------------------------------------------------------------
// Parameters

TruncationParams::TruncationParams(std::size_t n_, double eps_) : n(n_), eps(eps_) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

std::size_t TruncationParams::M() const {
    return static_cast<std::size_t>(std::floor(centering_w(n) + eps * std::log(static_cast<double>(n))));
}

ThresholdSpec::ThresholdSpec(std::size_t n_, double x_) : n(n_), x(x_) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (centering_w(n) + x < 0.0) throw std::invalid_argument("threshold C ln n + x must be non-negative");
}

std::size_t ThresholdSpec::m_ones() const {
    return static_cast<std::size_t>(std::floor(centering_w(n) + x)) + 1;
}

std::string to_string(IntersectionMode mode) { return mode == IntersectionMode::integer ? "integer" : "residue"; }

ProgressionSet::ProgressionSet(std::size_t s, std::size_t p, std::size_t M, std::size_t n, IntersectionMode mode)
    : mode_(mode) {
    if (s < 1 || s > n || p < 1 || p > n) throw std::out_of_range("(s, p) must lie in [1, n]^2");
    elements_.reserve(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        elements_.push_back(mode == IntersectionMode::integer ? s + i * p : pos(s, i, p, n));
    }
    if (mode == IntersectionMode::residue) {
        std::sort(elements_.begin(), elements_.end());
        elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    }
}

std::size_t ProgressionSet::intersection_size(const ProgressionSet& other) const {
    std::size_t c = 0;
    auto a = elements_.begin();
    auto b = other.elements_.begin();
    while (a != elements_.end() && b != other.elements_.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++c;
            ++a;
            ++b;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Statistics on a word

namespace {

void check_matching(const BinaryWord& w, const ThresholdSpec& spec, const TruncationParams& params) {
    if (spec.n != w.size() || params.n != w.size()) {
        throw std::invalid_argument("threshold and truncation parameters must use the word length");
    }
    if (!(spec.x < params.eps * std::log(static_cast<double>(w.size())))) {
        throw std::domain_error("indicator requires x < eps ln n");
    }
}

}  // namespace

std::size_t truncated_w_sp(const BinaryWord& w, std::size_t s, std::size_t p, const TruncationParams& params) {
    if (params.n != w.size()) throw std::invalid_argument("truncation parameters must use the word length");
    return std::min(w_sp(w, s, p), params.M());
}

int indicator(const BinaryWord& w, std::size_t s, std::size_t p, const ThresholdSpec& spec, const TruncationParams& params) {
    check_matching(w, spec, params);
    const std::size_t n = w.size();
    if (s < 1 || s > n || p < 1 || p > n) throw std::out_of_range("(s, p) must lie in [1, n]^2");
    if (w[s] != 0) return 0;
    const std::size_t m = spec.m_ones();
    std::size_t at = s;
    for (std::size_t i = 1; i <= m; ++i) {
        at += p;
        if (at > n) at -= n;
        if (w[at] == 0) return 0;
    }
    return 1;
}

std::size_t s_count(const BinaryWord& w, const ThresholdSpec& spec, const TruncationParams& params) {
    check_matching(w, spec, params);
    return count_all_runs_at_least(w, spec.m_ones(), ApMode::wrapped);
}

// ---------------------------------------------------------------------------
// Intersection counts

std::vector<std::uint64_t> count_D_table(std::size_t s, std::size_t p, const TruncationParams& params,
                                         IntersectionMode mode, std::size_t cap) {
    const std::size_t n = params.n;
    if (n > cap) throw std::invalid_argument("count_D limited to n <= " + std::to_string(cap));
    const std::size_t M = params.M();
    const ProgressionSet a(s, p, M, n, mode);

    std::vector<std::uint64_t> table(M + 2, 0);
    std::vector<std::uint32_t> hits(n + 1, 0);
    std::vector<std::size_t> stamp(n + 1, 0);
    std::vector<std::size_t> touched;
    touched.reserve(n);
    std::size_t epoch = 0;

    for (std::size_t q = 1; q <= n; ++q) {
        if (q == p) continue;
        touched.clear();
        for (const std::size_t y : a.elements()) {
            ++epoch;  // one count per (y, t), even when a short cycle revisits t
            for (std::size_t j = 0; j <= M; ++j) {
                std::size_t t;
                if (mode == IntersectionMode::integer) {
                    if (y <= j * q) break;
                    t = y - j * q;
                    if (t > n) continue;
                } else {
                    const std::size_t back = (j * q) % n;
                    t = (y - 1 + n - back) % n + 1;
                }
                if (stamp[t] == epoch) continue;
                stamp[t] = epoch;
                if (hits[t]++ == 0) touched.push_back(t);
            }
        }
        table[0] += n - touched.size();
        for (const std::size_t t : touched) {
            ++table[hits[t]];
            hits[t] = 0;
        }
    }
    return table;
}

std::uint64_t count_D(std::size_t s, std::size_t p, const TruncationParams& params, std::size_t k,
                      IntersectionMode mode, std::size_t cap) {
    const auto table = count_D_table(s, p, params, mode, cap);
    return k < table.size() ? table[k] : 0;
}

std::uint64_t d_bound(std::size_t n, std::size_t M, std::size_t k) {
    if (k < 1) throw std::invalid_argument("d_bound is defined for k >= 1");
    const std::uint64_t sq = static_cast<std::uint64_t>(M + 1) * (M + 1);
    if (k == 1) return sq * n;
    if (2 * k <= M + 2) return sq * M * M;
    return 0;
}

std::uint64_t d_bound(const TruncationParams& params, std::size_t k) { return d_bound(params.n, params.M(), k); }

// ---------------------------------------------------------------------------
// First moments

double lambda_paper(std::size_t n, double x) {
    const double nn = static_cast<double>(n);
    return std::ldexp(nn * nn, -static_cast<int>(std::floor(centering_w(n) + x + 2.0)));
}

namespace {

std::size_t long_cycle_differences(std::size_t n, std::size_t min_cycle) {
    std::size_t c = 0;
    for (std::size_t p = 1; p <= n; ++p) {
        if (n / std::gcd(n, p) >= min_cycle) ++c;
    }
    return c;
}

}  // namespace

Dyadic lambda_exact_w_dyadic(std::size_t n, std::size_t m_ones) {
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * long_cycle_differences(n, m_ones + 1);
    return Dyadic::pow2_neg(static_cast<int>(m_ones + 1)) * pairs;
}

double lambda_exact_w(std::size_t n, double x) {
    return static_cast<double>(lambda_exact_w_dyadic(n, ThresholdSpec(n, x).m_ones()).value());
}

double lambda_exact_u(std::size_t n, std::size_t m_ones) {
    if (m_ones < 1) throw std::invalid_argument("lambda_exact_u requires m_ones >= 1");
    if (m_ones >= n) return 0.0;
    const std::uint64_t P = (n - 1) / m_ones;
    const std::uint64_t pairs = n * P - m_ones * P * (P + 1) / 2;
    return std::ldexp(static_cast<double>(pairs), -static_cast<int>(m_ones + 1));
}

Dyadic indicator_expectation(std::size_t p, std::size_t n, std::size_t m_ones) {
    if (p < 1 || p > n) throw std::out_of_range("difference must lie in [1, n]");
    if (n / std::gcd(n, p) < m_ones + 1) return {};
    return Dyadic::pow2_neg(static_cast<int>(m_ones + 1));
}

Dyadic joint_expectation(std::size_t s, std::size_t p, std::size_t t, std::size_t q, std::size_t n, std::size_t m_ones) {
    if (s == t && p == q) throw std::invalid_argument("joint_expectation needs two distinct index pairs");
    for (const std::size_t v : {s, p, t, q}) {
        if (v < 1 || v > n) throw std::out_of_range("indices must lie in [1, n]");
    }
    // -1 unconstrained, otherwise the required value.
    std::vector<signed char> need(n + 1, -1);
    std::size_t constrained = 0;
    auto require = [&](std::size_t position, signed char value) {
        if (need[position] == -1) {
            need[position] = value;
            ++constrained;
            return true;
        }
        return need[position] == value;
    };
    for (const auto& [start, diff] : {std::pair{s, p}, std::pair{t, q}}) {
        if (!require(start, 0)) return {};
        for (std::size_t i = 1; i <= m_ones; ++i) {
            if (!require(pos(start, i, diff, n), 1)) return {};
        }
    }
    return Dyadic::pow2_neg(static_cast<int>(constrained));
}

// ---------------------------------------------------------------------------
// B1 / B2

namespace {

struct Mask128 {
    std::array<std::uint64_t, 2> w{};

    void set(std::size_t position) { w[(position - 1) >> 6] |= 1ULL << ((position - 1) & 63); }
    Mask128 operator|(const Mask128& o) const { return {{w[0] | o.w[0], w[1] | o.w[1]}}; }
    bool intersects(const Mask128& o) const { return (w[0] & o.w[0]) | (w[1] & o.w[1]); }
    int count() const { return std::popcount(w[0]) + std::popcount(w[1]); }
};

}  // namespace

DependencySummary b1_b2_exact(std::size_t n, double x, double eps, IntersectionMode mode, std::size_t cap) {
    if (n > cap || n > 128) throw std::invalid_argument("exact B1/B2 limited to n <= " + std::to_string(std::min<std::size_t>(cap, 128)));
    const TruncationParams params(n, eps);
    const ThresholdSpec spec(n, x);
    const std::size_t M = params.M();
    const std::size_t m = spec.m_ones();
    const std::size_t len = mode == IntersectionMode::integer ? M : std::max(M, m);

    std::vector<char> live(n + 1, 0);  // E[I_{.,q}] > 0
    for (std::size_t q = 1; q <= n; ++q) live[q] = !indicator_expectation(q, n, m).is_zero();

    // Constraint masks for every live pair.
    std::vector<Mask128> zeros(n * n);
    std::vector<Mask128> ones(n * n);
    for (std::size_t t = 1; t <= n; ++t) {
        for (std::size_t q = 1; q <= n; ++q) {
            if (!live[q]) continue;
            const std::size_t idx = (t - 1) * n + (q - 1);
            zeros[idx].set(t);
            for (std::size_t i = 1; i <= m; ++i) ones[idx].set(pos(t, i, q, n));
        }
    }

    std::uint64_t b1_pairs = 0;
    std::vector<std::uint64_t> b2_hist(2 * (m + 1) + 1, 0);
    std::vector<std::uint32_t> stamp(n * n, 0);
    std::uint32_t epoch = 0;

    for (std::size_t s = 1; s <= n; ++s) {
        for (std::size_t p = 1; p <= n; ++p) {
            if (!live[p]) continue;  // E[I_sp] = 0 kills every term
            ++epoch;
            const std::size_t self = (s - 1) * n + (p - 1);
            const ProgressionSet a(s, p, len, n, mode);
            for (const std::size_t y : a.elements()) {
                for (std::size_t q = 1; q <= n; ++q) {
                    for (std::size_t j = 0; j <= len; ++j) {
                        std::size_t t;
                        if (mode == IntersectionMode::integer) {
                            if (y <= j * q) break;
                            t = y - j * q;
                            if (t > n) continue;
                        } else {
                            t = (y - 1 + n - (j * q) % n) % n + 1;
                        }
                        const std::size_t idx = (t - 1) * n + (q - 1);
                        if (stamp[idx] == epoch) continue;
                        stamp[idx] = epoch;
                        if (!live[q]) continue;
                        ++b1_pairs;
                        if (idx == self) continue;
                        const Mask128 z = zeros[self] | zeros[idx];
                        const Mask128 o = ones[self] | ones[idx];
                        if (z.intersects(o)) continue;
                        ++b2_hist[static_cast<std::size_t>((z | o).count())];
                    }
                }
            }
        }
    }

    DependencySummary out;
    out.n = n;
    out.x = x;
    out.eps = eps;
    out.kind = DependencySummary::Kind::exact;
    out.mode = mode;
    out.M = M;
    out.m_ones = m;
    Dyadic b1 = Dyadic::pow2_neg(static_cast<int>(2 * (m + 1))) * b1_pairs;
    Dyadic b2;
    for (std::size_t e = 0; e < b2_hist.size(); ++e) {
        if (b2_hist[e]) b2 += Dyadic::pow2_neg(static_cast<int>(e)) * b2_hist[e];
    }
    out.b1_exact = b1;
    out.b2_exact = b2;
    out.b1 = static_cast<double>(b1.value());
    out.b2 = static_cast<double>(b2.value());
    return out;
}

DependencySummary b1_b2_paper_bound(std::size_t n, double x, double eps) {
    const TruncationParams params(n, eps);
    const std::size_t M = params.M();
    const long double m1 = static_cast<long double>(M) + 1;
    const long double mm = static_cast<long double>(M);
    const long double nn = static_cast<long double>(n);
    const std::size_t top = M / 2 + 1;  // largest integer k with k <= M/2 + 1
    const long double middle_terms = top >= 2 ? static_cast<long double>(top - 1) : 0.0L;
    long double pow_sum = 0.0L;
    for (std::size_t k = 2; k <= top; ++k) pow_sum += std::ldexp(1.0L, static_cast<int>(k));

    // 2^-2(x+1) n^-4 times a sum over n^2 identical (s, p) terms.
    const long double prefactor = std::pow(2.0L, -2.0L * (static_cast<long double>(x) + 1.0L)) / (nn * nn);
    const long double b1_bracket = m1 * m1 * nn + 1.0L + middle_terms * (m1 * m1 * mm * mm + 1.0L);
    const long double b2_bracket = 2.0L * m1 * m1 * nn + m1 * m1 * mm * mm * pow_sum;

    DependencySummary out;
    out.n = n;
    out.x = x;
    out.eps = eps;
    out.kind = DependencySummary::Kind::paper_bound;
    out.mode = IntersectionMode::integer;
    out.M = M;
    out.m_ones = ThresholdSpec(n, x).m_ones();
    out.b1 = static_cast<double>(prefactor * b1_bracket);
    out.b2 = static_cast<double>(prefactor * b2_bracket);
    return out;
}

}  // namespace aprand
