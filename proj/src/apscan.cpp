#include "aprand/apscan.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "witness_order.hpp"

namespace aprand {

std::string_view to_string(ApMode mode) noexcept {
    return mode == ApMode::straight ? "straight" : "wrapped";
}

namespace {

void check_sp(const BinaryWord& w, std::size_t s, std::size_t p) {
    const std::size_t n = w.size();
    if (s < 1 || s > n || p < 1 || p > n) {
        throw std::out_of_range("(s, p) must lie in [1, n]^2, n = " + std::to_string(n));
    }
}

void require_nonempty(const BinaryWord& w) {
    if (w.empty()) throw std::invalid_argument("statistic undefined for an empty word");
}

}  // namespace

std::size_t w_sp(const BinaryWord& w, std::size_t s, std::size_t p) {
    check_sp(w, s, p);
    if (w[s] != 0) return 0;
    const std::size_t n = w.size();
    std::size_t k = 0;
    std::size_t at = s;
    while (k < n) {
        at += p;
        if (at > n) at -= n;
        if (w[at] == 0) break;
        ++k;
    }
    return k;
}

std::size_t u_sp(const BinaryWord& w, std::size_t s, std::size_t p) {
    check_sp(w, s, p);
    if (w[s] != 0) return 0;
    const std::size_t limit = (w.size() - s) / p;
    std::size_t k = 0;
    while (k < limit && w[s + (k + 1) * p] == 1) ++k;
    return k;
}

ApResult max_w(const BinaryWord& w) {
    require_nonempty(w);
    const std::size_t n = w.size();
    detail::BestWitness best;
    std::vector<std::size_t> cycle;
    std::vector<std::size_t> run;
    for (std::size_t p = 1; p <= n; ++p) {
        const std::size_t g = std::gcd(p, n);
        const std::size_t len = n / g;
        cycle.resize(len);
        run.resize(len);
        for (std::size_t r = 1; r <= g; ++r) {
            std::size_t at = r;
            std::size_t zero = len;
            for (std::size_t j = 0; j < len; ++j) {
                cycle[j] = at;
                if (zero == len && w[at] == 0) zero = j;
                at += p;
                if (at > n) at -= n;
            }
            if (zero == len) continue;  // all-ones cycle: no admissible start
            // Sweep backwards from the zero; run[j] counts ones starting at cycle[j].
            run[zero] = 0;
            for (std::size_t step = 1; step < len; ++step) {
                const std::size_t j = (zero + len - step) % len;
                run[j] = w[cycle[j]] ? run[(j + 1) % len] + 1 : 0;
            }
            for (std::size_t j = 0; j < len; ++j) {
                if (w[cycle[j]] == 0) best.consider(run[(j + 1) % len], cycle[j], p);
            }
        }
    }
    return best.result(ApMode::wrapped);
}

ApResult max_u(const BinaryWord& w) {
    require_nonempty(w);
    const std::size_t n = w.size();
    detail::BestWitness best;
    for (std::size_t p = 1; p <= n; ++p) {
        for (std::size_t r = 1; r <= p && r <= n; ++r) {
            // Last element of the chain r, r+p, ... that is <= n.
            std::size_t at = r + ((n - r) / p) * p;
            std::size_t run_after = 0;
            while (true) {
                if (w[at] == 0) {
                    best.consider(run_after, at, p);
                    run_after = 0;
                } else {
                    ++run_after;
                }
                if (at == r) break;
                at -= p;
            }
        }
    }
    return best.result(ApMode::straight);
}

namespace {

template <typename RunFn>
ApResult naive_scan(const BinaryWord& w, std::size_t cap, ApMode mode, RunFn run) {
    require_nonempty(w);
    if (w.size() > cap) {
        throw std::invalid_argument("naive oracle limited to n <= " + std::to_string(cap));
    }
    detail::BestWitness best;
    const std::size_t n = w.size();
    for (std::size_t s = 1; s <= n; ++s) {
        for (std::size_t p = 1; p <= n; ++p) best.consider(run(w, s, p), s, p);
    }
    return best.result(mode);
}

}  // namespace

ApResult max_w_naive(const BinaryWord& w, std::size_t cap) {
    return naive_scan(w, cap, ApMode::wrapped, [](const BinaryWord& x, std::size_t s, std::size_t p) { return w_sp(x, s, p); });
}

ApResult max_u_naive(const BinaryWord& w, std::size_t cap) {
    return naive_scan(w, cap, ApMode::straight, [](const BinaryWord& x, std::size_t s, std::size_t p) { return u_sp(x, s, p); });
}

}  // namespace aprand
