#pragma once

#include "aprand/apscan.hpp"

namespace aprand::detail {

// Running maximum with lexicographic (s, p) tie-breaking; independent of visit order.
struct BestWitness {
    std::size_t k = 0;
    std::size_t s = 0;
    std::size_t p = 0;

    void consider(std::size_t k_new, std::size_t s_new, std::size_t p_new) noexcept {
        if (k_new == 0) return;
        if (k_new > k || (k_new == k && (s_new < s || (s_new == s && p_new < p)))) {
            k = k_new;
            s = s_new;
            p = p_new;
        }
    }

    ApResult result(ApMode mode) const {
        ApResult r;
        r.mode = mode;
        r.value = k;
        if (k > 0) r.witness = ApWitness{s, p, k};
        return r;
    }
};

}  // namespace aprand::detail
