#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aprand/apscan.hpp"

namespace aprand {

/// Bit-sliced scanner over one word. For a difference p it keeps the mask
/// Y_k(s) = [xi_s = 0] & xi_{s+p} & ... & xi_{s+kp} as packed limbs and ANDs in
/// one shifted copy of the word per step; only nonzero limbs are revisited.
/// Build once per word, then query any number of differences.
class PackedScanner {
public:
    PackedScanner(const BinaryWord& w, ApMode mode);

    std::size_t size() const noexcept { return n_; }
    ApMode mode() const noexcept { return mode_; }

    struct Best {
        std::size_t k = 0;  // max run length for this difference
        std::size_t s = 0;  // smallest start attaining k (0 when k == 0)
    };

    /// Max over s of W_{s,p} (wrapped) or U_{s,p} (straight), with the smallest attaining s.
    Best best_for(std::size_t p) const;

    /// Number of s with xi_s = 0 followed by at least m ones along difference p.
    std::size_t count_at_least(std::size_t p, std::size_t m) const;

    /// Whether xi_s = 0 and m ones follow along p (single probe, early exit).
    bool run_at_least(std::size_t s, std::size_t p, std::size_t m) const;

private:
    std::uint64_t read64(std::size_t offset) const noexcept;
    std::size_t shift_for(std::size_t k, std::size_t p) const noexcept;
    void load_zero_mask(std::vector<std::uint64_t>& y, std::vector<std::uint32_t>& active) const;

    std::size_t n_;
    ApMode mode_;
    std::size_t limbs_;
    std::vector<std::uint64_t> zero_mask_;
    // Wrapped: the word written twice in a row; straight: the word once. Zero padded.
    std::vector<std::uint64_t> source_;
};

}  // namespace aprand
