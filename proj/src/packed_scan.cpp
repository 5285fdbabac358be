#include "aprand/packed_scan.hpp"

#include <bit>
#include <stdexcept>
#include <string>
#include <utility>

#include "witness_order.hpp"

namespace aprand {

namespace {

struct Limb {
    std::uint32_t index;
    std::uint64_t bits;
};

}  // namespace

PackedScanner::PackedScanner(const BinaryWord& w, ApMode mode)
    : n_(w.size()), mode_(mode), limbs_((w.size() + 63) / 64) {
    const auto src = w.limbs();
    zero_mask_.resize(limbs_);
    for (std::size_t i = 0; i < limbs_; ++i) zero_mask_[i] = ~src[i];
    if (n_ % 64 != 0) zero_mask_.back() &= (1ULL << (n_ % 64)) - 1;

    if (mode_ == ApMode::straight) {
        source_.assign(limbs_ + 1, 0);
        std::copy(src.begin(), src.end(), source_.begin());
        return;
    }
    source_.assign((2 * n_ + 63) / 64 + 2, 0);
    std::copy(src.begin(), src.end(), source_.begin());
    // Second copy starting at bit n.
    const std::size_t q = n_ >> 6;
    const std::size_t r = n_ & 63;
    for (std::size_t i = 0; i < limbs_; ++i) {
        source_[q + i] |= src[i] << r;
        if (r != 0) source_[q + i + 1] |= src[i] >> (64 - r);
    }
}

std::uint64_t PackedScanner::read64(std::size_t offset) const noexcept {
    const std::size_t q = offset >> 6;
    const std::size_t r = offset & 63;
    const std::uint64_t lo = q < source_.size() ? source_[q] : 0;
    if (r == 0) return lo;
    const std::uint64_t hi = q + 1 < source_.size() ? source_[q + 1] : 0;
    return (lo >> r) | (hi << (64 - r));
}

std::size_t PackedScanner::shift_for(std::size_t k, std::size_t p) const noexcept {
    return mode_ == ApMode::wrapped ? (k * p) % n_ : k * p;
}

namespace {

void check_difference(std::size_t p, std::size_t n) {
    if (p < 1 || p > n) throw std::out_of_range("difference must lie in [1, n], n = " + std::to_string(n));
}

}  // namespace

PackedScanner::Best PackedScanner::best_for(std::size_t p) const {
    check_difference(p, n_);
    std::vector<Limb> cur;
    std::vector<Limb> next;
    cur.reserve(limbs_);
    next.reserve(limbs_);
    for (std::size_t i = 0; i < limbs_; ++i) {
        if (zero_mask_[i]) cur.push_back({static_cast<std::uint32_t>(i), zero_mask_[i]});
    }
    if (cur.empty()) return {};

    std::size_t k = 0;
    while (k < n_) {
        const std::size_t shift = shift_for(k + 1, p);
        if (mode_ == ApMode::straight && shift >= n_) break;
        next.clear();
        for (const Limb& l : cur) {
            const std::uint64_t v = l.bits & read64(static_cast<std::size_t>(l.index) * 64 + shift);
            if (v) next.push_back({l.index, v});
        }
        if (next.empty()) break;
        cur.swap(next);
        ++k;
    }
    if (k == 0) return {};
    const Limb& first = cur.front();
    return {k, static_cast<std::size_t>(first.index) * 64 + static_cast<std::size_t>(std::countr_zero(first.bits)) + 1};
}

std::size_t PackedScanner::count_at_least(std::size_t p, std::size_t m) const {
    check_difference(p, n_);
    std::vector<Limb> cur;
    cur.reserve(limbs_);
    for (std::size_t i = 0; i < limbs_; ++i) {
        if (zero_mask_[i]) cur.push_back({static_cast<std::uint32_t>(i), zero_mask_[i]});
    }
    for (std::size_t k = 1; k <= m && !cur.empty(); ++k) {
        const std::size_t shift = shift_for(k, p);
        if (mode_ == ApMode::straight && shift >= n_) return 0;
        std::size_t kept = 0;
        for (const Limb& l : cur) {
            const std::uint64_t v = l.bits & read64(static_cast<std::size_t>(l.index) * 64 + shift);
            if (v) cur[kept++] = {l.index, v};
        }
        cur.resize(kept);
    }
    std::size_t total = 0;
    for (const Limb& l : cur) total += static_cast<std::size_t>(std::popcount(l.bits));
    return total;
}

bool PackedScanner::run_at_least(std::size_t s, std::size_t p, std::size_t m) const {
    check_difference(p, n_);
    if (s < 1 || s > n_) throw std::out_of_range("start must lie in [1, n]");
    auto bit0 = [this](std::size_t j) { return (source_[j >> 6] >> (j & 63)) & 1ULL; };
    if (bit0(s - 1)) return false;
    std::size_t j = s - 1;
    for (std::size_t i = 1; i <= m; ++i) {
        j += p;
        if (mode_ == ApMode::wrapped) {
            if (j >= n_) j -= n_;
        } else if (j >= n_) {
            return false;
        }
        if (!bit0(j)) return false;
    }
    return true;
}

namespace {

ApResult packed_max(const BinaryWord& w, ApMode mode) {
    if (w.empty()) throw std::invalid_argument("statistic undefined for an empty word");
    const PackedScanner scan(w, mode);
    detail::BestWitness best;
    for (std::size_t p = 1; p <= w.size(); ++p) {
        const auto b = scan.best_for(p);
        best.consider(b.k, b.s, p);
    }
    return best.result(mode);
}

}  // namespace

ApResult max_w_packed(const BinaryWord& w) { return packed_max(w, ApMode::wrapped); }

ApResult max_u_packed(const BinaryWord& w) { return packed_max(w, ApMode::straight); }

std::size_t count_runs_at_least(const BinaryWord& w, std::size_t p, std::size_t m, ApMode mode) {
    return PackedScanner(w, mode).count_at_least(p, m);
}

std::size_t count_all_runs_at_least(const BinaryWord& w, std::size_t m, ApMode mode) {
    const PackedScanner scan(w, mode);
    std::size_t total = 0;
    for (std::size_t p = 1; p <= w.size(); ++p) total += scan.count_at_least(p, m);
    return total;
}

}  // namespace aprand
