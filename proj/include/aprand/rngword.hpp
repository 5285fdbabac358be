#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aprand {

/// Identifies one i.i.d. Bernoulli(1/2) stream: a master seed plus a trial index.
struct StreamSeed {
    std::uint64_t master = 0;
    std::uint64_t trial = 0;

    friend bool operator==(const StreamSeed&, const StreamSeed&) = default;
};

/// SplitMix64 (Steele, Lea, Flood). Stateless finalizer plus the stepping generator.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t next() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    /// i-th output (1-based) of a generator started from `state`, without stepping.
    static constexpr std::uint64_t output_at(std::uint64_t state, std::uint64_t i) noexcept {
        return mix(state + i * kGamma);
    }

private:
    std::uint64_t state_;
};

/// mix(master ^ gamma * (trial + 1)); bijective in trial for a fixed master.
std::uint64_t derive_trial_seed(const StreamSeed& seed) noexcept;

/// A finite 0/1 word xi_1..xi_n. Positions are 1-indexed at every interface;
/// storage packs bit i at index (i-1) of 64-bit limbs, least significant first.
class BinaryWord {
public:
    BinaryWord() = default;

    /// Parses a string of '0'/'1' characters (first character is xi_1).
    static BinaryWord from_bits(std::string_view bits);

    /// Builds a word from individual values; each must be 0 or 1.
    static BinaryWord from_values(std::span<const int> values);

    /// Parses the lowercase hex packing produced by to_hex().
    static BinaryWord from_hex(std::string_view hex, std::size_t n);

    static BinaryWord zeros(std::size_t n);
    static BinaryWord ones(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    bool empty() const noexcept { return n_ == 0; }

    /// xi_i for 1 <= i <= size(); throws std::out_of_range otherwise.
    int bit(std::size_t i) const;

    /// Unchecked 1-indexed access.
    int operator[](std::size_t i) const noexcept {
        const std::size_t j = i - 1;
        return static_cast<int>((limbs_[j >> 6] >> (j & 63)) & 1ULL);
    }

    void set(std::size_t i, int value);

    /// The first m bits as a new word (m <= size()).
    BinaryWord prefix(std::size_t m) const;

    std::span<const std::uint64_t> limbs() const noexcept { return limbs_; }

    std::size_t popcount() const noexcept;

    /// Bit i goes to byte (i-1)/8, bit (i-1)%8; bytes printed as two lowercase hex digits.
    std::string to_hex() const;
    std::string to_bits() const;

    friend bool operator==(const BinaryWord&, const BinaryWord&) = default;

private:
    friend BinaryWord generate_word(const StreamSeed&, std::size_t);
    friend BinaryWord extend_word(const BinaryWord&, const StreamSeed&, std::size_t);

    explicit BinaryWord(std::size_t n) : n_(n), limbs_((n + 63) / 64, 0) {}

    std::size_t n_ = 0;
    std::vector<std::uint64_t> limbs_;
};

/// bit(i) is the least significant bit of the i-th SplitMix64 output started
/// from derive_trial_seed(seed). Prefix-consistent in n.
BinaryWord generate_word(const StreamSeed& seed, std::size_t n);

/// Grows `w` (generated from `seed`) to length n_new, reusing the existing prefix.
/// Throws std::invalid_argument when n_new < w.size().
BinaryWord extend_word(const BinaryWord& w, const StreamSeed& seed, std::size_t n_new);

std::string to_hex64(std::uint64_t v);

}  // namespace aprand
