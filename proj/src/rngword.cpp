#include "aprand/rngword.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <stdexcept>

namespace aprand {

std::uint64_t derive_trial_seed(const StreamSeed& seed) noexcept {
    return SplitMix64::mix(seed.master ^ (SplitMix64::kGamma * (seed.trial + 1)));
}

BinaryWord BinaryWord::from_bits(std::string_view bits) {
    BinaryWord w(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const char c = bits[i];
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bit string may only contain '0' and '1'");
        }
        if (c == '1') w.limbs_[i >> 6] |= 1ULL << (i & 63);
    }
    return w;
}

BinaryWord BinaryWord::from_values(std::span<const int> values) {
    BinaryWord w(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0 && values[i] != 1) {
            throw std::invalid_argument("word values must be 0 or 1");
        }
        if (values[i] == 1) w.limbs_[i >> 6] |= 1ULL << (i & 63);
    }
    return w;
}

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("invalid hex digit");
}

}  // namespace

BinaryWord BinaryWord::from_hex(std::string_view hex, std::size_t n) {
    if (hex.size() != 2 * ((n + 7) / 8)) {
        throw std::invalid_argument("hex length does not match word length");
    }
    BinaryWord w(n);
    for (std::size_t byte = 0; byte < hex.size() / 2; ++byte) {
        const auto v = static_cast<std::uint64_t>(hex_digit(hex[2 * byte]) * 16 + hex_digit(hex[2 * byte + 1]));
        w.limbs_[byte / 8] |= v << (8 * (byte % 8));
    }
    if (n % 64 != 0 && !w.limbs_.empty()) {
        const std::uint64_t mask = (1ULL << (n % 64)) - 1;
        if (w.limbs_.back() & ~mask) throw std::invalid_argument("hex has bits set beyond word length");
    }
    return w;
}

BinaryWord BinaryWord::zeros(std::size_t n) { return BinaryWord(n); }

BinaryWord BinaryWord::ones(std::size_t n) {
    BinaryWord w(n);
    for (auto& l : w.limbs_) l = ~0ULL;
    if (n % 64 != 0) w.limbs_.back() = (1ULL << (n % 64)) - 1;
    return w;
}

int BinaryWord::bit(std::size_t i) const {
    if (i < 1 || i > n_) throw std::out_of_range("bit position outside 1..n");
    return (*this)[i];
}

void BinaryWord::set(std::size_t i, int value) {
    if (i < 1 || i > n_) throw std::out_of_range("bit position outside 1..n");
    if (value != 0 && value != 1) throw std::invalid_argument("bit value must be 0 or 1");
    const std::size_t j = i - 1;
    const std::uint64_t m = 1ULL << (j & 63);
    if (value) {
        limbs_[j >> 6] |= m;
    } else {
        limbs_[j >> 6] &= ~m;
    }
}

BinaryWord BinaryWord::prefix(std::size_t m) const {
    if (m > n_) throw std::invalid_argument("prefix longer than word");
    BinaryWord w(m);
    std::copy_n(limbs_.begin(), w.limbs_.size(), w.limbs_.begin());
    if (m % 64 != 0) w.limbs_.back() &= (1ULL << (m % 64)) - 1;
    return w;
}

std::size_t BinaryWord::popcount() const noexcept {
    std::size_t c = 0;
    for (auto l : limbs_) c += static_cast<std::size_t>(std::popcount(l));
    return c;
}

std::string BinaryWord::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::size_t bytes = (n_ + 7) / 8;
    std::string out;
    out.reserve(2 * bytes);
    for (std::size_t b = 0; b < bytes; ++b) {
        const auto v = static_cast<unsigned>((limbs_[b / 8] >> (8 * (b % 8))) & 0xFF);
        out.push_back(kDigits[v >> 4]);
        out.push_back(kDigits[v & 15]);
    }
    return out;
}

std::string BinaryWord::to_bits() const {
    std::string out(n_, '0');
    for (std::size_t i = 1; i <= n_; ++i) {
        if ((*this)[i]) out[i - 1] = '1';
    }
    return out;
}

namespace {

// Fills bits [from, to) (0-indexed) from the stream.
void fill_stream_bits(std::vector<std::uint64_t>& limbs, std::uint64_t state, std::size_t from, std::size_t to) {
    for (std::size_t j = from; j < to; ++j) {
        const std::uint64_t bit = SplitMix64::output_at(state, j + 1) & 1ULL;
        limbs[j >> 6] |= bit << (j & 63);
    }
}

}  // namespace

BinaryWord generate_word(const StreamSeed& seed, std::size_t n) {
    BinaryWord w(n);
    fill_stream_bits(w.limbs_, derive_trial_seed(seed), 0, n);
    return w;
}

BinaryWord extend_word(const BinaryWord& w, const StreamSeed& seed, std::size_t n_new) {
    if (n_new < w.size()) throw std::invalid_argument("extend_word cannot shrink a word");
    BinaryWord out(n_new);
    std::copy(w.limbs_.begin(), w.limbs_.end(), out.limbs_.begin());
    fill_stream_bits(out.limbs_, derive_trial_seed(seed), w.size(), n_new);
    return out;
}

std::string to_hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace aprand
