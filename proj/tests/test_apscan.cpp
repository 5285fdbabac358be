#include <doctest.h>

#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "aprand/apscan.hpp"
#include "aprand/packed_scan.hpp"

using namespace aprand;

namespace {

const BinaryWord kSample = BinaryWord::from_bits("01101");

void check_witness(const BinaryWord& w, const ApResult& r) {
    if (r.value == 0) {
        CHECK_FALSE(r.witness.has_value());
        return;
    }
    REQUIRE(r.witness.has_value());
    const ApWitness& x = *r.witness;
    const std::size_t n = w.size();
    CHECK(x.k == r.value);
    CHECK(w.bit(x.s) == 0);
    for (std::size_t i = 1; i <= x.k; ++i) {
        const std::size_t q = r.mode == ApMode::wrapped ? pos(x.s, i, x.p, n) : x.s + i * x.p;
        REQUIRE(q <= n);
        CHECK(w.bit(q) == 1);
    }
    CHECK(x.k < n / std::gcd(x.p, n));
}

}  // namespace

TEST_CASE("pos wraps cyclically") {
    CHECK(pos(4, 1, 3, 5) == 2);
    CHECK(pos(3, 0, 7, 5) == 3);
    CHECK(pos(1, 2, 5, 5) == 1);
    CHECK(pos(5, 1, 1, 5) == 1);
}

TEST_CASE("single progressions on the sample word") {
    CHECK(w_sp(kSample, 1, 1) == 2);
    CHECK(w_sp(kSample, 4, 3) == 3);
    CHECK(u_sp(kSample, 1, 1) == 2);
    CHECK(u_sp(kSample, 4, 1) == 1);
    CHECK(w_sp(kSample, 2, 1) == 0);
    for (std::size_t s = 1; s <= 5; ++s) CHECK(w_sp(kSample, s, 5) == 0);
    CHECK_THROWS_AS(w_sp(kSample, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(w_sp(kSample, 1, 6), std::out_of_range);
    CHECK_THROWS_AS(u_sp(kSample, 6, 1), std::out_of_range);
}

TEST_CASE("zeros and ones") {
    const BinaryWord z = BinaryWord::zeros(40);
    const BinaryWord o = BinaryWord::ones(40);
    for (std::size_t s = 1; s <= 40; s += 7) {
        for (std::size_t p = 1; p <= 40; p += 3) {
            CHECK(u_sp(z, s, p) == 0);
            CHECK(w_sp(o, s, p) == 0);
        }
    }
    CHECK(max_w(o) == ApResult{0, std::nullopt, ApMode::wrapped});
    CHECK(max_u(o).value == 0);
    CHECK(max_u(z).value == 0);
    CHECK(max_w_packed(o).value == 0);
    CHECK(max_u_packed(z).value == 0);
}

TEST_CASE("maxima on the sample word") {
    const ApResult w = max_w(kSample);
    CHECK(w.value == 3);
    CHECK(w.witness == ApWitness{1, 2, 3});
    const ApResult u = max_u(kSample);
    CHECK(u.value == 2);
    CHECK(u.witness == ApWitness{1, 1, 2});
    CHECK(max_w_naive(kSample) == w);
    CHECK(max_u_naive(kSample) == u);
    CHECK(max_w_packed(kSample) == w);
    CHECK(max_u_packed(kSample) == u);
}

TEST_CASE("length one") {
    const BinaryWord w = BinaryWord::from_bits("0");
    CHECK(max_w_naive(w).value == 0);
    CHECK(max_u_naive(w).value == 0);
    CHECK(max_w(w).value == 0);
    CHECK(max_u_packed(w).value == 0);
}

TEST_CASE("oracle cap and empty words") {
    CHECK_THROWS_AS(max_w_naive(BinaryWord::zeros(100), 50), std::invalid_argument);
    CHECK_THROWS_AS(max_u_naive(BinaryWord::zeros(4097)), std::invalid_argument);
    CHECK_THROWS(max_w(BinaryWord{}));
}

TEST_CASE("golden words agree with the standalone oracle") {
    std::ifstream is(APRAND_TEST_DATA "/golden_words.json");
    REQUIRE(is.good());
    for (const auto& g : nlohmann::json::parse(is)) {
        const BinaryWord w = BinaryWord::from_bits(g["bits"].get<std::string>());
        CAPTURE(g["n"].get<int>());
        for (const auto& [name, result] : {std::pair{"W", max_w(w)}, std::pair{"U", max_u(w)}}) {
            const auto& e = g[name];
            CHECK(result.value == e["k"].get<std::size_t>());
            if (result.witness) {
                CHECK(result.witness->s == e["s"].get<std::size_t>());
                CHECK(result.witness->p == e["p"].get<std::size_t>());
            }
        }
    }
}

TEST_CASE("fast scanners match the oracle on random words") {
    for (std::uint64_t t = 0; t < 150; ++t) {
        const std::size_t n = 1 + t % 97;
        const BinaryWord w = generate_word({11, t}, n);
        CAPTURE(w.to_bits());
        const ApResult w_ref = max_w_naive(w);
        const ApResult u_ref = max_u_naive(w);
        CHECK(max_w(w) == w_ref);
        CHECK(max_u(w) == u_ref);
        CHECK(max_w_packed(w) == w_ref);
        CHECK(max_u_packed(w) == u_ref);
        CHECK(u_ref.value <= w_ref.value);
        check_witness(w, w_ref);
        check_witness(w, u_ref);
    }
}

TEST_CASE("biased words exercise long runs") {
    for (std::uint64_t t = 0; t < 40; ++t) {
        const std::size_t n = 20 + 7 * t;
        BinaryWord w = BinaryWord::ones(n);
        const BinaryWord noise = generate_word({5, t}, n);
        const BinaryWord noise2 = generate_word({6, t}, n);
        for (std::size_t i = 1; i <= n; ++i) {
            if (noise[i] && noise2[i] && (i % 3 == 0)) w.set(i, 0);
        }
        w.set(1 + t % n, 0);
        CAPTURE(w.to_bits());
        CHECK(max_w(w) == max_w_naive(w));
        CHECK(max_u(w) == max_u_naive(w));
        CHECK(max_w_packed(w) == max_w_naive(w));
        CHECK(max_u_packed(w) == max_u_naive(w));
    }
}

TEST_CASE("run counts match single probes") {
    for (std::uint64_t t = 0; t < 20; ++t) {
        const std::size_t n = 30 + 11 * t;
        const BinaryWord w = generate_word({3, t}, n);
        for (ApMode mode : {ApMode::wrapped, ApMode::straight}) {
            for (std::size_t m = 1; m <= 6; ++m) {
                std::size_t total = 0;
                for (std::size_t p = 1; p <= n; ++p) {
                    std::size_t expect = 0;
                    for (std::size_t s = 1; s <= n; ++s) {
                        const std::size_t k = mode == ApMode::wrapped ? w_sp(w, s, p) : u_sp(w, s, p);
                        expect += k >= m ? 1 : 0;
                    }
                    CHECK(count_runs_at_least(w, p, m, mode) == expect);
                    total += expect;
                }
                CHECK(count_all_runs_at_least(w, m, mode) == total);
            }
        }
    }
}

TEST_CASE("U is non-decreasing along a stream") {
    for (std::uint64_t t = 0; t < 5; ++t) {
        const BinaryWord stream = generate_word({21, t}, 300);
        std::size_t prev = 0;
        for (std::size_t n = 1; n <= 300; ++n) {
            const std::size_t u = max_u_packed(stream.prefix(n)).value;
            CHECK(u >= prev);
            prev = u;
        }
    }
}
