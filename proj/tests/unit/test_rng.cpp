#include "nuhawkes/ensemble.hpp"
#include "nuhawkes/random.hpp"
#include "nuhawkes/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

using namespace nuhawkes;

// known-answer vectors published with the Random123 reference implementation
TEST_CASE("philox block matches the reference known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(Philox4x32::block(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("engine output is the block stream in counter order") {
    Philox4x32 g(0);
    const auto b0 = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    const auto b1 = Philox4x32::block({1, 0, 0, 0}, {0, 0});
    std::vector<std::uint64_t> expect{(std::uint64_t{b0[1]} << 32) | b0[0], (std::uint64_t{b0[3]} << 32) | b0[2],
                                      (std::uint64_t{b1[1]} << 32) | b1[0], (std::uint64_t{b1[3]} << 32) | b1[2]};
    std::vector<std::uint64_t> got;
    for (int i = 0; i < 4; ++i) {
        got.push_back(g());
    }
    // the first refill may use counter 0 or 1; accept either start but require consecutive blocks
    const bool from_zero = got == expect;
    const auto b2 = Philox4x32::block({2, 0, 0, 0}, {0, 0});
    std::vector<std::uint64_t> shifted{expect[2], expect[3], (std::uint64_t{b2[1]} << 32) | b2[0],
                                       (std::uint64_t{b2[3]} << 32) | b2[2]};
    CHECK((from_zero || got == shifted));
}

TEST_CASE("key round trip and stream separation") {
    CHECK(Philox4x32(0x0123456789abcdefULL).key() == 0x0123456789abcdefULL);
    CHECK(stream_key(1, "hawkes", 0) != stream_key(1, "hawkes", 1));
    CHECK(stream_key(1, "hawkes", 0) != stream_key(1, "meanfield", 0));
    CHECK(stream_key(1, "hawkes", 0) != stream_key(2, "hawkes", 0));
    CHECK(stream_key(9, "x", 3) == stream_key(9, "x", 3));

    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        keys.insert(stream_key(42, "paths", i));
    }
    CHECK(keys.size() == 10000);
}

TEST_CASE("same stream reproduces, distinct streams differ") {
    auto a = make_stream(5, "t", 0);
    auto b = make_stream(5, "t", 0);
    auto c = make_stream(5, "t", 1);
    int equal_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        CHECK(x == b());
        equal_ac += x == c() ? 1 : 0;
    }
    CHECK(equal_ac == 0);
}

TEST_CASE("uniforms lie in (0, 1) with the right first two moments") {
    auto g = make_stream(11, "u", 0);
    const int n = 200000;
    double s = 0.0;
    double s2 = 0.0;
    bool inside = true;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform();
        inside = inside && u > 0.0 && u < 1.0;
        s += u;
        s2 += u * u;
    }
    CHECK(inside);
    // sd of the mean is sqrt(1/12 / n) ~ 6.5e-4
    CHECK(std::abs(s / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(s2 / n - 1.0 / 3.0) < 4.0 * std::sqrt(4.0 / 45.0 / n));
}

TEST_CASE("sampler variates have their textbook means") {
    Sampler s(make_stream(3, "sampler", 0));
    const int n = 100000;
    double e = 0.0;
    double z = 0.0;
    double z2 = 0.0;
    double p = 0.0;
    for (int i = 0; i < n; ++i) {
        e += s.exponential(2.0);
        const double g = s.normal();
        z += g;
        z2 += g * g;
        p += static_cast<double>(s.poisson(3.0));
    }
    CHECK(std::abs(e / n - 0.5) < 4.0 * 0.5 / std::sqrt(n));
    CHECK(std::abs(z / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(z2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(p / n - 3.0) < 4.0 * std::sqrt(3.0 / n));
    CHECK(s.poisson(0.0) == 0);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        seen.insert(s.index(7));
    }
    CHECK(seen.size() == 7);
    CHECK(*seen.rbegin() == 6);
}

TEST_CASE("run_ensemble keeps index order for any thread count") {
    auto fn = [](std::size_t i) {
        auto g = make_stream(17, "ensemble", i);
        double acc = 0.0;
        for (int k = 0; k < 100; ++k) {
            acc += g.uniform();
        }
        return acc;
    };
    const auto one = run_ensemble(257, 1, fn);
    const auto four = run_ensemble(257, 4, fn);
    const auto many = run_ensemble(257, 64, fn);
    CHECK(one == four);
    CHECK(one == many);
    CHECK(run_ensemble(0, 4, fn).empty());
}

TEST_CASE("run_ensemble propagates worker exceptions") {
    auto fn = [](std::size_t i) -> int {
        if (i == 13) {
            throw std::runtime_error("boom");
        }
        return static_cast<int>(i);
    };
    CHECK_THROWS_AS((void)run_ensemble(40, 1, fn), std::runtime_error);
    CHECK_THROWS_AS((void)run_ensemble(40, 3, fn), std::runtime_error);
}
