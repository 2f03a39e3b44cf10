#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "support.hpp"

using namespace specfreq;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are deterministic and distinct") {
    const StreamKey key{42, 7};
    CounterRng a(key);
    CounterRng b(key);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

    CounterRng c(key.child(0));
    CounterRng d(key.child(1));
    CounterRng e(StreamKey{43, 7});
    CounterRng f(key);
    const double first = f.uniform();
    CHECK(c.uniform() != d.uniform());
    CHECK(e.uniform() != first);
    CHECK(key.child(5) == key.child(5));

    std::set<std::uint64_t> ids;
    for (std::uint64_t i = 0; i < 10000; ++i) ids.insert(key.child(i).stream);
    CHECK(ids.size() == 10000);
}

TEST_CASE("a child stream does not depend on sibling consumption") {
    const StreamKey base{9, 1};
    CounterRng heavy(base.child(0));
    for (int i = 0; i < 1000; ++i) (void)heavy.normal();
    CounterRng x(base.child(1));
    CounterRng y(base.child(1));
    CHECK(x.normal() == y.normal());
}

TEST_CASE("uniforms stay strictly inside (0, 1) and look uniform") {
    CounterRng rng(StreamKey{1, 2});
    std::vector<double> u(20000);
    for (double& v : u) {
        v = rng.uniform();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
    CHECK(support::ks_uniform_pvalue(u) > 0.001);
    CHECK(rng.blocks_used() == 10000);
}

TEST_CASE("normals look standard normal") {
    CounterRng rng(StreamKey{3, 4});
    std::vector<double> z(100000);
    rng.fill_normal(z);
    double mean = 0.0;
    double var = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size() - 1);
    CHECK(std::abs(mean) < 0.015);
    CHECK(std::abs(var - 1.0) < 0.02);
    CHECK(support::ks_normal_pvalue(z) > 0.001);
}
