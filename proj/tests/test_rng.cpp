#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "opdyn/rng.hpp"

using namespace opdyn;

TEST_CASE("draws are pure functions of their counters") {
    CHECK(rng::uniform01(7, rng::kTagStep, 3, 11, 0) ==
          rng::uniform01(7, rng::kTagStep, 3, 11, 0));
    CHECK(rng::normal(7, rng::kTagStep, 3, 11, 0) ==
          rng::normal(7, rng::kTagStep, 3, 11, 0));
    // changing any index changes the value
    const double base = rng::uniform01(7, rng::kTagStep, 3, 11, 0);
    CHECK(rng::uniform01(8, rng::kTagStep, 3, 11, 0) != base);
    CHECK(rng::uniform01(7, rng::kTagInit, 3, 11, 0) != base);
    CHECK(rng::uniform01(7, rng::kTagStep, 4, 11, 0) != base);
    CHECK(rng::uniform01(7, rng::kTagStep, 3, 12, 0) != base);
    CHECK(rng::uniform01(7, rng::kTagStep, 3, 11, 1) != base);
}

TEST_CASE("uniform draws stay in [0,1) and look uniform") {
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng::uniform01(1, rng::kTagInit, i, 0, 0);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12).epsilon(0.02));
}

TEST_CASE("normal draws have standard moments") {
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng::normal(42, rng::kTagStep, i, 0, 0);
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sum4 / n == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("streams reproduce and do not collide") {
    auto a = rng::make_stream(9, rng::kTagSliced, 0);
    auto b = rng::make_stream(9, rng::kTagSliced, 0);
    for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());

    std::set<std::uint64_t> seen;
    for (int id = 0; id < 100; ++id) {
        auto s = rng::make_stream(9, rng::kTagSliced, id);
        for (int i = 0; i < 100; ++i) seen.insert(s.next());
    }
    CHECK(seen.size() == 100 * 100);
}
