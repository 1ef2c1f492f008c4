#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "opdyn/measures.hpp"
#include "opdyn/rng.hpp"

using namespace opdyn;

namespace {

// Exact W2 between two 4-point planar clouds by trying all 4! assignments.
double brute_force_w2_4(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    std::vector<int> perm = {0, 1, 2, 3};
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int d = 0; d < a.dim; ++d) {
                const double diff =
                    a.points[i * a.dim + d] - b.points[perm[i] * b.dim + d];
                cost += diff * diff;
            }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best / 4.0);
}

EmpiricalMeasure random_cloud(int n, int dim, rng::Stream& stream) {
    EmpiricalMeasure m;
    m.dim = dim;
    for (int i = 0; i < n * dim; ++i)
        m.points.push_back(2.0 * stream.u01() - 1.0);
    return m;
}

}  // namespace

TEST_CASE("one-dimensional W2: hand-computed values") {
    CHECK(w2_1d_exact({0.0}, {1.0}) == 1.0);
    CHECK(w2_1d_exact({0.0, 2.0}, {1.0, 3.0}) == 1.0);
    CHECK(w2_1d_exact({2.0, 0.0}, {3.0, 1.0}) == 1.0);  // order irrelevant
    CHECK(w2_1d_exact({0.0, 0.0}, {-1.0, 1.0}) == 1.0);
    CHECK_THROWS(w2_1d_exact({0.0}, {0.0, 1.0}));
    CHECK_THROWS(w2_1d_exact({}, {}));
}

TEST_CASE("one-dimensional W2 is a metric on 1000 random triples") {
    auto stream = rng::make_stream(11, rng::kTagInit);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> a(6), b(6), c(6);
        for (int i = 0; i < 6; ++i) {
            a[i] = 4.0 * stream.u01() - 2.0;
            b[i] = 4.0 * stream.u01() - 2.0;
            c[i] = 4.0 * stream.u01() - 2.0;
        }
        const double ab = w2_1d_exact(a, b);
        const double ba = w2_1d_exact(b, a);
        const double ac = w2_1d_exact(a, c);
        const double cb = w2_1d_exact(c, b);
        CHECK(ab == ba);                       // symmetry
        CHECK(w2_1d_exact(a, a) == 0.0);       // identity
        CHECK(ab <= ac + cb + 1e-12);          // triangle inequality
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("sliced W2 approximates the assignment W2 on 4-point clouds") {
    auto stream = rng::make_stream(13, rng::kTagInit);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_cloud(4, 2, stream);
        const auto b = random_cloud(4, 2, stream);
        const double exact = brute_force_w2_4(a, b);
        const double sliced = sliced_w2(a, b, 2000, 99 + trial).value;
        // the rescaled projection average stays a lower bound for W2
        CHECK(sliced <= exact * 1.05);
        CHECK(sliced >= exact * 0.7);
    }
}

TEST_CASE("sliced W2 vanishes on identical clouds and is reproducible") {
    auto stream = rng::make_stream(17, rng::kTagInit);
    const auto a = random_cloud(50, 3, stream);
    CHECK(sliced_w2(a, a, 64, 5).value == 0.0);
    const auto b = random_cloud(50, 3, stream);
    const auto r1 = sliced_w2(a, b, 64, 5);
    const auto r2 = sliced_w2(a, b, 64, 5);
    CHECK(r1.value == r2.value);
    CHECK(r1.n_projections == 64);
    CHECK(sliced_w2(a, b, 64, 6).value != r1.value);
}

TEST_CASE("cluster components follow the in-radius graph") {
    SystemState s;
    s.dim = 2;
    // two chains and one isolated agent; radius 0.15
    s.positions = {0.0, 0.0, 0.1, 0.0, 0.2, 0.0,   // chain A: 0-1-2
                   1.0, 1.0, 1.1, 1.0,             // chain B: 3-4
                   5.0, 5.0};                      // singleton: 5
    s.opinions = {0.1, 0.1, 0.3, -0.5, -0.5, 0.9};
    const auto labels = cluster_components(s, 0.15);
    CHECK(labels.n_clusters == 3);
    CHECK(labels.labels == std::vector<int>{0, 0, 0, 1, 1, 2});
}

TEST_CASE("pooled within-cluster opinion deviation: hand-computed value") {
    SystemState s;
    s.dim = 1;
    s.positions = {0.0, 0.1, 5.0, 5.1};
    s.opinions = {1.0, 0.0, -1.0, -1.0};
    const auto labels = cluster_components(s, 0.15);
    REQUIRE(labels.n_clusters == 2);
    // cluster {1,0}: squared deviations 0.25 each; cluster {-1,-1}: zero
    CHECK(within_cluster_opinion_std(s, labels) ==
          doctest::Approx(std::sqrt(0.125)).epsilon(1e-14));
}

TEST_CASE("synchronous path distance is a running supremum") {
    auto make = [](std::vector<double> ops, double t) {
        SystemState s;
        s.dim = 1;
        s.positions.assign(ops.size(), 0.0);
        s.opinions = std::move(ops);
        s.time = t;
        return s;
    };
    Trajectory a, b;
    a.snapshots = {make({0.0}, 0.0), make({1.0}, 1.0), make({0.5}, 2.0)};
    b.snapshots = {make({0.0}, 0.0), make({0.0}, 1.0), make({0.5}, 2.0)};
    // deviation peaks at t=1 and must not decrease afterwards
    CHECK(synchronous_path_distance(a, b, 0.5) == 0.0);
    CHECK(synchronous_path_distance(a, b, 1.0) == 1.0);
    CHECK(synchronous_path_distance(a, b, 2.0) == 1.0);
}

TEST_CASE("density sampling matches cell probabilities") {
    auto g = Grid2D::make(-1, 1, -1, 1, 0.5);  // 4x4 cells
    DensityField f;
    f.grid = g;
    f.values.assign(16, 0.0);
    // mass split 3:1 between two cells
    f.at(0, 0) = 3.0;
    f.at(3, 3) = 1.0;
    const double m = f.mass();
    for (double& v : f.values) v /= m;
    const int n = 40000;
    const auto cloud = sample_from_density(f, n, 21);
    REQUIRE(cloud.dim == 2);
    int low = 0;
    for (int i = 0; i < n; ++i) {
        const double z = cloud.points[2 * i], eta = cloud.points[2 * i + 1];
        if (z < -0.5 && eta < -0.5)
            ++low;
        else {
            CHECK(z >= 0.5);
            CHECK(eta >= 0.5);
        }
    }
    // binomial(n, 3/4): five sigma is about 0.011 n
    CHECK(std::abs(low - 0.75 * n) < 0.011 * n);
}

TEST_CASE("fluctuation slope recovers an exact 1/N law") {
    // eight members per group arranged so the sample variance is exactly c/N
    std::map<int, std::vector<double>> groups;
    for (int n : {64, 128, 256, 512}) {
        const double var = 4.0 / n;
        const double a = std::sqrt(var * 7.0 / 8.0);
        groups[n] = {a, -a, a, -a, a, -a, a, -a};
    }
    CHECK(fluctuation_slope(groups) == doctest::Approx(-1.0).epsilon(1e-9));
    std::map<int, std::vector<double>> degenerate = {
        {64, std::vector<double>(8, 0.0)},
        {128, std::vector<double>(8, 0.0)},
        {256, std::vector<double>(8, 0.0)}};
    CHECK_THROWS(fluctuation_slope(degenerate));
}

TEST_CASE("empirical measures concatenate position and opinion") {
    SystemState s;
    s.dim = 2;
    s.positions = {1.0, 2.0, 3.0, 4.0};
    s.opinions = {0.5, -0.5};
    const auto m = empirical_measure(s);
    CHECK(m.dim == 3);
    CHECK(m.points == std::vector<double>{1.0, 2.0, 0.5, 3.0, 4.0, -0.5});
}
