#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hetero/errors.hpp"
#include "hetero/rng.hpp"
#include "hetero/zonotope.hpp"

using namespace hetero;

namespace {

// Independent oracle: recursive Laplace-expansion determinant and explicit
// subset recursion, sharing no code with the library path.
double laplace_det(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    double det = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<double>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<double> row;
            for (std::size_t cc = 0; cc < n; ++cc)
                if (cc != c) row.push_back(m[r][cc]);
            minor.push_back(row);
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        det += sign * m[0][c] * laplace_det(minor);
    }
    return det;
}

double brute_force_volume(const std::vector<std::vector<double>>& vecs, std::size_t d) {
    if (vecs.size() < d) return 0;
    double total = 0;
    std::vector<std::size_t> idx;
    auto recurse = [&](auto&& self, std::size_t start) -> void {
        if (idx.size() == d) {
            std::vector<std::vector<double>> m;
            for (std::size_t i : idx) m.push_back(vecs[i]);
            total += std::abs(laplace_det(m));
            return;
        }
        for (std::size_t i = start; i < vecs.size(); ++i) {
            idx.push_back(i);
            self(self, i + 1);
            idx.pop_back();
        }
    };
    recurse(recurse, 0);
    return total;
}

std::vector<std::vector<double>> random_generators(Rng& rng, std::size_t n,
                                                   std::size_t d) {
    std::vector<std::vector<double>> vecs(n, std::vector<double>(d));
    for (auto& v : vecs)
        for (auto& x : v) x = rng.uniform(0.05, 1.0);
    return vecs;
}

} // namespace

TEST_CASE("unit square has volume and gini one") {
    GeneratorSet g({{1, 0}, {0, 1}}, 1);
    CHECK(zonotope_volume(g).value == 1.0);
    CHECK(parallelotope_volume(g) == 1.0);
    const auto metrics = gini_volume(g);
    CHECK(metrics.gini == 1.0);
    CHECK_FALSE(metrics.degenerate);
}

TEST_CASE("three planar generators: volume 3, parallelotope 4, gini 0.75") {
    // Subsets {e1,e2}, {e1,(1,1)}, {e2,(1,1)} each contribute |det| = 1.
    GeneratorSet g({{1, 0}, {0, 1}, {1, 1}}, 1);
    CHECK(zonotope_volume(g).value == 3.0);
    CHECK(parallelotope_volume(g) == 4.0);
    CHECK(gini_volume(g).gini == 0.75);
}

TEST_CASE("identical-input firm table is rank deficient: volume and gini zero") {
    // The single (K, L, Y) triple of rows differs only in Y, so every
    // 3x3 determinant vanishes.
    GeneratorSet g({{10, 100, 1100}, {10, 100, 1300}, {10, 100, 1200}}, 2,
                   {"K", "L", "Y"});
    CHECK(zonotope_volume(g).value == 0.0);
    const auto metrics = gini_volume(g);
    CHECK(metrics.gini == 0.0);
    CHECK_FALSE(metrics.degenerate); // the diagonal box is nondegenerate
    CHECK(metrics.parallelotope_volume == 30.0 * 300.0 * 3600.0);
}

TEST_CASE("zero coordinate across all generators kills the parallelotope") {
    GeneratorSet g({{1, 0}, {2, 0}}, 1);
    CHECK(parallelotope_volume(g) == 0.0);
    const auto metrics = gini_volume(g);
    CHECK(metrics.gini == 0.0);
    CHECK(metrics.degenerate);
}

TEST_CASE("fewer generators than dimensions yields zero volume, not an error") {
    GeneratorSet g({{1, 2, 3}}, 2);
    const auto est = zonotope_volume(g);
    CHECK(est.value == 0.0);
    CHECK(est.mode == VolumeMode::exact);
}

TEST_CASE("exact volume matches the Laplace-expansion brute force") {
    Rng rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 2 + rng.uniform_int(3); // 2..4
        const std::size_t n = d + rng.uniform_int(7); // d..d+6
        const auto vecs = random_generators(rng, n, d);
        GeneratorSet g(vecs, d - 1);
        const double expected = brute_force_volume(vecs, d);
        CHECK(zonotope_volume(g).value ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("volume, gini and tangent are bit-identical under generator reorder") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + rng.uniform_int(6);
        auto vecs = random_generators(rng, n, 3);
        GeneratorSet g(vecs, 2);
        const double vol = zonotope_volume(g).value;
        const double gini = gini_volume(g).gini;
        const auto tangent = tangent_angles(g);

        // deterministic shuffle
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(vecs[i], vecs[rng.uniform_int(i + 1)]);
        GeneratorSet shuffled(vecs, 2);
        CHECK(zonotope_volume(shuffled).value == vol);
        CHECK(gini_volume(shuffled).gini == gini);
        const auto tangent2 = tangent_angles(shuffled);
        for (std::size_t j = 0; j < tangent.angles.size(); ++j)
            CHECK(tangent2.angles[j] == tangent.angles[j]);
    }
}

TEST_CASE("scaling generators by c scales volume by c^d and leaves gini fixed") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + rng.uniform_int(2);
        const auto vecs = random_generators(rng, d + 4, d);
        const double c = rng.uniform(0.3, 3.0);
        auto scaled = vecs;
        for (auto& v : scaled)
            for (auto& x : v) x *= c;
        GeneratorSet g(vecs, d - 1), gc(scaled, d - 1);
        const double factor = std::pow(c, static_cast<double>(d));
        CHECK(zonotope_volume(gc).value ==
              doctest::Approx(zonotope_volume(g).value * factor).epsilon(1e-9));
        CHECK(gini_volume(gc).gini ==
              doctest::Approx(gini_volume(g).gini).epsilon(1e-9));
    }
}

TEST_CASE("appending a generator never decreases the exact volume") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        auto vecs = random_generators(rng, 5, 3);
        GeneratorSet g(vecs, 2);
        const double before = zonotope_volume(g).value;
        vecs.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        GeneratorSet bigger(vecs, 2);
        CHECK(zonotope_volume(bigger).value >= before);
    }
}

TEST_CASE("sampled estimator lands within four standard errors of exact") {
    Rng rng(2024);
    int within = 0, trials = 0;
    for (int instance = 0; instance < 10; ++instance) {
        const std::size_t d = 2 + instance % 2;
        const auto vecs = random_generators(rng, 10, d);
        GeneratorSet g(vecs, d - 1);
        const double exact = zonotope_volume(g).value;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            VolumeOptions options;
            options.mode = VolumeMode::sampled;
            options.sample_count = 20000;
            options.seed = seed;
            const auto est = zonotope_volume(g, options);
            REQUIRE(est.std_error.has_value());
            CHECK(*est.std_error >= 0.0);
            CHECK(est.sample_count == 20000);
            if (std::abs(est.value - exact) <= 4.0 * *est.std_error) ++within;
            ++trials;
        }
    }
    CHECK(within >= trials * 99 / 100);
}

TEST_CASE("exact mode over the subset cap suggests sampled mode") {
    Rng rng(3);
    const auto vecs = random_generators(rng, 30, 4);
    GeneratorSet g(vecs, 3);
    VolumeOptions options;
    options.subset_cap = 1000; // C(30, 4) = 27405
    CHECK_THROWS_WITH_AS(zonotope_volume(g, options),
                         doctest::Contains("sampled"), SubsetCapExceeded);
}

TEST_CASE("subset_count handles boundaries") {
    CHECK(subset_count(3, 5, 1000) == 0);
    CHECK(subset_count(5, 2, 1000) == 10);
    CHECK(subset_count(100, 3, 1000000) == 161700);
    CHECK_FALSE(subset_count(100, 10, 1000000).has_value());
}

TEST_CASE("tangent of an on-axis diagonal is zero") {
    GeneratorSet g({{5, 0, 0}}, 1);
    const auto report = tangent_angles(g);
    REQUIRE(report.angles.size() == 1);
    CHECK(report.angles[0] == 0.0);
}

TEST_CASE("tangent of the all-ones diagonal against K is arctan(sqrt 2)") {
    GeneratorSet g({{1, 1, 1}}, 2, {"K", "L", "Y"});
    const auto report = tangent_angles(g);
    REQUIRE(report.angles.size() == 2);
    CHECK(report.angles[0] == doctest::Approx(std::atan(std::sqrt(2.0))).epsilon(1e-15));
    CHECK(report.angles[0] == doctest::Approx(0.9553166181245093).epsilon(1e-12));
    CHECK(report.axis_labels[0] == "K");
}

TEST_CASE("zero input component gives a right angle") {
    GeneratorSet g({{0, 1, 1}}, 2);
    const auto report = tangent_angles(g);
    CHECK(report.angles[0] == doctest::Approx(1.5707963267948966).epsilon(1e-15));
}

TEST_CASE("tangent requires a nonzero diagonal") {
    GeneratorSet g({{0, 0, 0}}, 2);
    CHECK_THROWS_AS(tangent_angles(g), ZeroDiagonal);
}

TEST_CASE("tangent components satisfy the Pythagoras identity") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = 2 + rng.uniform_int(3);
        const std::size_t n_inputs = 1 + rng.uniform_int(d);
        const auto vecs = random_generators(rng, 6, d);
        GeneratorSet g(vecs, n_inputs);
        const auto report = tangent_angles(g);
        double norm_sq = 0;
        for (double x : report.diagonal) norm_sq += x * x;
        for (std::size_t j = 0; j < report.angles.size(); ++j) {
            const double lhs = report.parallel_norms[j] * report.parallel_norms[j] +
                               report.perp_norms[j] * report.perp_norms[j];
            CHECK(lhs == doctest::Approx(norm_sq).epsilon(1e-9));
            CHECK(report.angles[j] >= 0.0);
            CHECK(report.angles[j] <= 1.5707963267948967);
        }
    }
}

TEST_CASE("normalization bias report reproduces the threshold example") {
    const auto report = normalization_bias_report(500, 100, 1000);
    CHECK(report.biased_ratio == 0.5);
    CHECK(report.adjusted_ratio == doctest::Approx(500.0 / 900.0).epsilon(1e-15));
    CHECK(std::abs(report.adjusted_ratio - 0.55556) < 5e-6);
    CHECK(report.relative_bias == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("zero threshold means no bias") {
    const auto report = normalization_bias_report(500, 0, 1000);
    CHECK(report.biased_ratio == report.adjusted_ratio);
    CHECK(report.relative_bias == 0.0);
}

TEST_CASE("zero volume gives zero ratios") {
    const auto report = normalization_bias_report(0, 100, 1000);
    CHECK(report.biased_ratio == 0.0);
    CHECK(report.adjusted_ratio == 0.0);
}

TEST_CASE("bias report validates its range") {
    CHECK_THROWS_AS(normalization_bias_report(500, 1000, 1000), InvalidRange);
    CHECK_THROWS_AS(normalization_bias_report(500, 1000, 100), InvalidRange);
    CHECK_THROWS_AS(normalization_bias_report(500, -1, 100), InvalidRange);
    CHECK_THROWS_AS(normalization_bias_report(-1, 0, 100), InvalidRange);
}

TEST_CASE("generator set validates its invariants") {
    CHECK_THROWS_AS(GeneratorSet({}, 0), std::invalid_argument);
    CHECK_THROWS_AS(GeneratorSet({{1, 2}, {1}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(GeneratorSet({{1, -2}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(GeneratorSet({{1, 2}}, 3), std::invalid_argument);
}
