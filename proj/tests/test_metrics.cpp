#include <doctest.h>

#include <cmath>
#include <random>

#include "evince/errors.hpp"
#include "evince/metrics.hpp"
#include "oracles.hpp"

using namespace evince;
using namespace evince::metrics;

namespace {

const LabelScale kScale = LabelScale::bias_five_point();

Distribution dist(std::vector<double> p) { return Distribution(kScale, std::move(p)); }

// The four recorded debate rounds the reproduction tests pin against.
const Distribution kA1 = dist({0.05, 0.15, 0.50, 0.25, 0.05});
const Distribution kB1 = dist({0.10, 0.10, 0.25, 0.35, 0.20});
const Distribution kA2 = dist({0.07, 0.13, 0.40, 0.30, 0.10});
const Distribution kB2 = dist({0.05, 0.10, 0.20, 0.40, 0.25});
const Distribution kA3 = dist({0.05, 0.10, 0.35, 0.35, 0.15});
const Distribution kB3 = dist({0.05, 0.10, 0.30, 0.35, 0.20});

}  // namespace

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(dist({0.5, 0.5, 0.5, 0.0, 0.0}), ValidationError);      // sums to 1.5
    CHECK_THROWS_AS(dist({-0.1, 0.4, 0.3, 0.2, 0.2}), ValidationError);     // negative entry
    CHECK_THROWS_AS(Distribution(kScale, {0.5, 0.5}), ValidationError);     // wrong length
    // Within the 1e-6 slack: renormalized, not rejected.
    const auto d = dist({0.2, 0.2, 0.2, 0.2, 0.2000005});
    double sum = 0.0;
    for (double v : d.probs()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy: bounds and pinned values") {
    CHECK(entropy_bits(Distribution::uniform(kScale)) ==
          doctest::Approx(2.321928094887362).epsilon(1e-12));
    CHECK(entropy_bits(Distribution::point_mass(kScale, 0)) == 0.0);
    // Frozen by the direct-summation oracle before the build.
    CHECK(entropy_bits(kA1) == doctest::Approx(1.842737648613667).epsilon(1e-12));
    CHECK(entropy_bits(kA1) == doctest::Approx(oracle::direct_entropy(kA1.probs())).epsilon(1e-12));
}

TEST_CASE("kl divergence: identity, direction, recorded rounds") {
    CHECK(kl_divergence(kA1, kA1) == doctest::Approx(0.0).epsilon(1e-9));
    // Direction matters: the recorded table value is KL(A||B) in base 2.
    CHECK(std::abs(kl_divergence(kA1, kB1) - 0.316) < 0.001);
    CHECK(kl_divergence(kA1, kB1) == doctest::Approx(0.3163876683207655).epsilon(1e-9));
    CHECK(kl_divergence(kB1, kA1) == doctest::Approx(0.3614031389229077).epsilon(1e-9));
    CHECK(std::abs(kl_divergence(kA3, kB3) - 0.016) < 0.001);
    CHECK(kl_divergence(kA3, kB3) == doctest::Approx(0.0155817225879527).epsilon(1e-9));
    CHECK_THROWS_AS(
        kl_divergence(kA1, Distribution::uniform(LabelScale({"x", "y", "z", "w", "v"}))),
        ScaleMismatchError);
}

TEST_CASE("js divergence: symmetry, bounds, recorded rounds") {
    CHECK(js_divergence(kA1, kA1) == 0.0);
    CHECK(std::abs(js_divergence(kA1, kB1) - 0.081) < 0.001);
    CHECK(std::abs(js_divergence(kA2, kB2) - 0.056) < 0.001);
    CHECK(js_divergence(kA1, kB1) == doctest::Approx(0.0811964115123800).epsilon(1e-9));
    CHECK(js_divergence(kA2, kB2) == doctest::Approx(0.0562585387504182).epsilon(1e-9));
    // Round 3 prints as 0.004; the direct recomputation (recorded in
    // docs/formats.md) gives 0.0039737.
    CHECK(js_divergence(kA3, kB3) == doctest::Approx(0.0039736542664052).epsilon(1e-9));
    CHECK(js_divergence(kA1, kB1) == doctest::Approx(js_divergence(kB1, kA1)).epsilon(1e-15));
}

TEST_CASE("ordinal wasserstein: CDF closed form") {
    CHECK(wasserstein_ordinal(kA1, kB1) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(wasserstein_ordinal(kA2, kB2) == doctest::Approx(0.47).epsilon(1e-12));
    CHECK(wasserstein_ordinal(Distribution::point_mass(kScale, 0),
                              Distribution::point_mass(kScale, 4)) == doctest::Approx(4.0));
    CHECK(wasserstein_ordinal(kA3, kA3) == 0.0);
}

TEST_CASE("cross entropy: identities") {
    const auto uniform = Distribution::uniform(kScale);
    CHECK(cross_entropy(uniform, uniform) == doctest::Approx(2.321928094887362).epsilon(1e-8));
    CHECK(cross_entropy(kA1, kB1) ==
          doctest::Approx(entropy_bits(kA1) + kl_divergence(kA1, kB1)).epsilon(1e-9));
    CHECK(cross_entropy(Distribution::point_mass(kScale, 2), uniform) ==
          doctest::Approx(2.321928094887362).epsilon(1e-8));
}

TEST_CASE("mutual information and nmi") {
    SUBCASE("independent joint has zero information") {
        std::vector<std::vector<double>> cells(5, std::vector<double>(5));
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) cells[i][j] = kA1[i] * kB1[j];
        }
        JointDistribution joint(cells);
        CHECK(mutual_information_bits(joint) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("diagonal joint with uniform marginals is perfectly dependent") {
        std::vector<std::vector<double>> cells(5, std::vector<double>(5, 0.0));
        for (std::size_t i = 0; i < 5; ++i) cells[i][i] = 0.2;
        JointDistribution joint(cells);
        CHECK(mutual_information_bits(joint) ==
              doctest::Approx(2.321928094887362).epsilon(1e-12));
        CHECK(normalized_mutual_information(joint) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("arbitrary 3x3 joint matches the triple-loop oracle") {
        const std::vector<std::vector<double>> cells{{0.10, 0.05, 0.05},
                                                     {0.05, 0.20, 0.05},
                                                     {0.02, 0.08, 0.40}};
        JointDistribution joint(cells);
        // Frozen oracle value.
        CHECK(mutual_information_bits(joint) ==
              doctest::Approx(0.3537637453377507).epsilon(1e-9));
        CHECK(mutual_information_bits(joint) ==
              doctest::Approx(oracle::triple_loop_mi(cells)).epsilon(1e-12));
        CHECK(normalized_mutual_information(joint) ==
              doctest::Approx(0.2381485212161097).epsilon(1e-9));
    }
    SUBCASE("invalid joints are rejected") {
        CHECK_THROWS_AS(JointDistribution({{0.5, 0.2}, {0.1, 0.1}}), ValidationError);
        CHECK_THROWS_AS(JointDistribution({{0.5, -0.1}, {0.3, 0.3}}), ValidationError);
    }
}

TEST_CASE("kl proxy for mutual information") {
    CHECK(kl_proxy(kA1, kA1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(kl_proxy(kA1, kB1) == doctest::Approx(0.3388954036218366).epsilon(1e-9));
    const double r3 = kl_proxy(kA3, kB3);
    CHECK(r3 == doctest::Approx(0.0159357480076536).epsilon(1e-9));
    CHECK(r3 < 0.05);
}

TEST_CASE("snapshot wiring") {
    const auto s = make_snapshot(kA1, kB1);
    CHECK(s.entropy_a == doctest::Approx(1.842737648613667));
    CHECK(s.kl_ab == doctest::Approx(0.3163876683207655));
    CHECK(s.wd == doctest::Approx(0.45));
    CHECK(s.wd_normalized == doctest::Approx(0.45 / 4.0));
    CHECK(!s.mutual_info);
    CHECK(!s.nmi);
    REQUIRE(s.kl_proxy);
    CHECK(*s.kl_proxy == doctest::Approx(0.3388954036218366));
}

TEST_CASE("metric properties on random distribution pairs") {
    std::mt19937 rng(20240817);
    const int kPairs = 2000;
    for (int iter = 0; iter < kPairs; ++iter) {
        const bool sparse = iter % 3 == 0;
        const auto p = oracle::random_on(rng, kScale, sparse);
        const auto q = oracle::random_on(rng, kScale, sparse);
        const auto r = oracle::random_on(rng, kScale, sparse);

        CAPTURE(iter);
        CHECK(js_divergence(p, q) == doctest::Approx(js_divergence(q, p)).epsilon(1e-12));
        CHECK(js_divergence(p, q) >= 0.0);
        CHECK(js_divergence(p, q) <= 1.0 + 1e-12);
        CHECK(kl_divergence(p, q) >= 0.0);
        CHECK(cross_entropy(p, q) - entropy_bits(p) - kl_divergence(p, q) ==
              doctest::Approx(0.0).epsilon(1e-9));

        const double wd_pq = wasserstein_ordinal(p, q);
        CHECK(wd_pq == doctest::Approx(wasserstein_ordinal(q, p)).epsilon(1e-12));
        CHECK(wd_pq <= wasserstein_ordinal(p, r) + wasserstein_ordinal(r, q) + 1e-9);
        CHECK(wd_pq ==
              doctest::Approx(oracle::greedy_transport(p.probs(), q.probs())).epsilon(1e-9));

        const double h = entropy_bits(p);
        CHECK(h >= 0.0);
        CHECK(h <= 2.321928094887362 + 1e-12);
    }
}

TEST_CASE("uniform uniquely maximizes entropy") {
    std::mt19937 rng(7);
    const double huni = entropy_bits(Distribution::uniform(kScale));
    for (int iter = 0; iter < 500; ++iter) {
        const auto p = oracle::random_on(rng, kScale);
        double max_dev = 0.0;
        for (double v : p.probs()) max_dev = std::max(max_dev, std::abs(v - 0.2));
        if (max_dev > 1e-3) {
            CHECK(entropy_bits(p) < huni);
        }
    }
}

TEST_CASE("nmi stays in [0,1] on random joints") {
    std::mt19937 rng(99);
    std::exponential_distribution<double> exp_dist(1.0);
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<std::vector<double>> cells(4, std::vector<double>(4));
        double sum = 0.0;
        for (auto& row : cells) {
            for (double& v : row) {
                v = exp_dist(rng);
                sum += v;
            }
        }
        for (auto& row : cells) {
            for (double& v : row) v /= sum;
        }
        JointDistribution joint(cells);
        const double nmi = normalized_mutual_information(joint);
        CHECK(nmi >= 0.0);
        CHECK(nmi <= 1.0);
        CHECK(mutual_information_bits(joint) ==
              doctest::Approx(oracle::triple_loop_mi(cells)).epsilon(1e-9));
    }
}
