#include <catch2/catch_amalgamated.hpp>

#include <crowdcode/crowd.hpp>

#include "oracles.hpp"

#include <cmath>
#include <numeric>

using namespace crowdcode;
using Catch::Matchers::WithinAbs;

TEST_CASE("mean_reliability closed forms") {
    CrowdSpec s;
    s.dist = SpammerHammer{0.6, 0.25, 1.0};
    CHECK_THAT(mean_reliability(s), WithinAbs(0.7, 1e-15));
    s.dist = BetaDist{0.5, 0.5};
    CHECK_THAT(mean_reliability(s), WithinAbs(0.5, 1e-15));
    s.dist = SpammerHammer{1.0, 0.3, 1.0};
    CHECK_THAT(mean_reliability(s), WithinAbs(1.0, 1e-15));
}

TEST_CASE("covariance_from_correlation uses the closed-form variance") {
    const ReliabilityDist arcsine = BetaDist{0.5, 0.5};
    CHECK_THAT(covariance_from_correlation(arcsine, -0.5), WithinAbs(-0.0625, 1e-15));
    CHECK_THAT(covariance_from_correlation(arcsine, 0.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(covariance_from_correlation(arcsine, 1.0), WithinAbs(0.125, 1e-15));
    CHECK_THROWS_AS(covariance_from_correlation(arcsine, 1.5), std::invalid_argument);
}

TEST_CASE("iid all-hammer crowd is deterministic") {
    CrowdSpec s;
    s.dist = SpammerHammer{1.0, 0.25, 1.0};
    const auto p = sample_reliabilities(s, 5, 42);
    for (double v : p) CHECK(v == 1.0);
}

TEST_CASE("sampled reliabilities stay in the unit interval") {
    for (auto variant : {CrowdVariant::IID, CrowdVariant::Paired, CrowdVariant::LatentGroups}) {
        CrowdSpec s;
        s.variant = variant;
        s.dist = BetaDist{0.5, 0.5};
        s.rho = covariance_from_correlation(s.dist, 0.4);
        s.kappa = 1.0;
        s.truncation = 8;
        for (double v : sample_reliabilities(s, 100, 5)) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("paired sampling hits the requested covariance") {
    CrowdSpec s;
    s.variant = CrowdVariant::Paired;
    s.dist = BetaDist{0.5, 0.5};
    s.rho = covariance_from_correlation(s.dist, 0.9);
    CrowdSampler sampler(s);
    auto rng = make_engine(123);
    const long pairs = 10000;
    double sx = 0, sy = 0, sxy = 0, sxx = 0;
    for (long k = 0; k < pairs; ++k) {
        const auto p = sampler.sample(2, rng);
        sx += p[0];
        sy += p[1];
        sxy += p[0] * p[1];
        sxx += p[0] * p[0];
    }
    const double cov = sxy / pairs - (sx / pairs) * (sy / pairs);
    // stderr of the sample covariance, rough normal approximation
    const double se = 0.125 / std::sqrt(static_cast<double>(pairs)) * 2.0;
    CHECK_THAT(cov, WithinAbs(s.rho, 3 * se));
}

TEST_CASE("pair sampling preserves the marginal mean") {
    CrowdSpec paired;
    paired.variant = CrowdVariant::Paired;
    paired.dist = BetaDist{0.5, 0.5};
    paired.rho = covariance_from_correlation(paired.dist, -0.5);
    const int n = 20000;
    const auto p = sample_reliabilities(paired, n, 99);
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / n;
    const double se = std::sqrt(0.125 / n);
    CHECK_THAT(mean, WithinAbs(0.5, 3 * se));
}

TEST_CASE("paired sampling rejects odd N and infeasible covariance") {
    CrowdSpec s;
    s.variant = CrowdVariant::Paired;
    s.dist = BetaDist{0.5, 0.5};
    CHECK_THROWS_AS(sample_reliabilities(s, 5, 1), std::invalid_argument);
    s.rho = 0.2;  // beyond Var = 0.125
    CHECK_THROWS_AS(CrowdSampler(s), std::invalid_argument);
}

TEST_CASE("group assignment probability closed values") {
    CHECK_THAT(group_assignment_prob({{0}, 1}, 1.0), WithinAbs(0.5, 1e-12));
    CHECK_THAT(group_assignment_prob({{0, 0}, 1}, 1.0), WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(group_assignment_prob({{0, 1}, 2}, 1.0), WithinAbs(1.0 / 12.0, 1e-12));
    CHECK_THROWS_AS(group_assignment_prob({{0}, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("group assignment probability matches the quadrature oracle") {
    for (double kappa : {0.1, 1.0, 3.7}) {
        const GroupAssignment s{{0, 1, 1, 2, 0}, 3};
        const double got = group_assignment_prob(s, kappa);
        const double want = oracle::stick_prob_quadrature(s.counts(), kappa, 5);
        CHECK_THAT(got, WithinAbs(want, 1e-10));
    }
}

TEST_CASE("truncated assignment mass approaches one from below") {
    const double m2 = assignment_mass(4, 2, 0.1);
    const double m4 = assignment_mass(4, 4, 0.1);
    CHECK(m2 < m4);
    CHECK(m4 < 1.0 + 1e-12);
    CHECK(m4 > 0.99);
}

TEST_CASE("stick breaking fragments with large kappa") {
    CrowdSpec s;
    s.variant = CrowdVariant::LatentGroups;
    s.dist = BetaDist{0.5, 0.5};
    s.truncation = 400;
    auto largest_fraction = [&](double kappa) {
        s.kappa = kappa;
        CrowdSampler sampler(s);
        auto rng = make_engine(17);
        GroupAssignment ga;
        sampler.sample(10000, rng, &ga);
        long mx = 0;
        for (long c : ga.counts()) mx = std::max(mx, c);
        return static_cast<double>(mx) / 10000.0;
    };
    CHECK(largest_fraction(0.01) > 0.9);
    CHECK(largest_fraction(100.0) < 0.2);
}

TEST_CASE("worker reliability mean tracks the group reliability") {
    // One group: every p_j ~ Beta(r/(1-r),1) with the same r, so E[p_j] = E[r] = mu.
    CrowdSpec s;
    s.variant = CrowdVariant::LatentGroups;
    s.dist = BetaDist{2.0, 2.0};
    s.truncation = 1;
    s.kappa = 1.0;
    CrowdSampler sampler(s);
    auto rng = make_engine(31);
    double sum = 0;
    const int reps = 4000, n = 8;
    for (int k = 0; k < reps; ++k) {
        const auto p = sampler.sample(n, rng);
        sum += std::accumulate(p.begin(), p.end(), 0.0) / n;
    }
    const double se = 0.35 / std::sqrt(static_cast<double>(reps));
    CHECK_THAT(sum / reps, WithinAbs(0.5, 3 * se));
}

TEST_CASE("crowd spec JSON round trip") {
    CrowdSpec s;
    s.variant = CrowdVariant::Paired;
    s.dist = BetaDist{0.5, 0.5};
    s.rho = covariance_from_correlation(s.dist, -0.5);
    const auto back = spec_from_json(spec_to_json(s));
    CHECK(back.variant == CrowdVariant::Paired);
    CHECK_THAT(back.rho, WithinAbs(s.rho, 1e-12));

    CrowdSpec g;
    g.variant = CrowdVariant::LatentGroups;
    g.dist = SpammerHammer{0.6, 0.125, 1.0};
    g.kappa = 2.5;
    g.truncation = 6;
    const auto gb = spec_from_json(spec_to_json(g));
    CHECK(gb.kappa == 2.5);
    CHECK(gb.truncation == 6);
    CHECK(std::get<SpammerHammer>(gb.dist).quality == 0.6);
}
