#include "doctest.h"

#include <cmath>

#include "ulln/bounds.hpp"
#include "ulln/rng.hpp"

using namespace ulln;

TEST_SUITE("bounds") {

TEST_CASE("cq constants match the displayed formula") {
    // q=3: k=2, (1/2*8^3 + 4*16^3)^(1/3) = 16640^(1/3)
    CHECK(cq_constant(3.0) == doctest::Approx(std::cbrt(16640.0)).epsilon(1e-13));
    // q=4: k=3, (1/2*12^4 + 3*24^4)^(1/4) = 1005696^(1/4)
    CHECK(cq_constant(4.0) == doctest::Approx(std::pow(1005696.0, 0.25)).epsilon(1e-13));
    // q=2.5: k=2, frozen regression value
    CHECK(cq_constant(2.5) == doctest::Approx(23.997836651428606).epsilon(1e-12));
    CHECK(cq_constant_pow_q(3.0) == doctest::Approx(16640.0).epsilon(1e-14));
    CHECK_THROWS_AS(cq_constant(2.0), ValidationError);
    CHECK_THROWS_AS(cq_constant(1.0), ValidationError);
}

TEST_CASE("n0 threshold is the smallest integer passing the power test") {
    CHECK(n0_threshold(4.0, 1.0) == 8); // 8^(1/3) = 2 exactly
    CHECK(n0_threshold(3.0, 1.0) == 11); // 2^(10/3) ~ 10.079
    CHECK(n0_threshold(4.0, 100.0) == 6); // exponent -> 2/5; 5^(2/5) < 2 <= 6^(2/5)
    CHECK(n0_threshold(3.0, 0.5) == 16); // 2^(1/e) = 16 exactly
    for (auto [q, r] : {std::pair{3.0, 1.0}, {4.0, 1.0}, {2.5, 0.7}, {6.0, 2.0}}) {
        const auto n0 = n0_threshold(q, r);
        const double e = n0_exponent(q, r);
        CHECK(std::pow(static_cast<double>(n0), e) >= 2.0 * (1.0 - 1e-12));
        if (n0 > 1)
            CHECK(std::pow(static_cast<double>(n0 - 1), e) < 2.0 * (1.0 + 1e-12));
    }
}

TEST_CASE("complete lln condition") {
    CHECK_FALSE(complete_lln_condition(3.0, 1.0)); // (9-6-2)*1 = 1
    CHECK(complete_lln_condition(4.0, 1.0));       // 6 > 2
    CHECK(complete_lln_condition(3.0, 3.0));       // 3 > 2
}

TEST_CASE("main bound rhs at the worked point") {
    BoundParams params;
    params.q = 4.0;
    params.r = 1.0;
    params.T = 1.0;
    params.M = 1.0;
    params.wbar = 1.0;
    params.N = 16;
    const double expected =
        std::exp2(3.0) * std::pow(16.0, -4.0 / 3.0) * (3.0 * 1005696.0 + 256.0);
    CHECK(main_bound_rhs(params) == doctest::Approx(expected).epsilon(1e-12));

    auto below = params;
    below.N = 7;
    CHECK_THROWS_AS(main_bound_rhs(below), NumericError);

    auto scaled = params;
    scaled.M = 2.0; // homogeneity of degree q in M
    CHECK(main_bound_rhs(scaled) == doctest::Approx(16.0 * main_bound_rhs(params)).epsilon(1e-12));

    auto bigger = params;
    bigger.N = 128; // power law in N: (8N)^(-4/3) = N^(-4/3)/16
    CHECK(main_bound_rhs(bigger)
          == doctest::Approx(main_bound_rhs(params) / 16.0).epsilon(1e-12));
}

TEST_CASE("choose q") {
    CHECK(choose_q(2.0, 0.25, 1.0) == 3.0);
    CHECK(choose_q(5.0, 0.4, 1.0) == doctest::Approx(8.0).epsilon(1e-13));
    CHECK(choose_q(5.0, 1e-9, 1.0) == doctest::Approx(5.0)); // gamma -> 0+: max(3, ~0, p)
    CHECK_THROWS_AS(choose_q(2.0, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(choose_q(2.0, 0.0, 1.0), ValidationError);
}

TEST_CASE("main2 rhs: worked point and consistency with the q-th root") {
    BoundParams params;
    params.T = 1.0;
    params.M = 1.0;
    params.wbar = 1.0;
    params.r = 1.0;
    params.N = 16;
    params.gamma = 0.25;
    params.p = 2.0; // q = 3
    const double expected =
        std::pow(16.0, -0.25) * std::exp2(2.0 / 3.0) * std::cbrt(16640.0 * 3.0 + 64.0);
    CHECK(main2_bound_rhs(params) == doctest::Approx(expected).epsilon(1e-12));

    // at gamma = rq/(2qr+2r+2) exactly, main2 equals main^(1/q)
    BoundParams tie = params;
    tie.gamma = 0.3; // n0_exponent(3,1) = 3/10
    tie.p = 3.0;
    tie.N = 20;
    BoundParams main_side = tie;
    main_side.q = 3.0;
    CHECK(main2_bound_rhs(tie)
          == doctest::Approx(std::pow(main_bound_rhs(main_side), 1.0 / 3.0)).epsilon(1e-12));

    // linear in M
    BoundParams scaled = params;
    scaled.M = 3.5;
    CHECK(main2_bound_rhs(scaled)
          == doctest::Approx(3.5 * main2_bound_rhs(params)).epsilon(1e-12));

    BoundParams below = params;
    below.N = 5;
    CHECK_THROWS_AS(main2_bound_rhs(below), NumericError);
}

TEST_CASE("scalar lln bound with a Bernoulli Monte Carlo check") {
    CHECK(scalar_lln_bound(4.0, 1.0, 100) == doctest::Approx(cq_constant(4.0) / 10.0));
    CHECK(scalar_lln_bound(4.0, 1.0, 400)
          == doctest::Approx(0.5 * scalar_lln_bound(4.0, 1.0, 100)).epsilon(1e-13));

    // E|Ybar - 1/2|^4 for N=100 fair coins is (3N-2)/(16 N^3)
    const int n = 100, reps = 100000;
    rng::Xoshiro256 gen(2024);
    double sum4 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        int heads = 0;
        for (int i = 0; i < n; ++i)
            heads += gen.uniform01() < 0.5;
        const double dev = std::abs(static_cast<double>(heads) / n - 0.5);
        sum4 += dev * dev * dev * dev;
    }
    const double emp4 = sum4 / reps;
    const double exact4 = (3.0 * n - 2.0) / (16.0 * static_cast<double>(n) * n * n);
    CHECK(emp4 == doctest::Approx(exact4).epsilon(0.05));
    const double m_bern = std::pow(0.5, 0.25); // (E|X|^4)^(1/4), X ~ Bernoulli(1/2)
    CHECK(std::pow(emp4, 0.25) <= scalar_lln_bound(4.0, m_bern, n));
}

TEST_CASE("discretization bound rhs") {
    // K = 1, n huge: the slack term vanishes
    CHECK(discretization_bound_rhs(1.0, 1e12, 3.0, 0.25, 1.0)
          == doctest::Approx(std::exp2(2.0) * 0.25).epsilon(1e-9));
    // q = 1: plain K*sup + (2/n)*top
    CHECK(discretization_bound_rhs(5.0, 4.0, 1.0, 0.1, 2.0)
          == doctest::Approx(5.0 * 0.1 + 0.5 * 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(discretization_bound_rhs(0.5, 1.0, 1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("the proof's substitutions assemble the main bound exactly") {
    // Plug the gate-count bound and the scalar LLN bound into the
    // discretization inequality, replace n by N^(rq/(2qr+2r+2)) in the first
    // term and by half of it in the slack term, and absorb the lone "+1"
    // through N^(-q/2) <= N^(-q e). The assembled value is the main RHS.
    const double q = 4.0, r = 1.0, T = 1.0, M = 1.0, wbar = 1.0;
    const std::int64_t N = 16;
    const double e = n0_exponent(q, r);
    const double x = std::pow(static_cast<double>(N), e);
    const double k_star = 2.0 * T * std::pow(wbar, 1.0 / r) * std::pow(x, (r + 1.0) / r)
                        + std::pow(static_cast<double>(N), q / 2.0 - rate_exponent(q, r));
    const double sup_mom = std::pow(scalar_lln_bound(q, M, N), q);
    const double assembled =
        discretization_bound_rhs(k_star, 0.5 * x, q, sup_mom, std::pow(M, q));
    BoundParams params;
    params.q = q;
    params.r = r;
    params.T = T;
    params.M = M;
    params.wbar = wbar;
    params.N = N;
    CHECK(assembled == doctest::Approx(main_bound_rhs(params)).epsilon(1e-12));
}

TEST_CASE("latd moment bound") {
    CHECK(latd_moment_bound(1.0, 1.0, 2) == 20.0);
    CHECK(poisson_raw_moment(1.0, 2) == doctest::Approx(2.0)); // below the bound
    CHECK(latd_moment_bound(1.0, 1.0, 1) == 4.0);
    CHECK(latd_moment_bound(0.0, 1.0, 3) == doctest::Approx(216.0)); // (2q)^q
    CHECK_THROWS_AS(latd_moment_bound(-1.0, 1.0, 2), ValidationError);
}

TEST_CASE("poisson raw moments via Stirling numbers, with a Monte Carlo cross-check") {
    CHECK(poisson_raw_moment(1.0, 1) == doctest::Approx(1.0));
    CHECK(poisson_raw_moment(1.0, 2) == doctest::Approx(2.0));
    CHECK(poisson_raw_moment(1.0, 3) == doctest::Approx(5.0));
    CHECK(poisson_raw_moment(1.0, 4) == doctest::Approx(15.0));
    CHECK(poisson_raw_moment(1.0, 8) == doctest::Approx(4140.0));
    CHECK(poisson_raw_moment(2.0, 2) == doctest::Approx(6.0)); // mu + mu^2 + ... = 2 + 4

    const int reps = 1000000;
    rng::Xoshiro256 gen(77);
    double sum4 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        int count = 0;
        double t = gen.exponential(1.0);
        while (t <= 1.0) {
            ++count;
            t += gen.exponential(1.0);
        }
        sum4 += std::pow(static_cast<double>(count), 4);
    }
    const double emp = sum4 / reps;
    // Var(Z^4) = E Z^8 - (E Z^4)^2 = 4140 - 225
    const double se = std::sqrt((4140.0 - 225.0) / reps);
    CHECK(std::abs(emp - 15.0) < 3.0 * se);
}

TEST_CASE("series oracle telescopes for constant intensity") {
    auto one = intensity_constant(1.0, 1.0);
    const auto s1 = latd_mean_series(one, 0.0, 1.0, 20, 1e-8);
    CHECK(std::abs(s1.value - 1.0) <= 1e-8);
    CHECK(s1.tail_bound <= 1e-12);

    auto lam = intensity_constant(1.7, 1.0);
    const auto s2 = latd_mean_series(lam, 0.2, 0.9, 20, 1e-8);
    CHECK(std::abs(s2.value - 1.7 * 0.7) <= 1e-8);

    CHECK(latd_mean_series(one, 0.4, 0.4, 20, 1e-8).value == 0.0);
    CHECK_THROWS_AS(latd_mean_series(one, 0.9, 0.2, 20, 1e-8), ValidationError);
    auto fast = intensity_constant(30.0, 1.0);
    CHECK_THROWS_AS(latd_mean_series(fast, 0.0, 1.0, 3, 1e-8), NumericError);
}

TEST_CASE("normalization identity holds for every built-in family") {
    const IntensityModel models[] = {intensity_constant(1.0, 1.0),
                                     intensity_constant(2.0, 1.0),
                                     intensity_last_linear(1.0, 1.0, 1.0),
                                     intensity_time_ramp(0.5, 1.5, 1.0),
                                     intensity_product(0.5, 1.0, 1.0, 1.0)};
    for (const auto& m : models) {
        CAPTURE(m.name);
        for (double t : {0.25, 0.5, 1.0})
            CHECK(latd_normalization_residual(m, t, 20) <= 1e-8);
    }
    CHECK(latd_normalization_residual(intensity_constant(1.0, 1.0), 0.0, 20) == 0.0);
    CHECK(latd_normalization_residual(intensity_constant(0.0, 1.0), 1.0, 20) == 0.0);
}

TEST_CASE("mean increment bound dominates the series") {
    CHECK(latd_mean_increment_bound(1.0, 0.0, 1.0) == 1.0);
    CHECK(latd_mean_increment_bound(2.0, 0.25, 0.75) == doctest::Approx(1.0));
    CHECK(latd_mean_increment_bound(1.0, 0.3, 0.3) == 0.0);
    const IntensityModel models[] = {intensity_constant(1.0, 1.0),
                                     intensity_last_linear(0.5, 1.0, 1.0)};
    for (const auto& m : models) {
        for (auto [s, t] : {std::pair{0.0, 1.0}, {0.2, 0.7}}) {
            const auto series = latd_mean_series(m, s, t, 20, 1e-8);
            CHECK(series.value <= latd_mean_increment_bound(m.sup_bound, s, t) + 1e-8);
        }
    }
}

TEST_CASE("rate exponent is monotone and approaches its large-r limit") {
    for (double q : {2.1, 3.0, 4.0, 6.0, 10.0}) {
        for (double r : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            CHECK(rate_exponent(q + 0.1, r) > rate_exponent(q, r));
            CHECK(rate_exponent(q, r + 0.1) > rate_exponent(q, r));
        }
        const double limit = q * q / (2.0 * q + 2.0);
        CHECK(std::abs(rate_exponent(q, 1000.0) - limit) / limit < 0.01);
    }
    // the achievable order of fluctuation approaches 1/2 for large q and r
    CHECK(std::abs(n0_exponent(1000.0, 1000.0) - 0.5) < 0.01 * 0.5);
}

TEST_CASE("the proof's n_N stays above half the power") {
    rng::Xoshiro256 gen(31);
    for (auto [q, r] : {std::pair{3.0, 1.0}, {4.0, 1.0}, {2.5, 0.5}, {6.0, 3.0}}) {
        const auto n0 = n0_threshold(q, r);
        const double e = n0_exponent(q, r);
        for (int i = 0; i < 300; ++i) {
            const double lg =
                std::log(static_cast<double>(n0))
                + gen.uniform01() * (std::log(1e6) - std::log(static_cast<double>(n0)));
            const auto n = static_cast<std::int64_t>(std::floor(std::exp(lg)));
            const double power = std::pow(static_cast<double>(n), e);
            CHECK(std::floor(power) > 0.5 * power);
        }
    }
}

} // TEST_SUITE
