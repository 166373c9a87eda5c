#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "igs/qvi.hpp"
#include "igs/zero_sum.hpp"

using namespace igs;

namespace {

ZeroSumProblem reference_problem() {
    ZeroSumProblem p;
    p.alpha = 0.5;
    p.beta = 1.0;
    p.delta = 0.5;
    p.lambda1 = 0.3;
    p.kappa1 = 0.15;
    p.lambda2 = 0.25;
    p.kappa2 = 0.2;
    return p;
}

} // namespace

TEST_CASE("exponents solve the characteristic quadratic, golden-ratio case") {
    // alpha = delta = beta^2/2 turns the quadratic into b^2 + b - 1 = 0,
    // whose roots are the golden-ratio conjugates.
    const auto [b1, b2] = zero_sum_exponents(reference_problem());
    CHECK(b1 == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-14));
    CHECK(b2 == doctest::Approx(-(std::sqrt(5.0) + 1.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("exponents reduce to (1, -1) when the drift vanishes and beta^2 = 2 delta") {
    ZeroSumProblem p = reference_problem();
    p.alpha = 0.0;
    const auto [b1, b2] = zero_sum_exponents(p);
    CHECK(b1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b2 == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("exponents satisfy the quadratic and the Vieta identities across random sets") {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> ua(0.05, 2.0), ub(0.2, 2.0), ud(0.05, 1.5);
    for (int i = 0; i < 50; ++i) {
        ZeroSumProblem p = reference_problem();
        p.alpha = ua(rng);
        p.beta = ub(rng);
        p.delta = ud(rng);
        const auto [b1, b2] = zero_sum_exponents(p);
        auto q = [&](double b) { return 0.5 * p.beta * p.beta * b * b + p.alpha * b - p.delta; };
        CHECK(std::fabs(q(b1)) < 1e-12);
        CHECK(std::fabs(q(b2)) < 1e-12);
        CHECK(b1 > 0.0);
        CHECK(b2 < 0.0);
        CHECK(b1 + b2 == doctest::Approx(-2.0 * p.alpha / (p.beta * p.beta)).epsilon(1e-10));
        CHECK(b1 * b2 == doctest::Approx(-2.0 * p.delta / (p.beta * p.beta)).epsilon(1e-10));
    }
}

TEST_CASE("reference configuration reproduces the frozen solution") {
    const ZeroSumSolution s = solve_zero_sum(reference_problem());
    REQUIRE(s.feasible);
    CHECK(s.a == doctest::Approx(0.437000836846).epsilon(1e-9));
    CHECK(s.x_low == doctest::Approx(0.282576946415).epsilon(1e-9));
    CHECK(s.x_tilde == doctest::Approx(1.57228166367).epsilon(1e-9));
    CHECK(s.x_hash == doctest::Approx(0.22781413901).epsilon(1e-9));
    CHECK(s.x_bar == doctest::Approx(2.80214121197).epsilon(1e-9));
    for (double r : s.residuals) CHECK(std::fabs(r) <= 1e-8);
    CHECK(s.x_low > 0.0);
    CHECK(s.x_low < s.x_tilde);
    CHECK(s.x_tilde < s.x_bar);
}

TEST_CASE("candidate vanishes at the absorbing boundary and pastes smoothly") {
    const ZeroSumSolution s = solve_zero_sum(reference_problem());
    CHECK(band_value(s, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

    const double slope = 1.0 / (1.0 + s.problem.lambda1);
    CHECK(band_value_dx(s, s.x_tilde) == doctest::Approx(slope).epsilon(1e-9));
    CHECK(band_value_dx(s, s.x_low) == doctest::Approx(slope).epsilon(1e-9));

    // Value matching: above the trigger the candidate continues linearly with
    // the after-cost slope of a withdrawal to the retarget.
    const double x = s.x_tilde + 0.8;
    const double expected =
        band_value(s, s.x_low) + (x - s.x_low - s.problem.kappa1) / (1.0 + s.problem.lambda1);
    CHECK(band_value(s, x) == doctest::Approx(expected).epsilon(1e-10));
    // Continuity at the trigger itself.
    CHECK(band_value(s, s.x_tilde - 1e-9) ==
          doctest::Approx(band_value(s, s.x_tilde + 1e-9)).epsilon(1e-7));
}

TEST_CASE("a larger fixed cost widens the maximizer band") {
    ZeroSumProblem p = reference_problem();
    const ZeroSumSolution s1 = solve_zero_sum(p);
    // Doubling stays inside the feasible regime; around kappa1 = 0.45 the
    // band stops fitting and the solver reports instead.
    p.kappa1 *= 2.0;
    const ZeroSumSolution s2 = solve_zero_sum(p);
    REQUIRE(s2.feasible);
    CHECK(s2.x_tilde - s2.x_low > s1.x_tilde - s1.x_low);
}

TEST_CASE("discounted candidate has consistent time derivatives") {
    const ZeroSumSolution s = solve_zero_sum(reference_problem());
    const CandidateFunction f = zero_sum_candidate(s);
    const std::array<double, 2> x{1.1, 0.0};
    const double t = 0.7;
    CHECK(f(t, x) ==
          doctest::Approx(std::exp(-s.problem.delta * t) * band_value(s, 1.1)).epsilon(1e-12));
    CHECK(f.eval_dt(t, x) == doctest::Approx(-s.problem.delta * f(t, x)).epsilon(1e-10));
    CHECK(f.eval_dx(0, t, x) ==
          doctest::Approx(std::exp(-s.problem.delta * t) * band_value_dx(s, 1.1)).epsilon(1e-12));
}

TEST_CASE("policies book intervention flows through effective costs") {
    const ZeroSumSolution s = solve_zero_sum(reference_problem());
    const auto pols = zero_sum_policies(s);
    const ThresholdPolicy& p1 = pols[0];
    const ThresholdPolicy& p2 = pols[1];

    CHECK(p1.player == 0);
    CHECK(p1.trigger == doctest::Approx(s.x_tilde));
    CHECK(p1.retarget == doctest::Approx(s.x_low));
    CHECK(p2.trigger == doctest::Approx(s.x_bar));
    CHECK(p2.retarget == doctest::Approx(s.x_hash));

    // Withdrawal: the net consumption received equals minus the booked cost.
    const double x = s.x_tilde + 0.4;
    const double z1 = s.x_low - x;
    CHECK(withdrawal_size(s, x) == doctest::Approx(-p1.cost_of(z1)).epsilon(1e-12));

    // Counter-intervention: the transfer charged per displacement z follows
    // (lambda2 z + kappa2) / (1 + lambda2).
    const double z2 = s.x_hash - s.x_bar;
    CHECK(p2.cost_of(z2) ==
          doctest::Approx((s.problem.lambda2 * z2 + s.problem.kappa2) / (1.0 + s.problem.lambda2))
              .epsilon(1e-12));
}

TEST_CASE("whole-band QVI residual vanishes for the solved candidate") {
    const ZeroSumSolution s = solve_zero_sum(reference_problem());
    const CandidateFunction f = zero_sum_candidate(s);
    const ModelSpec m = zero_sum_model(s.problem);
    const InterventionQuery q_sup = zero_sum_sup_query(s.problem);
    const InterventionQuery q_inf = zero_sum_inf_query(s.problem);

    for (double x : {0.1, 0.5, 1.0, 1.4, 1.8, 2.5, 3.5}) {
        const ZeroSumResidual r =
            qvi_residual_zero_sum(f, m, nullptr, q_sup, q_inf, 0.0, {x, 0.0});
        CHECK(std::fabs(r.residual) < 1e-8);
    }
}

TEST_CASE("oversized fixed costs are rejected, not silently passed") {
    ZeroSumProblem p = reference_problem();
    p.kappa1 = 40.0;
    CHECK_THROWS_AS(solve_zero_sum(p), RegimeError);
}

TEST_CASE("parameter validation names the positivity constraints") {
    ZeroSumProblem p = reference_problem();
    p.kappa1 = 0.0;
    CHECK_THROWS_AS(solve_zero_sum(p), InputError);
    p = reference_problem();
    p.delta = 0.0;
    CHECK_THROWS_AS(solve_zero_sum(p), InputError);
    p = reference_problem();
    p.beta = 0.0;
    CHECK_THROWS_AS(solve_zero_sum(p), InputError);
}
