#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "igs/qvi.hpp"

using namespace igs;

namespace {

CandidateFunction quadratic(double center) {
    CandidateFunction f;
    f.dim = 1;
    f.value = [center](double, const std::array<double, 2>& x) {
        const double d = x[0] - center;
        return -d * d;
    };
    return f;
}

ModelSpec diffusion1d(double drift, double sigma) {
    ModelSpec m;
    m.dim = 1;
    m.drift = {drift, 0.0};
    m.vol = {{{sigma, 0.0}, {0.0, 0.0}}};
    return m;
}

} // namespace

TEST_CASE("intervention operator pays the fixed cost at the optimum") {
    const CandidateFunction f = quadratic(1.0);
    InterventionQuery q;
    q.coord = 0;
    q.z_lo = -10.0;
    q.z_hi = 10.0;
    q.cost = {0.0, 0.3, CostConvention::SubtractedFromPayoff};
    q.maximize = true;

    const InterventionResult r = intervention_operator(f, 0.0, {4.0, 0.0}, q);
    CHECK(r.value == doctest::Approx(-0.3).epsilon(1e-10));
    CHECK(r.z_star == doctest::Approx(-3.0).epsilon(1e-6));

    // The cost scale multiplies the whole charge.
    InterventionQuery q2 = q;
    q2.cost_scale = 0.5;
    CHECK(intervention_operator(f, 0.0, {4.0, 0.0}, q2).value ==
          doctest::Approx(-0.15).epsilon(1e-10));
}

TEST_CASE("minimizing operator adds the transfer to the objective") {
    CandidateFunction f;
    f.dim = 1;
    f.value = [](double, const std::array<double, 2>& x) {
        return (x[0] - 2.0) * (x[0] - 2.0);
    };
    InterventionQuery q;
    q.coord = 0;
    q.z_lo = -10.0;
    q.z_hi = 10.0;
    q.cost = {0.0, 0.2, CostConvention::AddedToPayoff};
    q.maximize = false;

    const InterventionResult r = intervention_operator(f, 0.0, {0.5, 0.0}, q);
    CHECK(r.value == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(r.z_star == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("raising the fixed cost lowers the supremum value") {
    const CandidateFunction f = quadratic(0.0);
    InterventionQuery q;
    q.coord = 0;
    q.z_lo = -5.0;
    q.z_hi = 5.0;
    q.cost = {0.0, 0.1, CostConvention::SubtractedFromPayoff};
    const double v1 = intervention_operator(f, 0.0, {2.0, 0.0}, q).value;
    q.cost.kappa = 0.4;
    const double v2 = intervention_operator(f, 0.0, {2.0, 0.0}, q).value;
    CHECK(v2 == doctest::Approx(v1 - 0.3).epsilon(1e-10));
}

TEST_CASE("displacements are clipped to the candidate domain") {
    CandidateFunction f;
    f.dim = 1;
    f.domain_lo[0] = 0.0;
    f.domain_hi[0] = 5.0;
    f.value = [](double, const std::array<double, 2>& x) { return x[0]; };

    InterventionQuery q;
    q.coord = 0;

    const auto clipped = clip_displacement(f, q, 4.0);
    REQUIRE(clipped.has_value());
    CHECK(clipped->first >= -4.0 - 1e-12);
    CHECK(clipped->second <= 1.0 + 1e-12);

    // A displacement window that leaves the domain entirely is infeasible.
    InterventionQuery far = q;
    far.z_lo = 2.0;
    far.z_hi = 3.0;
    CHECK_FALSE(clip_displacement(f, far, 4.0).has_value());
    CHECK_THROWS_AS(intervention_operator(f, 0.0, {4.0, 0.0}, far), InputError);
}

TEST_CASE("generator annihilates constants") {
    CandidateFunction f;
    f.dim = 1;
    f.value = [](double, const std::array<double, 2>&) { return 3.7; };
    ModelSpec m = diffusion1d(0.4, 0.9);
    m.jumps.push_back({1.2, {1.0, 0.0}, MarkLaw::two_point(0.5, -0.2, 0.3)});
    CHECK(generator_apply(f, m, 0.0, {1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("generator matches the exponential closed form with jumps") {
    const double b = 0.8, mu = 0.2, sigma = 0.3, omega = 1.5, c = 0.4, rho = 0.6;
    CandidateFunction f;
    f.dim = 1;
    f.value = [b, rho](double t, const std::array<double, 2>& x) {
        return std::exp(-rho * t) * std::exp(b * x[0]);
    };
    ModelSpec m = diffusion1d(mu, sigma);
    m.jumps.push_back({omega, {1.0, 0.0}, MarkLaw::constant(c)});

    const double x = 0.7;
    const double phi = std::exp(-rho * 0.3) * std::exp(b * x);
    // A phi = phi * (-rho + b mu + sigma^2 b^2 / 2 + omega (e^{bc} - 1 - bc)).
    const double expected =
        phi * (-rho + b * mu + 0.5 * sigma * sigma * b * b + omega * (std::expm1(b * c) - b * c));
    const double got = generator_apply(f, m, 0.3, {x, 0.0});
    CHECK(got == doctest::Approx(expected).epsilon(2e-6)); // finite differences throughout
    CHECK(f.used_fd);
}

TEST_CASE("quadrature jump expectation matches the truncated-normal mgf") {
    const double b = 0.6, mu = 0.1, sig = 0.5, lo = -1.0, hi = 1.5, omega = 2.0;
    CandidateFunction f;
    f.dim = 1;
    f.value = [b](double, const std::array<double, 2>& x) { return std::exp(b * x[0]); };
    f.dt = [](double, const std::array<double, 2>&) { return 0.0; };
    f.dx[0] = [b](double, const std::array<double, 2>& x) { return b * std::exp(b * x[0]); };
    f.dxx[0][0] = [b](double, const std::array<double, 2>& x) {
        return b * b * std::exp(b * x[0]);
    };
    ModelSpec m = diffusion1d(0.0, 0.0);
    m.jumps.push_back({omega, {1.0, 0.0}, MarkLaw::truncated_normal(mu, sig, lo, hi)});

    // Closed-form compensated mark factor E[e^{bZ} - 1 - bZ] from the base
    // normal, independent of the quadrature inside the law.
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
    const double al = (lo - mu) / sig, bh = (hi - mu) / sig;
    const double Z = Phi(bh) - Phi(al);
    const double mean = mu + sig * (pdf(al) - pdf(bh)) / Z;
    const double mgf = std::exp(mu * b + 0.5 * sig * sig * b * b) *
                       (Phi(bh - sig * b) - Phi(al - sig * b)) / Z;
    const double x = 0.3;
    const double expected = std::exp(b * x) * omega * (mgf - 1.0 - b * mean);
    CHECK(generator_apply(f, m, 0.0, {x, 0.0}) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("central differences converge at second order") {
    // Halving the step divides the error by about four.
    auto g = [](double x) { return std::sin(x); };
    const double x = 0.9, exact = -std::sin(x);
    auto second_diff = [&](double h) { return (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h); };
    const double e1 = std::fabs(second_diff(1e-3) - exact);
    const double e2 = std::fabs(second_diff(5e-4) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("zero-sum residual sits on the PDE branch between the obstacles") {
    CandidateFunction f;
    f.dim = 1;
    f.value = [](double, const std::array<double, 2>& x) { return x[0] * x[0]; };
    const ModelSpec m = diffusion1d(0.0, std::sqrt(2.0));
    const RunningTerm running = [](double, const std::array<double, 2>&) { return -2.0; };

    InterventionQuery q_sup;
    q_sup.coord = 0;
    q_sup.z_lo = -1.0;
    q_sup.z_hi = -0.5;
    q_sup.cost = {0.0, 1.0, CostConvention::SubtractedFromPayoff};
    q_sup.maximize = true;
    InterventionQuery q_inf;
    q_inf.coord = 0;
    q_inf.z_lo = 0.5;
    q_inf.z_hi = 1.0;
    q_inf.cost = {0.0, 1.0, CostConvention::AddedToPayoff};
    q_inf.maximize = false;

    const ZeroSumResidual r = qvi_residual_zero_sum(f, m, running, q_sup, q_inf, 0.0, {3.0, 0.0});
    // A phi + f = 2 - 2 = 0; M_sup = 2.5^2 - 1, M_inf = 3.5^2 + 1.
    CHECK(r.pde_term == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.obstacle_p1 == doctest::Approx(9.0 - 5.25).epsilon(1e-6));
    CHECK(r.obstacle_p2 == doctest::Approx(9.0 - 13.25).epsilon(1e-6));
    CHECK(r.residual == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.branch == QviBranch::Pde);
    CHECK(r.p1_feasible);
    CHECK(r.p2_feasible);
    CHECK(r.z1 == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(r.z2 == doctest::Approx(0.5).epsilon(1e-6));

    const RegionClass cls = classify_region(r, 9.0);
    CHECK(cls.region == Region::Continuation);
    CHECK(region_label(cls.region) == "I3");
}

TEST_CASE("an infeasible supremum drops its obstacle from the inner min") {
    CandidateFunction f;
    f.dim = 1;
    f.domain_lo[0] = 0.0;
    f.value = [](double, const std::array<double, 2>& x) { return x[0] * x[0]; };
    const ModelSpec m = diffusion1d(0.0, std::sqrt(2.0));
    const RunningTerm running = [](double, const std::array<double, 2>&) { return -2.0; };

    InterventionQuery q_sup;
    q_sup.coord = 0;
    q_sup.z_lo = -5.0;
    q_sup.z_hi = -1.0; // from x = 0.2 every displacement leaves the domain
    q_sup.cost = {0.0, 1.0, CostConvention::SubtractedFromPayoff};
    InterventionQuery q_inf;
    q_inf.coord = 0;
    q_inf.z_lo = 0.5;
    q_inf.z_hi = 1.0;
    q_inf.cost = {0.0, 1.0, CostConvention::AddedToPayoff};
    q_inf.maximize = false;

    const ZeroSumResidual r =
        qvi_residual_zero_sum(f, m, running, q_sup, q_inf, 0.0, {0.2, 0.0});
    CHECK_FALSE(r.p1_feasible);
    CHECK(r.p2_feasible);
    CHECK(r.branch == QviBranch::Pde);
    CHECK(r.residual == doctest::Approx(r.pde_term).epsilon(1e-9));
}

TEST_CASE("own-obstacle residual for a maximizing firm uses the supermartingale sign") {
    CandidateFunction f;
    f.dim = 1;
    f.value = [](double, const std::array<double, 2>& x) { return x[0] * x[0]; };
    const ModelSpec m = diffusion1d(0.0, std::sqrt(2.0));
    const RunningTerm running = [](double, const std::array<double, 2>&) { return -2.0; };

    InterventionQuery q;
    q.coord = 0;
    q.z_lo = -1.0;
    q.z_hi = -0.5;
    q.cost = {0.0, 1.0, CostConvention::SubtractedFromPayoff};

    const ObstacleResidual r = qvi_residual_nonzero_sum(f, m, running, q, 0.0, {3.0, 0.0});
    CHECK(r.pde_term == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.obstacle == doctest::Approx(5.25 - 9.0).epsilon(1e-6));
    CHECK(r.residual == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.pde_branch);
    CHECK(r.feasible);
}
