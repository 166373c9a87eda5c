#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "igs/verification.hpp"

using namespace igs;

namespace {

// Sawtooth rig: unit drift, no noise, band policy resetting 1 -> 0, so every
// quantity is known in closed form.
PayoffSpec sawtooth_spec() {
    PayoffSpec spec;
    spec.model.dim = 1;
    spec.model.drift = {1.0, 0.0};
    spec.model.vol = {{{0.0, 0.0}, {0.0, 0.0}}};
    ThresholdPolicy pol;
    pol.player = 0;
    pol.coord = 0;
    pol.trigger = 1.0;
    pol.retarget = 0.0;
    pol.lambda = 0.5;
    pol.kappa = 0.2;
    pol.direction = ThresholdPolicy::Direction::InterveneWhenAbove;
    spec.policies = {pol};
    spec.x0 = {0.0, 0.0};
    spec.horizon = 2.0;
    spec.discount = 0.1;
    return spec;
}

PayoffSpec noisy_spec() {
    PayoffSpec spec = sawtooth_spec();
    spec.model.vol[0][0] = 0.3;
    spec.horizon = 4.0;
    return spec;
}

} // namespace

TEST_CASE("event accounting matches the closed-form discounted cost sum") {
    const PayoffSpec spec = sawtooth_spec();
    // Events at t = 1 and t = 2, each with z = -1 and cost 0.5*(-1)+0.2 = -0.3,
    // booked with weight -1.
    const PayoffEstimate est = estimate_payoff(spec, 4, 0.125, 99);
    const double expected = 0.3 * (std::exp(-0.1) + std::exp(-0.2));
    CHECK(est.mean == doctest::Approx(expected).epsilon(1e-12));
    CHECK(est.se == 0.0);
    CHECK(est.n_paths == 4);
    CHECK(est.events_per_path[0] == doctest::Approx(2.0));
    CHECK(est.events_per_path[1] == 0.0);
    CHECK(est.exit_fraction == 0.0);

    // Undiscounted booking drops the exponential factors.
    PayoffSpec flat = spec;
    flat.discount_event_costs = false;
    CHECK(estimate_payoff(flat, 4, 0.125, 99).mean == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("running flow integrates exactly for constants and to O(dt^2) otherwise") {
    PayoffSpec spec;
    spec.model.dim = 1;
    spec.model.drift = {0.0, 0.0};
    spec.model.vol = {{{0.0, 0.0}, {0.0, 0.0}}};
    spec.x0 = {0.0, 0.0};
    spec.horizon = 1.0;
    spec.running = [](double, const std::array<double, 2>&) { return 2.5; };

    spec.discount = 0.0;
    CHECK(estimate_payoff(spec, 2, 0.01, 1).mean == doctest::Approx(2.5).epsilon(1e-13));

    spec.discount = 0.4;
    const double exact = 2.5 * (1.0 - std::exp(-0.4)) / 0.4;
    CHECK(estimate_payoff(spec, 2, 0.001, 1).mean == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("terminal values are discounted at the end time") {
    PayoffSpec spec;
    spec.model.dim = 1;
    spec.model.drift = {0.7, 0.0};
    spec.model.vol = {{{0.0, 0.0}, {0.0, 0.0}}};
    spec.x0 = {0.25, 0.0};
    spec.horizon = 2.0;
    spec.discount = 0.3;
    spec.terminal = [](double, const std::array<double, 2>& x) { return x[0] * x[0]; };
    const double xT = 0.25 + 0.7 * 2.0;
    CHECK(estimate_payoff(spec, 2, 0.125, 1).mean ==
          doctest::Approx(std::exp(-0.6) * xT * xT).epsilon(1e-12));
}

TEST_CASE("joint scoreboards share one batch of paths") {
    const PayoffSpec base = sawtooth_spec();
    PayoffSpec negated = base;
    negated.event_weight = {+1.0, +1.0};
    const std::vector<PayoffSpec> specs{base, negated};
    const auto ests = estimate_payoffs(specs, 4, 0.125, 7);
    REQUIRE(ests.size() == 2);
    CHECK(ests[0].mean == doctest::Approx(-ests[1].mean).epsilon(1e-14));
    CHECK(ests[0].mean == doctest::Approx(estimate_payoff(base, 4, 0.125, 7).mean));
}

TEST_CASE("identity edits produce exactly zero paired difference") {
    const PayoffSpec spec = noisy_spec();
    const PolicyEdit identity{0, true, 1.0};
    const auto res = deviation_test(spec, std::vector<PolicyEdit>{identity}, 64, 0.01, 5);
    REQUIRE(res.size() == 1);
    CHECK(res[0].valid);
    CHECK(res[0].diff_mean == 0.0);
    CHECK(res[0].diff_se == 0.0);
    CHECK(res[0].base_mean == res[0].edited_mean);
}

TEST_CASE("edits that break admissibility are reported, not simulated") {
    const PayoffSpec spec = noisy_spec();
    // Scaling the trigger below the retarget inverts the band.
    const PolicyEdit bad{0, true, -1.0};
    const auto res = deviation_test(spec, std::vector<PolicyEdit>{bad}, 16, 0.01, 5);
    REQUIRE(res.size() == 1);
    CHECK_FALSE(res[0].valid);
    CHECK_FALSE(res[0].note.empty());

    const PolicyEdit absent{1, true, 0.9};
    const auto res2 = deviation_test(spec, std::vector<PolicyEdit>{absent}, 16, 0.01, 5);
    REQUIRE(res2.size() == 1);
    CHECK_FALSE(res2[0].valid);
}

TEST_CASE("standard edit set covers both levers at four factors") {
    const auto edits = standard_edits(1);
    CHECK(edits.size() == 8);
    int triggers = 0;
    for (const auto& e : edits) {
        CHECK(e.player == 1);
        if (e.edit_trigger) ++triggers;
    }
    CHECK(triggers == 4);
}

TEST_CASE("standard error shrinks like the square root of the path count") {
    const PayoffSpec spec = noisy_spec();
    const PayoffEstimate small = estimate_payoff(spec, 400, 0.01, 11);
    const PayoffEstimate large = estimate_payoff(spec, 1600, 0.01, 11);
    CHECK(large.se == doctest::Approx(small.se / 2.0).epsilon(0.35));
}

TEST_CASE("intervention counts are exact on the deterministic sawtooth") {
    const PayoffSpec spec = sawtooth_spec();
    // Binary-exact steps so the path lands on the trigger without roundoff.
    const std::vector<double> dts{0.125, 0.0625};
    const auto stats =
        intervention_scan(spec.model, spec.policies, spec.x0, 10.0, dts, 8, 3);
    REQUIRE(stats.size() == 2);
    for (const auto& st : stats) {
        CHECK(st.mean_count[0] == doctest::Approx(10.0));
        CHECK(st.se_count[0] == 0.0);
        CHECK(st.mean_count[1] == 0.0);
    }
}

TEST_CASE("a retarget equal to the trigger is rejected as inadmissible") {
    const PayoffSpec spec = sawtooth_spec();
    const ThresholdPolicy degenerate = ThresholdPolicy::unchecked(
        0, 0, 1.0, 1.0, 0.5, 0.2, ThresholdPolicy::Direction::InterveneWhenAbove);
    const std::vector<ThresholdPolicy> pols{degenerate};
    const std::vector<double> dts{0.1};
    CHECK_THROWS_AS(intervention_scan(spec.model, pols, {0.0, 0.0}, 10.0, dts, 4, 3),
                    RegimeError);
}

TEST_CASE("singular pair reproduces the intervention cost exactly") {
    ImpulseSequence seq;
    seq.times = {0.3, 0.7};
    seq.sizes = {2.0, 1.0};
    const SingularPair sp = singular_representation(seq, 0.5, 0.1);
    CHECK(sp.cost_direct == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(sp.cost_singular == doctest::Approx(1.7).epsilon(1e-14));
    REQUIRE(sp.nu_plus.size() == 2);
    // Increments carry the displacement in their difference.
    CHECK(sp.nu_plus[0] - sp.nu_minus[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sp.nu_plus[1] - sp.nu_plus[0] - (sp.nu_minus[1] - sp.nu_minus[0]) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // Random sequences agree to round-off.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uz(-3.0, 3.0), ut(0.0, 1.0);
    ImpulseSequence r;
    double t = 0.0;
    for (int i = 0; i < 50; ++i) {
        t += ut(rng);
        r.times.push_back(t);
        r.sizes.push_back(uz(rng));
    }
    const SingularPair rp = singular_representation(r, 0.8, 0.25);
    CHECK(rp.cost_singular ==
          doctest::Approx(rp.cost_direct).epsilon(1e-12));
}

TEST_CASE("singular representation validates its inputs") {
    ImpulseSequence seq;
    seq.times = {0.5, 0.4};
    seq.sizes = {1.0, 1.0};
    CHECK_THROWS_AS(singular_representation(seq, 0.5, 0.1), InputError);
    seq.times = {0.4, 0.5};
    CHECK_THROWS_AS(singular_representation(seq, 0.0, 0.1), InputError);
    seq.sizes = {1.0};
    CHECK_THROWS_AS(singular_representation(seq, 0.5, 0.1), InputError);
}

TEST_CASE("payoff estimation rejects meaningless batches") {
    const PayoffSpec spec = sawtooth_spec();
    CHECK_THROWS_AS(estimate_payoff(spec, 1, 0.125, 1), InputError);
    CHECK_THROWS_AS(estimate_payoff(spec, 4, 0.0, 1), InputError);
}

TEST_CASE("a non-finite payoff names the offending path") {
    PayoffSpec spec = sawtooth_spec();
    spec.terminal = [](double, const std::array<double, 2>&) {
        return std::numeric_limits<double>::infinity();
    };
    try {
        estimate_payoff(spec, 4, 0.125, 1);
        FAIL("expected a diagnostic");
    } catch (const RegimeError& e) {
        CHECK(std::string(e.what()).find("path seed") != std::string::npos);
    }
}

TEST_CASE("residual scans pass for both solved games") {
    ScanOptions opt;
    opt.points_per_region = 64;

    ZeroSumProblem zp;
    zp.alpha = 0.5;
    zp.beta = 1.0;
    zp.delta = 0.5;
    zp.lambda1 = 0.3;
    zp.kappa1 = 0.15;
    zp.lambda2 = 0.25;
    zp.kappa2 = 0.2;
    const ScanReport zrep = scan_zero_sum(solve_zero_sum(zp), opt);
    CHECK(zrep.max_residual <= 1e-6);
    CHECK(zrep.bindings_ok);
    CHECK(zrep.dominance_ok);

    DuopolyProblem dp;
    dp.epsilon = 0.5;
    dp.mu = {-0.4, -0.4};
    dp.sigma = {0.4, 0.4};
    dp.alpha = {1.0, 1.0};
    dp.beta = {0.015, 0.015};
    dp.lambda = {1.98, 1.98};
    dp.kappa = {0.024, 0.024};
    const ScanReport drep = scan_duopoly(solve_duopoly(dp), opt);
    CHECK(drep.max_residual <= 1e-6);
    CHECK(drep.bindings_ok);
    CHECK(drep.dominance_ok);
}

TEST_CASE("region maps carry one labeled row per grid point") {
    ZeroSumProblem zp;
    zp.alpha = 0.5;
    zp.beta = 1.0;
    zp.delta = 0.5;
    zp.lambda1 = 0.3;
    zp.kappa1 = 0.15;
    zp.lambda2 = 0.25;
    zp.kappa2 = 0.2;
    const ZeroSumSolution s = solve_zero_sum(zp);
    std::ostringstream os;
    write_region_map(os, s, 0.05, 3.0, 16);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,residual,branch,label");
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 16);
}
