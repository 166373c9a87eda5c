// Command-line front end: solve either game from a JSON configuration,
// simulate the resulting policies, run residual scans, or emit a region map.
// Exit codes: 0 success, 1 invalid input, 2 structural failure (no feasible
// regime or a failed verification).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "igs/errors.hpp"
#include "igs/json_io.hpp"
#include "igs/sde_engine.hpp"
#include "igs/verification.hpp"

using namespace igs;

namespace {

bool log_enabled() { return std::getenv("IGS_LOG") != nullptr; }

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("config file '" + path + "': " + e.what());
    }
}

void write_artifact(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw InputError("cannot write output file '" + path + "'");
    out << j.dump(2) << '\n';
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cout << "warning: " << w << '\n';
}

// Scoreboard bundles for the two games. The zero-sum scoreboard nets the
// maximizer's withdrawals against the minimizer's transfers; each duopoly
// firm pays only its own intervention costs.
PayoffSpec zero_sum_payoff_spec(const ZeroSumSolution& s, const SimulationParams& sim) {
    PayoffSpec spec;
    spec.model = zero_sum_model(s.problem);
    const auto pols = zero_sum_policies(s);
    spec.policies.assign(pols.begin(), pols.end());
    spec.x0 = sim.x0_set ? sim.x0 : std::array<double, 2>{0.5 * (s.x_low + s.x_tilde), 0.0};
    spec.horizon = sim.horizon;
    spec.discount = s.problem.delta;
    spec.event_weight = {-1.0, +1.0};
    return spec;
}

std::array<PayoffSpec, 2> duopoly_payoff_specs(const DuopolySolution& s,
                                               const SimulationParams& sim) {
    const DuopolyProblem& p = s.problem;
    const auto pols = build_duopoly_policies(s);
    std::array<PayoffSpec, 2> specs;
    for (int i = 0; i < 2; ++i) {
        specs[i].model = duopoly_model(p);
        specs[i].policies.assign(pols.begin(), pols.end());
        specs[i].x0 = sim.x0_set ? sim.x0 : s.x_hat;
        specs[i].horizon = sim.horizon;
        specs[i].discount = p.epsilon;
        const int j = 1 - i;
        specs[i].running = [p, i, j](double, const std::array<double, 2>& x) {
            return p.alpha[i] * x[i] - p.beta[i] * x[j];
        };
        specs[i].event_weight = {0.0, 0.0};
        specs[i].event_weight[i] = -1.0;
        specs[i].discount_event_costs = p.discount_impulse_costs;
        if (p.include_terminal && p.gamma[i] != 0.0) {
            const double g = p.gamma[i];
            specs[i].terminal = [g](double, const std::array<double, 2>& x) {
                return g * x[0] * x[0] * x[1] * x[1];
            };
        }
    }
    return specs;
}

int run_solve(const GameConfig& cfg, const std::string& out_path) {
    if (cfg.game == GameConfig::Game::ZeroSum) {
        ZeroSumSolution s;
        try {
            s = solve_zero_sum(cfg.zero_sum);
        } catch (const RegimeError& e) {
            write_artifact(out_path, json{{"feasible", false}, {"error", e.what()}});
            throw;
        }
        std::printf("exponents        b1=%.12g  b2=%.12g\n", s.b1, s.b2);
        std::printf("amplitude        a=%.12g\n", s.a);
        std::printf("maximizer band   x_low=%.12g  x_tilde=%.12g\n", s.x_low, s.x_tilde);
        std::printf("minimizer band   x_hash=%.12g  x_bar=%.12g\n", s.x_hash, s.x_bar);
        double worst = 0.0;
        for (double r : s.residuals) worst = std::max(worst, std::fabs(r));
        std::printf("max |residual|   %.3e  (%d iterations)\n", worst, s.newton_iterations);
        if (!s.feasible) std::printf("NO FEASIBLE SOLUTION: residuals reported above\n");
        if (log_enabled()) print_warnings(s.warnings);
        write_artifact(out_path, json(s));
        return s.feasible ? 0 : 2;
    }
    DuopolySolution s;
    try {
        s = solve_duopoly(cfg.duopoly);
    } catch (const RegimeError& e) {
        write_artifact(out_path, json{{"feasible", false}, {"error", e.what()}});
        throw;
    }
    std::printf("roots firm 1     r1=%.12g  r2=%.12g\n", s.r1[0], s.r2[0]);
    std::printf("roots firm 2     r1=%.12g  r2=%.12g\n", s.r1[1], s.r2[1]);
    std::printf("amplitudes       C1=%.12g  C2=%.12g\n", s.C1, s.C2);
    std::printf("firm 1 band      x*=%.12g  x^=%.12g\n", s.x_star[0], s.x_hat[0]);
    std::printf("firm 2 band      x*=%.12g  x^=%.12g\n", s.x_star[1], s.x_hat[1]);
    double worst = 0.0;
    for (double r : s.residuals) worst = std::max(worst, std::fabs(r));
    std::printf("max |residual|   %.3e  (%s)\n", worst,
                s.symmetric_reduced ? "closed form" : "Newton");
    if (!s.feasible) std::printf("NO FEASIBLE SOLUTION: best residuals reported above\n");
    print_warnings(s.warnings);
    write_artifact(out_path, json(s));
    return s.feasible ? 0 : 2;
}

int run_simulate(const GameConfig& cfg, SimulationParams sim, const std::string& out_path) {
    json artifact;
    if (cfg.game == GameConfig::Game::ZeroSum) {
        const ZeroSumSolution s = solve_zero_sum(cfg.zero_sum);
        const PayoffSpec spec = zero_sum_payoff_spec(s, sim);
        const PayoffEstimate est = estimate_payoff(spec, sim.paths, sim.dt, sim.seed);
        const double analytic = band_value(s, spec.x0[0]);
        const double gap = est.mean - analytic;
        std::printf("start            x0=%.6g\n", spec.x0[0]);
        std::printf("simulated payoff %.8g  (se %.3g, %zu paths, dt %.3g)\n", est.mean, est.se,
                    est.n_paths, sim.dt);
        std::printf("analytic value   %.8g\n", analytic);
        std::printf("gap              %.3e  (%.2f se)\n", gap, gap / est.se);
        std::printf("events per path  maximizer %.3f  minimizer %.3f  exit %.3f\n",
                    est.events_per_path[0], est.events_per_path[1], est.exit_fraction);
        artifact = json{{"estimate", est}, {"analytic", analytic}, {"gap", gap}};
    } else {
        const DuopolySolution s = solve_duopoly(cfg.duopoly);
        if (!s.feasible)
            throw RegimeError("simulate: the duopoly solve did not reach a feasible candidate");
        if (!s.problem.discount_impulse_costs)
            std::printf("note: candidate books discounted intervention costs; the undiscounted "
                        "booking in this configuration shifts the simulated payoff\n");
        const auto specs = duopoly_payoff_specs(s, sim);
        const auto vals = build_firm_values(s);
        const auto ests =
            estimate_payoffs(std::span<const PayoffSpec>(specs.data(), 2), sim.paths, sim.dt,
                             sim.seed);
        artifact["firms"] = json::array();
        for (int i = 0; i < 2; ++i) {
            const double analytic = vals[i](0.0, specs[i].x0);
            const double gap = ests[i].mean - analytic;
            std::printf("firm %d payoff    %.8g  (se %.3g)  analytic %.8g  gap %.3e (%.2f se)\n",
                        i + 1, ests[i].mean, ests[i].se, analytic, gap, gap / ests[i].se);
            artifact["firms"].push_back(json{{"estimate", ests[i]},
                                             {"analytic", analytic},
                                             {"gap", gap}});
        }
        std::printf("events per path  firm 1 %.3f  firm 2 %.3f\n", ests[0].events_per_path[0],
                    ests[0].events_per_path[1]);
    }
    write_artifact(out_path, artifact);
    return 0;
}

int run_verify(const GameConfig& cfg, int points, bool fd, double tol,
               const std::string& out_path) {
    ScanOptions opt;
    opt.points_per_region = points;
    opt.finite_difference = fd;
    if (tol > 0.0)
        opt.tolerance = tol;
    else
        opt.tolerance = fd ? 1e-4 : 1e-6;

    ScanReport rep;
    if (cfg.game == GameConfig::Game::ZeroSum) {
        rep = scan_zero_sum(solve_zero_sum(cfg.zero_sum), opt);
    } else {
        const DuopolySolution s = solve_duopoly(cfg.duopoly);
        if (!s.feasible)
            throw RegimeError("verify: the duopoly solve did not reach a feasible candidate");
        rep = scan_duopoly(s, opt);
    }
    for (const auto& rg : rep.regions)
        std::printf("region %-3s  %4zu points  max |residual| %.3e\n", rg.label.c_str(),
                    rg.n_points, rg.max_residual);
    std::printf("bindings %s, operator dominance %s\n", rep.bindings_ok ? "match" : "MISMATCH",
                rep.dominance_ok ? "holds" : "VIOLATED");
    if (log_enabled())
        for (const auto& n : rep.notes) std::cout << "note: " << n << '\n';
    const bool pass = rep.bindings_ok && rep.dominance_ok && rep.max_residual <= opt.tolerance;
    std::printf("verification %s (max residual %.3e, tolerance %.1e)\n",
                pass ? "PASSED" : "FAILED", rep.max_residual, opt.tolerance);
    write_artifact(out_path, json(rep));
    if (!pass) throw RegimeError("verification failed: see the residual report");
    return 0;
}

int run_region_map(const GameConfig& cfg, const std::string& out_path, double lo, double hi,
                   int n) {
    if (out_path.empty()) throw InputError("region-map requires --out");
    std::ofstream os(out_path);
    if (!os) throw InputError("cannot write output file '" + out_path + "'");
    if (cfg.game == GameConfig::Game::ZeroSum) {
        const ZeroSumSolution s = solve_zero_sum(cfg.zero_sum);
        const double a = std::isnan(lo) ? 0.02 * s.x_tilde : lo;
        const double b = std::isnan(hi) ? 1.5 * s.x_bar : hi;
        write_region_map(os, s, a, b, n);
    } else {
        const DuopolySolution s = solve_duopoly(cfg.duopoly);
        if (!s.feasible)
            throw RegimeError("region-map: the duopoly solve did not reach a feasible candidate");
        const double w = s.x_hat[0] - s.x_star[0];
        const double a = std::isnan(lo) ? s.x_star[0] - 2.0 * w : lo;
        const double b = std::isnan(hi) ? s.x_hat[0] + 0.5 * w : hi;
        write_region_map(os, s, a, b, n);
    }
    std::printf("region map written to %s\n", out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver and verifier for two-player stochastic impulse games"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    SimulationParams cli_sim;
    bool fd = false;
    int points = 256;
    double tol = 0.0;
    double map_lo = std::numeric_limits<double>::quiet_NaN();
    double map_hi = std::numeric_limits<double>::quiet_NaN();
    int map_n = 64;

    auto* solve_cmd = app.add_subcommand("solve", "solve the configured game");
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo payoff under the solved policies");
    auto* verify_cmd = app.add_subcommand("verify", "dense residual scan of the solved candidate");
    auto* map_cmd = app.add_subcommand("region-map", "CSV map of regions and residuals");

    for (auto* c : {solve_cmd, sim_cmd, verify_cmd, map_cmd}) {
        c->add_option("--config", config_path, "JSON configuration file")->required();
        c->add_option("--out", out_path, "output artifact path");
    }
    bool paths_set = false, dt_set = false, seed_set = false, horizon_set = false;
    sim_cmd->add_option("--paths", cli_sim.paths, "number of Monte Carlo paths")
        ->each([&](const std::string&) { paths_set = true; });
    sim_cmd->add_option("--dt", cli_sim.dt, "time step")->each([&](const std::string&) {
        dt_set = true;
    });
    sim_cmd->add_option("--seed", cli_sim.seed, "master seed")->each([&](const std::string&) {
        seed_set = true;
    });
    sim_cmd->add_option("--horizon", cli_sim.horizon, "time horizon")
        ->each([&](const std::string&) { horizon_set = true; });
    verify_cmd->add_option("--points", points, "grid points per region");
    verify_cmd->add_flag("--fd", fd, "finite-difference derivatives");
    verify_cmd->add_option("--tol", tol, "residual tolerance (default 1e-6, 1e-4 with --fd)");
    map_cmd->add_option("--lo", map_lo, "lower bound of the scanned range");
    map_cmd->add_option("--hi", map_hi, "upper bound of the scanned range");
    map_cmd->add_option("--n", map_n, "grid points (per axis for the duopoly)");

    CLI11_PARSE(app, argc, argv);

    try {
        const GameConfig cfg = parse_game_config(load_config_file(config_path));
        if (solve_cmd->parsed()) return run_solve(cfg, out_path);
        if (sim_cmd->parsed()) {
            SimulationParams sim = cfg.simulation;
            if (paths_set) sim.paths = cli_sim.paths;
            if (dt_set) sim.dt = cli_sim.dt;
            if (seed_set) sim.seed = cli_sim.seed;
            if (horizon_set) sim.horizon = cli_sim.horizon;
            return run_simulate(cfg, sim, out_path);
        }
        if (verify_cmd->parsed()) return run_verify(cfg, points, fd, tol, out_path);
        if (map_cmd->parsed()) return run_region_map(cfg, out_path, map_lo, map_hi, map_n);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
