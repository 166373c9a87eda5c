#include "igs/json_io.hpp"

#include <cmath>

#include "igs/errors.hpp"

namespace igs {

void to_json(json& j, const MarkLaw& law) {
    switch (law.kind) {
    case MarkKind::Constant:
        j = json{{"kind", "constant"}, {"value", law.value}};
        break;
    case MarkKind::TwoPoint:
        j = json{{"kind", "two-point"}, {"up", law.up}, {"dn", law.dn}, {"p_up", law.p_up}};
        break;
    case MarkKind::TruncNormal:
        j = json{{"kind", "truncated-normal"},
                 {"mu", law.mu},
                 {"sigma", law.sigma},
                 {"lo", law.lo},
                 {"hi", law.hi}};
        break;
    }
}

void from_json(const json& j, MarkLaw& law) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        law = MarkLaw::constant(j.at("value").get<double>());
    } else if (kind == "two-point") {
        law = MarkLaw::two_point(j.at("up").get<double>(), j.at("dn").get<double>(),
                                 j.at("p_up").get<double>());
    } else if (kind == "truncated-normal") {
        law = MarkLaw::truncated_normal(j.at("mu").get<double>(), j.at("sigma").get<double>(),
                                        j.at("lo").get<double>(), j.at("hi").get<double>());
    } else {
        throw InputError("mark law: unknown kind '" + kind + "'");
    }
}

void to_json(json& j, const JumpSource& src) {
    j = json{{"omega", src.omega}, {"theta", src.theta}, {"law", src.law}};
}

void from_json(const json& j, JumpSource& src) {
    src.omega = j.at("omega").get<double>();
    src.theta = j.at("theta").get<std::array<double, 2>>();
    src.law = j.at("law").get<MarkLaw>();
}

void to_json(json& j, const ZeroSumProblem& p) {
    j = json{{"alpha", p.alpha},     {"beta", p.beta},       {"delta", p.delta},
             {"lambda1", p.lambda1}, {"kappa1", p.kappa1},   {"lambda2", p.lambda2},
             {"kappa2", p.kappa2}};
}

void from_json(const json& j, ZeroSumProblem& p) {
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.delta = j.at("delta").get<double>();
    p.lambda1 = j.at("lambda1").get<double>();
    p.kappa1 = j.at("kappa1").get<double>();
    p.lambda2 = j.at("lambda2").get<double>();
    p.kappa2 = j.at("kappa2").get<double>();
}

void to_json(json& j, const DuopolyProblem& p) {
    j = json{{"epsilon", p.epsilon},
             {"mu", p.mu},
             {"sigma", p.sigma},
             {"sigma_cross", p.sigma_cross},
             {"alpha", p.alpha},
             {"beta", p.beta},
             {"lambda", p.lambda},
             {"kappa", p.kappa},
             {"gamma", p.gamma},
             {"jumps", p.jumps},
             {"discount_impulse_costs", p.discount_impulse_costs},
             {"include_terminal", p.include_terminal}};
    if (!std::isnan(p.trigger_anchor)) j["trigger_anchor"] = p.trigger_anchor;
}

void from_json(const json& j, DuopolyProblem& p) {
    p.epsilon = j.at("epsilon").get<double>();
    p.mu = j.at("mu").get<std::array<double, 2>>();
    p.sigma = j.at("sigma").get<std::array<double, 2>>();
    p.sigma_cross = j.value("sigma_cross", std::array<double, 2>{0.0, 0.0});
    p.alpha = j.at("alpha").get<std::array<double, 2>>();
    p.beta = j.at("beta").get<std::array<double, 2>>();
    p.lambda = j.at("lambda").get<std::array<double, 2>>();
    p.kappa = j.at("kappa").get<std::array<double, 2>>();
    p.gamma = j.value("gamma", std::array<double, 2>{0.0, 0.0});
    p.jumps = j.value("jumps", std::vector<JumpSource>{});
    p.discount_impulse_costs = j.value("discount_impulse_costs", false);
    p.include_terminal = j.value("include_terminal", false);
    p.trigger_anchor = j.value("trigger_anchor", std::numeric_limits<double>::quiet_NaN());
}

void to_json(json& j, const ThresholdPolicy& p) {
    j = json{{"player", p.player},
             {"coord", p.coord},
             {"trigger", p.trigger},
             {"retarget", p.retarget},
             {"lambda", p.lambda},
             {"kappa", p.kappa},
             {"direction",
              p.direction == ThresholdPolicy::Direction::InterveneWhenAbove ? "above" : "below"}};
}

void from_json(const json& j, ThresholdPolicy& p) {
    p.player = j.at("player").get<int>();
    p.coord = j.at("coord").get<int>();
    p.trigger = j.at("trigger").get<double>();
    p.retarget = j.at("retarget").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.kappa = j.at("kappa").get<double>();
    const std::string dir = j.at("direction").get<std::string>();
    if (dir == "above")
        p.direction = ThresholdPolicy::Direction::InterveneWhenAbove;
    else if (dir == "below")
        p.direction = ThresholdPolicy::Direction::InterveneWhenBelow;
    else
        throw InputError("policy: unknown direction '" + dir + "'");
}

void to_json(json& j, const ZeroSumSolution& s) {
    j = json{{"problem", s.problem},
             {"b1", s.b1},
             {"b2", s.b2},
             {"a", s.a},
             {"x_low", s.x_low},
             {"x_tilde", s.x_tilde},
             {"x_hash", s.x_hash},
             {"x_bar", s.x_bar},
             {"x_inflection", s.x_inflection},
             {"residuals", s.residuals},
             {"feasible", s.feasible},
             {"newton_iterations", s.newton_iterations},
             {"p2_branch_gap", s.p2_branch_gap},
             {"warnings", s.warnings}};
}

void to_json(json& j, const DuopolySolution& s) {
    j = json{{"problem", s.problem},
             {"r1", s.r1},
             {"r2", s.r2},
             {"C1", s.C1},
             {"C2", s.C2},
             {"x_star", s.x_star},
             {"x_hat", s.x_hat},
             {"residuals", s.residuals},
             {"feasible", s.feasible},
             {"symmetric_reduced", s.symmetric_reduced},
             {"newton_iterations", s.newton_iterations},
             {"warnings", s.warnings}};
}

void to_json(json& j, const PayoffEstimate& e) {
    j = json{{"mean", e.mean},
             {"se", e.se},
             {"paths", e.n_paths},
             {"events_per_path", e.events_per_path},
             {"exit_fraction", e.exit_fraction}};
}

void to_json(json& j, const DeviationResult& r) {
    j = json{{"player", r.edit.player},
             {"parameter", r.edit.edit_trigger ? "trigger" : "retarget"},
             {"factor", r.edit.factor},
             {"valid", r.valid},
             {"base_mean", r.base_mean},
             {"edited_mean", r.edited_mean},
             {"diff_mean", r.diff_mean},
             {"diff_se", r.diff_se}};
    if (!r.note.empty()) j["note"] = r.note;
}

void to_json(json& j, const InterventionStats& s) {
    j = json{{"dt", s.dt},
             {"mean_count", s.mean_count},
             {"se_count", s.se_count},
             {"exit_fraction", s.exit_fraction}};
}

void to_json(json& j, const ScanReport& r) {
    json regions = json::array();
    for (const auto& rg : r.regions)
        regions.push_back(json{{"label", rg.label},
                               {"points", rg.n_points},
                               {"max_residual", rg.max_residual},
                               {"worst_x", rg.worst_x}});
    j = json{{"regions", regions},
             {"max_residual", r.max_residual},
             {"bindings_ok", r.bindings_ok},
             {"dominance_ok", r.dominance_ok},
             {"notes", r.notes}};
}

void to_json(json& j, const SimulationParams& s) {
    j = json{{"horizon", s.horizon}, {"dt", s.dt}, {"paths", s.paths}, {"seed", s.seed}};
    if (s.x0_set) j["x0"] = s.x0;
}

void from_json(const json& j, SimulationParams& s) {
    s.horizon = j.value("horizon", 20.0);
    s.dt = j.value("dt", 1e-3);
    s.paths = j.value("paths", std::size_t(10000));
    s.seed = j.value("seed", std::uint64_t(1));
    if (j.contains("x0")) {
        s.x0_set = true;
        if (j.at("x0").is_number()) {
            s.x0 = {j.at("x0").get<double>(), 0.0};
        } else {
            const auto v = j.at("x0").get<std::vector<double>>();
            if (v.empty() || v.size() > 2)
                throw InputError("simulation: x0 must have one or two coordinates");
            s.x0 = {v[0], v.size() > 1 ? v[1] : 0.0};
        }
    }
}

void to_json(json& j, const GameConfig& c) {
    j = json{{"simulation", c.simulation}};
    if (c.game == GameConfig::Game::ZeroSum) {
        j["game"] = "zero-sum";
        j["problem"] = c.zero_sum;
    } else {
        j["game"] = "duopoly";
        j["problem"] = c.duopoly;
    }
}

void from_json(const json& j, GameConfig& c) {
    const std::string game = j.at("game").get<std::string>();
    if (game == "zero-sum")
        c.game = GameConfig::Game::ZeroSum;
    else if (game == "duopoly")
        c.game = GameConfig::Game::Duopoly;
    else
        throw InputError("config: unknown game '" + game + "'");
    if (c.game == GameConfig::Game::ZeroSum)
        c.zero_sum = j.at("problem").get<ZeroSumProblem>();
    else
        c.duopoly = j.at("problem").get<DuopolyProblem>();
    if (j.contains("simulation")) c.simulation = j.at("simulation").get<SimulationParams>();
}

GameConfig parse_game_config(const json& j) {
    try {
        return j.get<GameConfig>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

} // namespace igs
