#ifndef IGS_JSON_IO_HPP
#define IGS_JSON_IO_HPP

// JSON bindings for problem configurations, solver outputs and verification
// reports. Problems round-trip exactly; report types serialize one way for
// artifacts.

#include <json.hpp>

#include "igs/duopoly.hpp"
#include "igs/model.hpp"
#include "igs/policy.hpp"
#include "igs/verification.hpp"
#include "igs/zero_sum.hpp"

namespace igs {

using json = nlohmann::json;

void to_json(json& j, const MarkLaw& law);
void from_json(const json& j, MarkLaw& law);

void to_json(json& j, const JumpSource& src);
void from_json(const json& j, JumpSource& src);

void to_json(json& j, const ZeroSumProblem& p);
void from_json(const json& j, ZeroSumProblem& p);

void to_json(json& j, const DuopolyProblem& p);
void from_json(const json& j, DuopolyProblem& p);

void to_json(json& j, const ThresholdPolicy& p);
void from_json(const json& j, ThresholdPolicy& p);

void to_json(json& j, const ZeroSumSolution& s);
void to_json(json& j, const DuopolySolution& s);
void to_json(json& j, const PayoffEstimate& e);
void to_json(json& j, const DeviationResult& r);
void to_json(json& j, const InterventionStats& s);
void to_json(json& j, const ScanReport& r);

// Simulation block of a game configuration file.
struct SimulationParams {
    std::array<double, 2> x0{0.0, 0.0};
    bool x0_set = false; // absent x0 falls back to a game-specific default
    double horizon = 20.0;
    double dt = 1e-3;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
};

void to_json(json& j, const SimulationParams& s);
void from_json(const json& j, SimulationParams& s);

// Top-level configuration: {"game": "zero-sum"|"duopoly", "problem": {...},
// "simulation": {...}}. Exactly one of the problem fields is populated
// according to the game tag.
struct GameConfig {
    enum class Game { ZeroSum, Duopoly };
    Game game = Game::ZeroSum;
    ZeroSumProblem zero_sum;
    DuopolyProblem duopoly;
    SimulationParams simulation;
};

void to_json(json& j, const GameConfig& c);
void from_json(const json& j, GameConfig& c);

// Parses a configuration document, converting schema violations into
// InputError with the offending key in the message.
GameConfig parse_game_config(const json& j);

} // namespace igs

#endif
