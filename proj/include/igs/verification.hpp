#ifndef IGS_VERIFICATION_HPP
#define IGS_VERIFICATION_HPP

// Monte Carlo and residual-scan verification of candidate equilibria:
// discounted payoff estimation under threshold policies, paired deviation
// tests under common random numbers, intervention statistics across step
// sizes, the monotone singular representation of impulse sequences, and
// dense QVI residual scans over the region map.

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "igs/candidate.hpp"
#include "igs/duopoly.hpp"
#include "igs/model.hpp"
#include "igs/policy.hpp"
#include "igs/qvi.hpp"
#include "igs/zero_sum.hpp"

namespace igs {

// One player's scoreboard over a simulated path:
//
//   integral e^{-r t} running(t, X_t) dt        (trapezoid on the step grid,
//                                                post-impulse grid states)
// + sum over events of player p:
//       event_weight[p] * cost * e^{-r time}    (or undiscounted costs when
//                                                discount_event_costs is off)
// + e^{-r t_end} terminal(t_end, X_end)         (exit or horizon time).
//
// Event costs are ThresholdPolicy::cost_of(z) in state-displacement units; a
// weight of -1 books the charge against the scoreboard, +1 credits it as a
// received transfer, 0 ignores the player's events entirely.
struct PayoffSpec {
    ModelSpec model;
    std::vector<ThresholdPolicy> policies;
    std::array<double, 2> x0{0.0, 0.0};
    double horizon = 1.0;
    double discount = 0.0;
    RunningTerm running;  // undiscounted flow; empty means zero
    RunningTerm terminal; // evaluated at (t_end, X_end); empty means zero
    std::array<double, 2> event_weight{-1.0, -1.0};
    bool discount_event_costs = true;
};

struct PayoffEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n_paths = 0;
    std::array<double, 2> events_per_path{0.0, 0.0};
    double exit_fraction = 0.0;
};

// Path i always uses path_seed(seed, i), so estimates with equal
// (spec, n_paths, dt, seed) are bit-identical and distinct scoreboards can
// be paired across calls.
PayoffEstimate estimate_payoff(const PayoffSpec& spec, std::size_t n_paths, double dt,
                               std::uint64_t seed);

// Several scoreboards over one shared batch of paths. The simulation follows
// specs[0]'s model, policies, start state and horizon; the remaining entries
// contribute accounting rules only.
std::vector<PayoffEstimate> estimate_payoffs(std::span<const PayoffSpec> specs,
                                             std::size_t n_paths, double dt, std::uint64_t seed);

// Per-path payoff samples for paired comparisons.
std::vector<double> payoff_samples(const PayoffSpec& spec, std::size_t n_paths, double dt,
                                   std::uint64_t seed);

// One policy edit: scale the trigger or the retarget of `player`'s policy.
struct PolicyEdit {
    int player = 0;
    bool edit_trigger = true; // false scales the retarget instead
    double factor = 1.0;
};

// The eight standard edits for one player: trigger and retarget scaled by
// 0.9, 1.1, 0.75 and 1.25.
std::vector<PolicyEdit> standard_edits(int player);

struct DeviationResult {
    PolicyEdit edit;
    bool valid = false; // edited policy passed validation and was simulated
    std::string note;   // rejection reason when invalid
    double base_mean = 0.0;
    double edited_mean = 0.0;
    double diff_mean = 0.0; // edited minus base, common random numbers
    double diff_se = 0.0;   // standard error of the paired difference
};

// Paired comparison of each edited policy against the base policy set under
// common random numbers. Edits that fail policy validation are reported with
// valid = false, never simulated or silently dropped.
std::vector<DeviationResult> deviation_test(const PayoffSpec& spec,
                                            std::span<const PolicyEdit> edits,
                                            std::size_t n_paths, double dt, std::uint64_t seed);

struct InterventionStats {
    double dt = 0.0;
    std::array<double, 2> mean_count{0.0, 0.0};
    std::array<double, 2> se_count{0.0, 0.0};
    double exit_fraction = 0.0;
};

// Mean intervention counts per player across a ladder of step sizes. A
// retarget equal to the trigger re-fires on every grid step, so such a
// policy is rejected up front instead of simulated.
std::vector<InterventionStats> intervention_scan(const ModelSpec& model,
                                                 std::span<const ThresholdPolicy> policies,
                                                 std::array<double, 2> x0, double horizon,
                                                 std::span<const double> dts, std::size_t n_paths,
                                                 std::uint64_t seed);

// Impulse sequence of one controller: event times (nondecreasing) and signed
// displacement sizes.
struct ImpulseSequence {
    std::vector<double> times;
    std::vector<double> sizes;
};

// Monotone pair (nu+, nu-) carried by an impulse sequence: at each event
// nu+ rises by max(z, 0) + kappa/(2 lambda) and nu- by
// max(-z, 0) + kappa/(2 lambda). The difference of the increments is the
// displacement z, while lambda d(nu+ + nu-) integrates to the intervention
// charge lambda |z| + kappa, so the cost functional folds into a singular
// control integral.
struct SingularPair {
    std::vector<double> times;
    std::vector<double> nu_plus;  // cumulative
    std::vector<double> nu_minus; // cumulative
    double cost_direct = 0.0;     // sum of lambda |z| + kappa in time order
    double cost_singular = 0.0;   // lambda * (nu+ + nu-) at the last event
};

SingularPair singular_representation(const ImpulseSequence& seq, double lambda, double kappa);

// --- dense QVI residual scans --------------------------------------------

struct ScanOptions {
    int points_per_region = 256;
    bool finite_difference = false; // strip analytic derivatives first
    double t = 0.0;                 // evaluation time of the scan
    double tolerance = 1e-6;        // binding and dominance tolerance
};

struct RegionScan {
    std::string label;
    std::size_t n_points = 0;
    double max_residual = 0.0; // largest |binding residual| on the grid
    std::array<double, 2> worst_x{0.0, 0.0};
};

struct ScanReport {
    std::vector<RegionScan> regions;
    double max_residual = 0.0;
    bool bindings_ok = true;  // classified regions match the thresholds
    bool dominance_ok = true; // pointwise operator bounds hold everywhere
    std::vector<std::string> notes;
};

ScanReport scan_zero_sum(const ZeroSumSolution& s, const ScanOptions& opt = {});
ScanReport scan_duopoly(const DuopolySolution& s, const ScanOptions& opt = {});

// CSV region maps. Zero-sum rows are "x,residual,branch,label"; duopoly rows
// are "x1,x2,residual,branch,label" where branch and label follow firm 1's
// classification against firm 2's.
void write_region_map(std::ostream& os, const ZeroSumSolution& s, double lo, double hi, int n,
                      const ScanOptions& opt = {});
void write_region_map(std::ostream& os, const DuopolySolution& s, double lo, double hi, int n,
                      const ScanOptions& opt = {});

} // namespace igs

#endif
