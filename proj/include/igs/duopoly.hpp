#ifndef IGS_DUOPOLY_HPP
#define IGS_DUOPOLY_HPP

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "igs/candidate.hpp"
#include "igs/model.hpp"
#include "igs/policy.hpp"
#include "igs/qvi.hpp"

namespace igs {

// Non-zero-sum advertising duopoly. Coordinate i is firm i's goodwill level,
// drifting as dX_i = mu_i dt + sigma_i dW_i (+ jump terms shared through the
// model's sources). Firm i earns the flow alpha_i X_i - beta_i X_j, discounted
// at epsilon, and may push its own coordinate up by z at cost lambda_i z +
// kappa_i. Both firms maximize; the equilibrium candidate is a pair of band
// policies (push from x_i^* back up to x_hat_i).
struct DuopolyProblem {
    double epsilon = 1.0;
    std::array<double, 2> mu{0.0, 0.0};
    std::array<double, 2> sigma{1.0, 1.0};
    // Cross-volatilities feed the simulation model only. The threshold system
    // assumes diagonal noise; nonzero entries here are rejected by the solver.
    std::array<double, 2> sigma_cross{0.0, 0.0};
    std::array<double, 2> alpha{1.0, 1.0};
    std::array<double, 2> beta{0.0, 0.0};
    std::array<double, 2> lambda{1.0, 1.0};
    std::array<double, 2> kappa{1.0, 1.0};
    // Terminal weight gamma_i X_1^2 X_2^2, simulation-side only.
    std::array<double, 2> gamma{0.0, 0.0};
    std::vector<JumpSource> jumps;

    // Payoff accounting toggles. The displayed candidate books intervention
    // costs undiscounted; simulations follow suit unless this flag is set.
    bool discount_impulse_costs = false;
    bool include_terminal = false;

    // Symmetric firms leave the band location undetermined (the six matching
    // conditions pin only the band width; sliding both bands together is a
    // residual-free family). The reduced solver places the trigger here, or
    // one band-width above the origin when NaN.
    double trigger_anchor = std::numeric_limits<double>::quiet_NaN();

    void validate() const;
};

struct DuopolySolution {
    DuopolyProblem problem;
    // Characteristic roots of firm i's own-coordinate generator,
    // r1[i] < 0 < r2[i].
    std::array<double, 2> r1{0.0, 0.0};
    std::array<double, 2> r2{0.0, 0.0};
    // Shared exponential amplitudes of the candidate pair.
    double C1 = 0.0;
    double C2 = 0.0;
    std::array<double, 2> x_star{0.0, 0.0}; // intervention triggers
    std::array<double, 2> x_hat{0.0, 0.0};  // retarget levels, x_hat > x_star
    // Matching-system residuals: for each firm the two tangency conditions
    // (at trigger and retarget) followed by the value-matching condition.
    std::array<double, 6> residuals{};
    bool feasible = false;
    // Set when the closed-form symmetric reduction was used instead of the
    // full six-dimensional solve.
    bool symmetric_reduced = false;
    int newton_iterations = 0;
    std::vector<std::string> warnings;
};

// Roots of (sigma_i^2/2) r^2 + mu_i r - epsilon + sum_j omega_j E[e^{r theta_ij Z_j} - 1 - r theta_ij Z_j]
// for firm i. Closed form without jumps, bracketed otherwise. Throws
// RegimeError when a root cannot be bracketed.
std::array<double, 2> characteristic_roots(const DuopolyProblem& p, int firm);

// The characteristic polynomial itself, exposed for cross-checks.
double characteristic_q(const DuopolyProblem& p, int firm, double r);

// Solve the six matching conditions. Symmetric inputs (equal dynamics, margins
// and cost schedules) take the reduced width-equation path; anything else runs
// a damped Newton iteration over (C1, C2, x_1^*, x_hat_1, x_2^*, x_hat_2).
// Non-convergence reports the best residual found with feasible = false.
DuopolySolution solve_duopoly(const DuopolyProblem& p);

// Width w of the symmetric band as the root of the scalar closure
// Phi(w) + w = kappa / (alpha/epsilon - lambda). Requires lambda < alpha/epsilon.
double symmetric_band_width(double r1, double r2, double level_gap, double kappa);

// Candidate value pair. Each firm's own coordinate is the displayed
// exponential form above its trigger and the value-matched affine
// continuation below it; the rival coordinate is clamped to the rival's
// retarget below the rival's trigger (an intervention there is instantaneous
// and costless to the observing firm).
std::array<CandidateFunction, 2> build_firm_values(const DuopolySolution& s);

// Band policies: firm i pushes coordinate i up to x_hat_i once it falls to
// x_star_i, paying lambda_i z + kappa_i.
std::array<ThresholdPolicy, 2> build_duopoly_policies(const DuopolySolution& s);

ModelSpec duopoly_model(const DuopolyProblem& p);

// Intervention operator query for firm i at time t: upward displacements of
// its own coordinate, cost subtracted and discounted to time zero.
InterventionQuery duopoly_query(const DuopolyProblem& p, int firm, double t);

} // namespace igs

#endif
