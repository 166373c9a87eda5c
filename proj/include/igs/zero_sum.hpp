#ifndef IGS_ZERO_SUM_HPP
#define IGS_ZERO_SUM_HPP

#include <array>
#include <string>
#include <vector>

#include "igs/candidate.hpp"
#include "igs/model.hpp"
#include "igs/policy.hpp"
#include "igs/qvi.hpp"
#include "igs/rootfind.hpp"

namespace igs {

// Zero-sum game on the half-line. The state follows dX = alpha dt + beta dW
// and is absorbed at 0. The maximizing player withdraws lump sums (each
// withdrawal xi costs kappa1 + (1+lambda1) xi of state and pays xi), the
// minimizing player counters with its own impulses under (lambda2, kappa2).
// Flows are discounted at rate delta.
struct ZeroSumProblem {
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 1.0;
    double lambda1 = 0.0;
    double kappa1 = 1.0;
    double lambda2 = 0.0;
    double kappa2 = 1.0;

    void validate() const;
};

// Equilibrium description. The value on the continuation band is
// a (e^{b1 x} - e^{b2 x}); the maximizer resets from x_tilde down to x_low,
// the minimizer from x_bar down to x_hash.
struct ZeroSumSolution {
    ZeroSumProblem problem;
    double b1 = 0.0; // positive root of (beta^2/2) b^2 + alpha b - delta = 0
    double b2 = 0.0; // negative root
    double a = 0.0;
    double x_low = 0.0;
    double x_tilde = 0.0;
    double x_hash = 0.0;
    double x_bar = 0.0;
    double x_inflection = 0.0; // where the band value changes convexity
    std::array<double, 5> residuals{}; // the five pasting equations at the solution
    bool feasible = false;
    int newton_iterations = 0;
    // The two natural value-matching conventions for the minimizer differ by
    // exactly 2 x_bar / (1 + lambda2); the gap is reported, the solved system
    // keeps the convention whose five equations close jointly.
    double p2_branch_gap = 0.0;
    bool p2_foc_interpreted = true;
    std::vector<std::string> warnings;
};

// Roots of the continuation ODE (beta^2/2) psi'' + alpha psi' - delta psi = 0.
std::pair<double, double> zero_sum_exponents(const ZeroSumProblem& p);

ZeroSumSolution solve_zero_sum(const ZeroSumProblem& p, const NewtonOptions& opt = {});

// S(x) = e^{b1 x} - e^{b2 x} and derivatives.
double shape_S(const ZeroSumSolution& s, double x);
double shape_S_dx(const ZeroSumSolution& s, double x);
double shape_S_dxx(const ZeroSumSolution& s, double x);

// Stationary equilibrium value: a S(x) on (0, x_tilde], continued affinely
// past the maximizer's trigger with slope 1/(1+lambda1). C^1 across x_tilde.
double band_value(const ZeroSumSolution& s, double x);
double band_value_dx(const ZeroSumSolution& s, double x);
double band_value_dxx(const ZeroSumSolution& s, double x);

// Optimal lump sizes as functions of the pre-intervention state: the
// maximizer's withdrawal for x >= x_tilde and the minimizer's matched
// transfer for x >= x_bar.
double withdrawal_size(const ZeroSumSolution& s, double x);
double counter_transfer_size(const ZeroSumSolution& s, double x);

ModelSpec zero_sum_model(const ZeroSumProblem& p);

// Time-discounted candidate e^{-delta t} band_value(x) on (0, inf) with
// analytic derivatives.
CandidateFunction zero_sum_candidate(const ZeroSumSolution& s);

// Threshold policies implementing the equilibrium: player 0 resets
// x_tilde -> x_low, player 1 resets x_bar -> x_hash. Policy cost
// coefficients are in state-displacement units.
std::array<ThresholdPolicy, 2> zero_sum_policies(const ZeroSumSolution& s);

// Operator queries matching the residual nesting: the maximizer's supremum
// operator searches post-states at least kappa1 below the current state and
// deducts (z + kappa1)/(1+lambda1); the minimizer's infimum operator
// searches upward displacements and credits (lambda2 z + kappa2)/(1+lambda2).
// Costs scale with e^{-delta t} so the queries stay consistent with the
// discounted candidate at any evaluation time.
InterventionQuery zero_sum_sup_query(const ZeroSumProblem& p, double t = 0.0);
InterventionQuery zero_sum_inf_query(const ZeroSumProblem& p, double t = 0.0);

} // namespace igs

#endif
