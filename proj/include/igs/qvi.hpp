#ifndef IGS_QVI_HPP
#define IGS_QVI_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "igs/candidate.hpp"
#include "igs/model.hpp"

namespace igs {

// Whether the affine intervention charge lambda*z + kappa enters the
// operator objective with a minus sign (a cost paid by the intervening
// player) or a plus sign (a transfer credited against the value).
enum class CostConvention { SubtractedFromPayoff, AddedToPayoff };

struct CostSpec {
    double lambda = 0.0;
    double kappa = 0.0;
    CostConvention convention = CostConvention::SubtractedFromPayoff;

    double cost_of(double z) const { return lambda * z + kappa; }
};

// One-coordinate intervention operator
//   sup (or inf) over z of  f(t, x + z e_coord)  -/+  cost_scale * (lambda z + kappa).
// The displacement range [z_lo, z_hi] is clipped so the post-state stays
// strictly inside the candidate's domain, then trimmed to max_span keeping
// the endpoint nearest z = 0.
struct InterventionQuery {
    int coord = 0;
    double z_lo = -std::numeric_limits<double>::infinity();
    double z_hi = std::numeric_limits<double>::infinity();
    double max_span = 50.0;
    CostSpec cost;
    double cost_scale = 1.0;
    bool maximize = true;
    int grid_n = 129;
    int refine_rounds = 3;
};

struct InterventionResult {
    double value = 0.0;
    double z_star = 0.0; // smallest optimizer under exact grid ties
};

// Post-state-admissible displacement range, or nullopt when no displacement
// keeps the coordinate inside the candidate domain.
std::optional<std::pair<double, double>> clip_displacement(const CandidateFunction& f,
                                                           const InterventionQuery& q, double xi);

// Grid search plus bracketing refinements. Throws InputError when the
// clipped range is empty; callers that want infeasibility as a value use
// clip_displacement first.
InterventionResult intervention_operator(const CandidateFunction& f, double t,
                                         const std::array<double, 2>& x,
                                         const InterventionQuery& q);

// Integro-differential generator applied to the candidate:
//   df/dt + sum_i b_i df/dx_i + (1/2) sum_ij (vol vol^T)_ij d2f/dx_i dx_j
//   + sum_sources omega * E[f(x + theta z) - f(x) - theta z . grad f(x)].
// drift[] is the total mean drift; the compensating term inside the jump
// expectation matches the compensated increments used by the path engine.
// A null quad_converged turns a non-converged jump expectation into a
// RegimeError instead of a flag.
double generator_apply(const CandidateFunction& f, const ModelSpec& model, double t,
                       const std::array<double, 2>& x, bool* quad_converged = nullptr);

using RunningTerm = std::function<double(double, const std::array<double, 2>&)>;

enum class QviBranch { Pde, ObstacleP1, ObstacleP2 };

std::string branch_label(QviBranch b);

// Zero-sum double-obstacle residual
//   max{ min[ -(A phi + running), phi - M_sup phi ], phi - M_inf phi }.
// An infeasible supremum operator drops its obstacle out of the inner min
// (+inf); an infeasible infimum operator drops out of the outer max (-inf).
struct ZeroSumResidual {
    double residual = 0.0;
    QviBranch branch = QviBranch::Pde;
    double pde_term = 0.0;
    double obstacle_p1 = 0.0;
    double obstacle_p2 = 0.0;
    bool p1_feasible = false;
    bool p2_feasible = false;
    double z1 = 0.0; // optimizer of the supremum operator when feasible
    double z2 = 0.0;
};

ZeroSumResidual qvi_residual_zero_sum(const CandidateFunction& phi, const ModelSpec& model,
                                      const RunningTerm& running, const InterventionQuery& q_sup,
                                      const InterventionQuery& q_inf, double t,
                                      const std::array<double, 2>& x);

// Single-player obstacle residual for each participant of the non-zero-sum
// game, with the candidate dominating its own intervention operator:
//   max{ A phi_i + running_i, M_i phi_i - phi_i }.
// Both players maximize, so the PDE term is nonpositive wherever the player
// would decline to intervene and zero on the joint continuation region.
struct ObstacleResidual {
    double residual = 0.0;
    bool pde_branch = true;
    double pde_term = 0.0;
    double obstacle = 0.0;
    bool feasible = false;
    double z_star = 0.0;
};

ObstacleResidual qvi_residual_nonzero_sum(const CandidateFunction& phi, const ModelSpec& model,
                                          const RunningTerm& running, const InterventionQuery& q,
                                          double t, const std::array<double, 2>& x);

enum class Region { Continuation, P1Intervention, P2Intervention };

std::string region_label(Region r);

// Region classification from the residual parts. A binding supremum
// obstacle wins over a binding infimum obstacle; ambiguous marks states
// where more than one term sits inside the binding tolerance (free
// boundaries land here by construction).
struct RegionClass {
    Region region = Region::Continuation;
    bool ambiguous = false;
};

RegionClass classify_region(const ZeroSumResidual& r, double phi_value, double tol = 1e-6);

// Two-candidate variant for the non-zero-sum game: r_i is player i's own
// single-obstacle residual evaluated on its own value function.
RegionClass classify_region(const ObstacleResidual& r1, const ObstacleResidual& r2, double phi1_value,
                            double phi2_value, double tol = 1e-6);

} // namespace igs

#endif
