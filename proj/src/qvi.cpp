#include "igs/qvi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "igs/errors.hpp"

namespace igs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite domain endpoints are open: post-states keep a relative margin off
// the boundary so candidates with singular behaviour there stay evaluable.
double lower_margin(double lo) { return lo + 1e-9 * std::max(1.0, std::fabs(lo)); }
double upper_margin(double hi) { return hi - 1e-9 * std::max(1.0, std::fabs(hi)); }

} // namespace

std::optional<std::pair<double, double>> clip_displacement(const CandidateFunction& f,
                                                           const InterventionQuery& q, double xi) {
    if (std::isnan(q.z_lo) || std::isnan(q.z_hi) || q.z_lo > q.z_hi)
        throw InputError("intervention operator: malformed displacement range");
    double lo = q.z_lo, hi = q.z_hi;
    const double dlo = f.domain_lo[q.coord], dhi = f.domain_hi[q.coord];
    if (std::isfinite(dlo)) lo = std::max(lo, lower_margin(dlo) - xi);
    if (std::isfinite(dhi)) hi = std::min(hi, upper_margin(dhi) - xi);
    if (!(lo <= hi)) return std::nullopt;
    if (!(q.max_span > 0.0)) throw InputError("intervention operator: max_span must be > 0");
    if (hi - lo > q.max_span) {
        // Keep the endpoint nearest the identity displacement.
        if (std::fabs(lo) <= std::fabs(hi))
            hi = lo + q.max_span;
        else
            lo = hi - q.max_span;
    }
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw InputError("intervention operator: unbounded displacement range");
    return std::make_pair(lo, hi);
}

InterventionResult intervention_operator(const CandidateFunction& f, double t,
                                         const std::array<double, 2>& x,
                                         const InterventionQuery& q) {
    if (q.coord < 0 || q.coord >= f.dim)
        throw InputError("intervention operator: coord out of range");
    if (q.grid_n < 3) throw InputError("intervention operator: grid_n must be >= 3");
    const auto range = clip_displacement(f, q, x[q.coord]);
    if (!range)
        throw InputError("intervention operator: no admissible displacement at this state");

    const double sign = q.cost.convention == CostConvention::SubtractedFromPayoff ? -1.0 : 1.0;
    auto objective = [&](double z) {
        auto xz = x;
        xz[q.coord] += z;
        return f(t, xz) + sign * q.cost_scale * q.cost.cost_of(z);
    };
    // better-than comparison; strict so exact ties keep the smallest z seen.
    auto better = [&](double a, double b) { return q.maximize ? a > b : a < b; };

    double lo = range->first, hi = range->second;
    double best_z = lo, best_v = objective(lo);
    for (int round = 0; round <= q.refine_rounds; ++round) {
        const double h = (hi - lo) / (q.grid_n - 1);
        int best_k = -1;
        for (int k = 0; k < q.grid_n; ++k) {
            const double z = (k == q.grid_n - 1) ? hi : lo + k * h;
            const double v = objective(z);
            if (better(v, best_v) || (v == best_v && z < best_z)) {
                best_v = v;
                best_z = z;
                best_k = k;
            } else if (v == best_v && z == best_z) {
                best_k = k;
            }
        }
        if (h <= 0.0) break;
        // Bracket one grid cell either side of the winner for the next round.
        double center = best_z;
        if (best_k >= 0) center = (best_k == q.grid_n - 1) ? hi : lo + best_k * h;
        const double nlo = std::max(lo, center - h);
        const double nhi = std::min(hi, center + h);
        lo = nlo;
        hi = nhi;
    }
    return {best_v, best_z};
}

double generator_apply(const CandidateFunction& f, const ModelSpec& model, double t,
                       const std::array<double, 2>& x, bool* quad_converged) {
    if (!f.in_domain(x)) throw InputError("generator: state outside candidate domain");
    double out = f.eval_dt(t, x);
    std::array<double, 2> grad{0.0, 0.0};
    for (int i = 0; i < model.dim; ++i) {
        grad[i] = f.eval_dx(i, t, x);
        out += model.drift[i] * grad[i];
    }
    for (int i = 0; i < model.dim; ++i)
        for (int j = 0; j < model.dim; ++j) {
            const double a = model.diffusion(i, j);
            if (a != 0.0) out += 0.5 * a * f.eval_dxx(i, j, t, x);
        }
    if (quad_converged) *quad_converged = true;
    for (const auto& src : model.jumps) {
        if (src.omega == 0.0) continue;
        auto integrand = [&](double z) {
            auto xz = x;
            double lin = 0.0;
            for (int i = 0; i < model.dim; ++i) {
                xz[i] += src.theta[i] * z;
                lin += src.theta[i] * z * grad[i];
            }
            return f(t, xz) - f(t, x) - lin;
        };
        bool ok = true;
        const double e = src.law.expect(integrand, &ok);
        if (!ok) {
            if (quad_converged)
                *quad_converged = false;
            else
                throw RegimeError("generator: jump expectation quadrature did not converge");
        }
        out += src.omega * e;
    }
    return out;
}

std::string branch_label(QviBranch b) {
    switch (b) {
        case QviBranch::Pde: return "pde";
        case QviBranch::ObstacleP1: return "obstacle-p1";
        case QviBranch::ObstacleP2: return "obstacle-p2";
    }
    return "pde";
}

ZeroSumResidual qvi_residual_zero_sum(const CandidateFunction& phi, const ModelSpec& model,
                                      const RunningTerm& running, const InterventionQuery& q_sup,
                                      const InterventionQuery& q_inf, double t,
                                      const std::array<double, 2>& x) {
    ZeroSumResidual out;
    const double v = phi(t, x);
    out.pde_term = -(generator_apply(phi, model, t, x) + (running ? running(t, x) : 0.0));

    out.obstacle_p1 = kInf;
    if (clip_displacement(phi, q_sup, x[q_sup.coord])) {
        const auto r = intervention_operator(phi, t, x, q_sup);
        out.obstacle_p1 = v - r.value;
        out.p1_feasible = true;
        out.z1 = r.z_star;
    }
    out.obstacle_p2 = -kInf;
    if (clip_displacement(phi, q_inf, x[q_inf.coord])) {
        const auto r = intervention_operator(phi, t, x, q_inf);
        out.obstacle_p2 = v - r.value;
        out.p2_feasible = true;
        out.z2 = r.z_star;
    }

    const double inner = std::min(out.pde_term, out.obstacle_p1);
    const QviBranch inner_branch =
        out.pde_term <= out.obstacle_p1 ? QviBranch::Pde : QviBranch::ObstacleP1;
    if (out.obstacle_p2 > inner) {
        out.residual = out.obstacle_p2;
        out.branch = QviBranch::ObstacleP2;
    } else {
        out.residual = inner;
        out.branch = inner_branch;
    }
    return out;
}

ObstacleResidual qvi_residual_nonzero_sum(const CandidateFunction& phi, const ModelSpec& model,
                                          const RunningTerm& running, const InterventionQuery& q,
                                          double t, const std::array<double, 2>& x) {
    ObstacleResidual out;
    const double v = phi(t, x);
    // Maximizer convention: A phi + f vanishes on the joint continuation
    // region and stays nonpositive where the player's own obstacle binds.
    out.pde_term = generator_apply(phi, model, t, x) + (running ? running(t, x) : 0.0);
    out.obstacle = -kInf;
    if (clip_displacement(phi, q, x[q.coord])) {
        const auto r = intervention_operator(phi, t, x, q);
        out.obstacle = r.value - v;
        out.feasible = true;
        out.z_star = r.z_star;
    }
    if (out.obstacle > out.pde_term) {
        out.residual = out.obstacle;
        out.pde_branch = false;
    } else {
        out.residual = out.pde_term;
        out.pde_branch = true;
    }
    return out;
}

std::string region_label(Region r) {
    switch (r) {
        case Region::Continuation: return "I3";
        case Region::P1Intervention: return "I1";
        case Region::P2Intervention: return "I2";
    }
    return "I3";
}

RegionClass classify_region(const ZeroSumResidual& r, double phi_value, double tol) {
    const double band = tol * (1.0 + std::fabs(phi_value));
    const bool p1 = r.p1_feasible && std::fabs(r.obstacle_p1) <= band;
    const bool p2 = r.p2_feasible && std::fabs(r.obstacle_p2) <= band;
    const bool pde = std::fabs(r.pde_term) <= band;
    RegionClass out;
    if (p1)
        out.region = Region::P1Intervention;
    else if (p2)
        out.region = Region::P2Intervention;
    else
        out.region = Region::Continuation;
    out.ambiguous = (p1 && p2) || (p1 && pde) || (p2 && pde);
    return out;
}

RegionClass classify_region(const ObstacleResidual& r1, const ObstacleResidual& r2, double phi1_value,
                            double phi2_value, double tol) {
    const bool p1 = r1.feasible && std::fabs(r1.obstacle) <= tol * (1.0 + std::fabs(phi1_value));
    const bool p2 = r2.feasible && std::fabs(r2.obstacle) <= tol * (1.0 + std::fabs(phi2_value));
    RegionClass out;
    if (p1)
        out.region = Region::P1Intervention;
    else if (p2)
        out.region = Region::P2Intervention;
    else
        out.region = Region::Continuation;
    out.ambiguous = p1 && p2;
    return out;
}

} // namespace igs
