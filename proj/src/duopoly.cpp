#include "igs/duopoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "igs/errors.hpp"
#include "igs/numerics.hpp"
#include "igs/rootfind.hpp"

namespace igs {

namespace {

const char* law_name(MarkKind k) {
    switch (k) {
    case MarkKind::Constant:
        return "constant";
    case MarkKind::TwoPoint:
        return "two-point";
    case MarkKind::TruncNormal:
        return "truncated-normal";
    }
    return "unknown";
}

// Tangency level of the derivative condition: W(x) = C1 r1 e^{r1 x} + C2 r2 e^{r2 x}
// must equal lambda - alpha/epsilon at both band ends.
double W_of(double C1, double C2, double r1, double r2, double x) {
    return C1 * r1 * std::exp(r1 * x) + C2 * r2 * std::exp(r2 * x);
}

struct FirmEqs {
    double r1, r2, level, kappa;
};

// Residuals of one firm's three matching conditions at (xs, xh) under shared
// amplitudes. level = lambda - alpha/epsilon.
void firm_residuals(const FirmEqs& f, double C1, double C2, double xs, double xh, double* out) {
    out[0] = W_of(C1, C2, f.r1, f.r2, xs) - f.level;
    out[1] = W_of(C1, C2, f.r1, f.r2, xh) - f.level;
    const double d1 = std::exp(f.r1 * xs) - std::exp(f.r1 * xh);
    const double d2 = std::exp(f.r2 * xs) - std::exp(f.r2 * xh);
    out[2] = C1 * d1 + C2 * d2 + f.kappa + f.level * (xh - xs);
}

} // namespace

void DuopolyProblem::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InputError("duopoly problem: epsilon must be finite and > 0");
    for (int i = 0; i < 2; ++i) {
        if (!std::isfinite(mu[i])) throw InputError("duopoly problem: mu must be finite");
        if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))
            throw InputError("duopoly problem: sigma must be finite and > 0");
        if (!std::isfinite(sigma_cross[i]))
            throw InputError("duopoly problem: cross-volatility must be finite");
        if (!std::isfinite(alpha[i]) || !std::isfinite(beta[i]))
            throw InputError("duopoly problem: flow coefficients must be finite");
        if (!(lambda[i] >= 0.0) || !std::isfinite(lambda[i]))
            throw InputError("duopoly problem: lambda must be finite and >= 0");
        if (!(kappa[i] > 0.0))
            throw InputError("duopoly problem: kappa must be strictly positive");
        if (!std::isfinite(gamma[i]) || gamma[i] < 0.0)
            throw InputError("duopoly problem: gamma must be finite and >= 0");
    }
    for (const auto& s : jumps) s.validate(2);
    if (!std::isnan(trigger_anchor) && !std::isfinite(trigger_anchor))
        throw InputError("duopoly problem: trigger_anchor must be finite or NaN");
}

double characteristic_q(const DuopolyProblem& p, int firm, double r) {
    double q = 0.5 * p.sigma[firm] * p.sigma[firm] * r * r + p.mu[firm] * r - p.epsilon;
    for (const auto& s : p.jumps) {
        if (s.omega == 0.0 || s.theta[firm] == 0.0) continue;
        bool ok = true;
        q += s.omega * s.law.exp_moment(r * s.theta[firm], &ok);
        if (!ok)
            throw RegimeError(std::string("characteristic equation: exponential moment of the ") +
                              law_name(s.law.kind) +
                              " mark law did not converge; shrink theta or the probe root");
    }
    return q;
}

std::array<double, 2> characteristic_roots(const DuopolyProblem& p, int firm) {
    if (firm < 0 || firm > 1) throw InputError("characteristic_roots: firm must be 0 or 1");
    const double s2 = p.sigma[firm] * p.sigma[firm];

    bool has_jumps = false;
    for (const auto& s : p.jumps)
        if (s.omega > 0.0 && s.theta[firm] != 0.0) has_jumps = true;

    if (!has_jumps) {
        const double disc = std::sqrt(p.mu[firm] * p.mu[firm] + 2.0 * s2 * p.epsilon);
        return {-(p.mu[firm] + disc) / s2, (disc - p.mu[firm]) / s2};
    }

    // q(0) = -epsilon < 0 and the diffusion part dominates for large |r| as
    // long as the mark laws keep their exponential moments finite, so one
    // root lies on each side of zero.
    auto q = [&](double r) { return characteristic_q(p, firm, r); };
    const double step = std::max(1.0, std::sqrt(2.0 * p.epsilon / s2));
    const auto [la, lb] = expand_bracket(q, 0.0, step, -1);
    const double r1 = brent(q, la, lb);
    const auto [ra, rb] = expand_bracket(q, 0.0, step, +1);
    const double r2 = brent(q, ra, rb);
    if (!(r1 < 0.0 && r2 > 0.0))
        throw RegimeError("characteristic equation: roots did not straddle zero");
    return {r1, r2};
}

double symmetric_band_width(double r1, double r2, double level_gap, double kappa) {
    if (!(level_gap > 0.0))
        throw RegimeError(
            "band width: requires lambda < alpha/epsilon; otherwise the marginal value of "
            "goodwill never covers the proportional cost and no band closes the system");
    // Phi(w) + w = kappa / level_gap, with
    //   Phi(w) = (1 - e^{r1 w})(e^{-r2 w} - 1)(r1 - r2) / (r1 r2 (1 - e^{(r1-r2) w})),
    // written with nonpositive exponents only. Phi(w) + w grows from 0 like
    // |r1 r2| w^3 / 12 and is asymptotically linear, so the target is crossed
    // exactly once.
    auto phi_plus_w = [&](double w) {
        const double e1 = std::exp(r1 * w);
        const double e2m = std::exp(-r2 * w);
        const double e12 = std::exp((r1 - r2) * w);
        return (1.0 - e1) * (e2m - 1.0) * (r1 - r2) / (r1 * r2 * (1.0 - e12)) + w;
    };
    const double target = kappa / level_gap;
    double hi = std::cbrt(12.0 * target / std::fabs(r1 * r2));
    for (int i = 0; i < 400 && phi_plus_w(hi) < target; ++i) hi *= 1.5;
    if (phi_plus_w(hi) < target) throw RegimeError("band width: no crossing found");
    return brent([&](double w) { return phi_plus_w(w) - target; }, 1e-12, hi);
}

namespace {

struct SymmetricBand {
    double w, xs, xh, C1, C2;
};

// Closed-form member of the translation family for one firm's parameters.
// The location xs is the caller's anchor; amplitudes follow from the two
// tangency conditions.
SymmetricBand symmetric_member(double r1, double r2, double level, double kappa, double anchor) {
    SymmetricBand b;
    b.w = symmetric_band_width(r1, r2, -level, kappa);
    b.xs = std::isnan(anchor) ? b.w : anchor;
    b.xh = b.xs + b.w;
    const double e1w = std::exp(r1 * b.w);
    const double e12 = std::exp((r1 - r2) * b.w);
    b.C2 = level * std::exp(-r2 * b.xh) * (1.0 - e1w) / (r2 * (1.0 - e12));
    b.C1 = -level * (std::exp(-r2 * b.w) - 1.0) * std::exp(-r1 * b.xs) / (r1 * (1.0 - e12));
    return b;
}

} // namespace

DuopolySolution solve_duopoly(const DuopolyProblem& p) {
    p.validate();
    if (p.sigma_cross[0] != 0.0 || p.sigma_cross[1] != 0.0)
        throw InputError(
            "duopoly solve: threshold system assumes independent coordinates; "
            "cross-volatility belongs to simulation studies only and must be zero here");

    DuopolySolution s;
    s.problem = p;
    for (int i = 0; i < 2; ++i) {
        const auto r = characteristic_roots(p, i);
        s.r1[i] = r[0];
        s.r2[i] = r[1];
        if (!(std::fabs(r[0]) > r[1]))
            s.warnings.push_back("firm " + std::to_string(i + 1) +
                                 ": |r1| <= r2 (nonpositive drift); reported, not enforced");
    }

    std::array<double, 2> level{};
    for (int i = 0; i < 2; ++i) {
        level[i] = p.lambda[i] - p.alpha[i] / p.epsilon;
        if (!(level[i] < 0.0))
            throw RegimeError("duopoly solve: firm " + std::to_string(i + 1) +
                              " has lambda >= alpha/epsilon; goodwill is never worth pushing "
                              "and the matching system has no band solution");
    }

    const double root_scale = std::max({std::fabs(s.r1[0]), s.r2[0], std::fabs(s.r1[1]), s.r2[1]});
    const bool same_dynamics = std::fabs(s.r1[0] - s.r1[1]) <= 1e-10 * root_scale &&
                               std::fabs(s.r2[0] - s.r2[1]) <= 1e-10 * root_scale;
    const bool same_costs = level[0] == level[1] && p.kappa[0] == p.kappa[1];

    if (same_dynamics && same_costs) {
        // Symmetric firms: the six conditions degenerate to a scalar width
        // equation plus two amplitude formulas, with the joint band location
        // left free. Solve the reduced system at the configured anchor.
        const auto b = symmetric_member(s.r1[0], s.r2[0], level[0], p.kappa[0], p.trigger_anchor);
        s.C1 = b.C1;
        s.C2 = b.C2;
        s.x_star = {b.xs, b.xs};
        s.x_hat = {b.xh, b.xh};
        s.symmetric_reduced = true;
        s.feasible = true;
    } else {
        if (same_dynamics)
            s.warnings.push_back(
                "firms share dynamics but not cost schedules: the shared-amplitude system is "
                "translation-degenerate and generically inconsistent; expect a least-squares "
                "report rather than a root");
        else
            s.warnings.push_back("asymmetric dynamics: each coordinate carries its own "
                                 "characteristic roots under shared amplitudes");

        std::array<FirmEqs, 2> eqs{FirmEqs{s.r1[0], s.r2[0], level[0], p.kappa[0]},
                                   FirmEqs{s.r1[1], s.r2[1], level[1], p.kappa[1]}};

        auto F = [&](const Eigen::VectorXd& u) {
            Eigen::VectorXd out(6);
            const double C1 = u[0], C2 = u[1];
            for (int i = 0; i < 2; ++i) {
                const double xs = u[2 + 2 * i], xh = u[3 + 2 * i];
                if (!(xh > xs + 1e-12) || !std::isfinite(xs) || !std::isfinite(xh)) {
                    out.setConstant(std::numeric_limits<double>::quiet_NaN());
                    return out;
                }
                firm_residuals(eqs[i], C1, C2, xs, xh, out.data() + 3 * i);
            }
            return out;
        };

        // Seeds come from each firm's single-band reduction; amplitudes are
        // then averaged or taken from either firm.
        std::array<SymmetricBand, 2> seed{};
        for (int i = 0; i < 2; ++i)
            seed[i] =
                symmetric_member(s.r1[i], s.r2[i], level[i], p.kappa[i], p.trigger_anchor);

        std::vector<std::pair<double, double>> amp = {
            {seed[0].C1, seed[0].C2},
            {seed[1].C1, seed[1].C2},
            {0.5 * (seed[0].C1 + seed[1].C1), 0.5 * (seed[0].C2 + seed[1].C2)}};

        NewtonOptions opt;
        opt.max_iter = 200;
        NewtonResult best;
        double best_norm = std::numeric_limits<double>::infinity();
        for (const auto& [c1, c2] : amp) {
            for (double widen : {1.0, 1.25, 0.8}) {
                Eigen::VectorXd u0(6);
                u0 << c1, c2, seed[0].xs, seed[0].xs + widen * seed[0].w, seed[1].xs,
                    seed[1].xs + widen * seed[1].w;
                NewtonResult r;
                try {
                    r = newton_solve(F, u0, opt);
                } catch (const InputError&) {
                    continue;
                }
                const double n = r.residual.lpNorm<Eigen::Infinity>();
                if (n < best_norm) {
                    best_norm = n;
                    best = r;
                }
                if (r.converged && n < 1e-10) break;
            }
            if (best.converged && best_norm < 1e-10) break;
        }
        if (best.x.size() != 6)
            throw RegimeError("duopoly solve: no admissible starting point produced a finite "
                              "residual; the cost and margin scales are incompatible");

        s.C1 = best.x[0];
        s.C2 = best.x[1];
        s.x_star = {best.x[2], best.x[4]};
        s.x_hat = {best.x[3], best.x[5]};
        s.newton_iterations = best.iterations;
        s.feasible = best.converged && best_norm <= 1e-8;
        if (!s.feasible)
            s.warnings.push_back("matching system did not reach tolerance; best residual " +
                                 std::to_string(best_norm));
    }

    for (int i = 0; i < 2; ++i) {
        const double width = s.x_hat[i] - s.x_star[i];
        if (!(width > 1e-7 * std::max(1.0, std::fabs(s.x_hat[i]))))
            throw RegimeError("duopoly solve: retarget collapsed onto the trigger for firm " +
                              std::to_string(i + 1) +
                              "; the fixed cost is too small to keep the band open");
    }

    std::array<FirmEqs, 2> eqs{FirmEqs{s.r1[0], s.r2[0], level[0], p.kappa[0]},
                               FirmEqs{s.r1[1], s.r2[1], level[1], p.kappa[1]}};
    for (int i = 0; i < 2; ++i)
        firm_residuals(eqs[i], s.C1, s.C2, s.x_star[i], s.x_hat[i], s.residuals.data() + 3 * i);
    return s;
}

std::array<CandidateFunction, 2> build_firm_values(const DuopolySolution& s) {
    const auto& p = s.problem;
    std::array<CandidateFunction, 2> out;

    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        const double eps = p.epsilon;
        const double C1 = s.C1, C2 = s.C2;
        const double a_own = p.alpha[i] / eps;
        const double b_riv = p.beta[i] / eps;
        const double lam = p.lambda[i], kap = p.kappa[i];
        const double xsi = s.x_star[i], xhi = s.x_hat[i];
        const double xsj = s.x_star[j], xhj = s.x_hat[j];
        const double r1i = s.r1[i], r2i = s.r2[i];
        const double r1j = s.r1[j], r2j = s.r2[j];
        const double K = (p.mu[i] * p.alpha[i] - p.mu[j] * p.beta[i]) / (eps * eps);

        auto own_base = [=](double u) { return C1 * std::exp(r1i * u) + C2 * std::exp(r2i * u) + a_own * u; };
        auto riv_base = [=](double v) { return C1 * std::exp(r1j * v) + C2 * std::exp(r2j * v) - b_riv * v; };

        // Own coordinate: exponential form in the continuation band, value
        // matched affine branch inside the action region. Rival coordinate:
        // the rival resets instantly and at no cost to this firm, so the
        // value below the rival trigger is the value at the rival retarget.
        auto own = [=](double u) {
            return u >= xsi ? own_base(u) : own_base(xhi) - lam * (xhi - u) - kap;
        };
        auto own_d = [=](double u) {
            return u >= xsi ? C1 * r1i * std::exp(r1i * u) + C2 * r2i * std::exp(r2i * u) + a_own
                            : lam;
        };
        auto own_dd = [=](double u) {
            return u >= xsi ? C1 * r1i * r1i * std::exp(r1i * u) + C2 * r2i * r2i * std::exp(r2i * u)
                            : 0.0;
        };
        auto riv = [=](double v) { return v >= xsj ? riv_base(v) : riv_base(xhj); };
        auto riv_d = [=](double v) {
            return v >= xsj ? C1 * r1j * std::exp(r1j * v) + C2 * r2j * std::exp(r2j * v) - b_riv
                            : 0.0;
        };
        auto riv_dd = [=](double v) {
            return v >= xsj ? C1 * r1j * r1j * std::exp(r1j * v) + C2 * r2j * r2j * std::exp(r2j * v)
                            : 0.0;
        };

        auto shape = [=](const std::array<double, 2>& x) { return own(x[i]) + riv(x[j]) + K; };

        CandidateFunction f;
        f.dim = 2;
        f.value = [=](double t, const std::array<double, 2>& x) {
            return std::exp(-eps * t) * shape(x);
        };
        f.dt = [=](double t, const std::array<double, 2>& x) {
            return -eps * std::exp(-eps * t) * shape(x);
        };
        f.dx[i] = [=](double t, const std::array<double, 2>& x) {
            return std::exp(-eps * t) * own_d(x[i]);
        };
        f.dx[j] = [=](double t, const std::array<double, 2>& x) {
            return std::exp(-eps * t) * riv_d(x[j]);
        };
        f.dxx[i][i] = [=](double t, const std::array<double, 2>& x) {
            return std::exp(-eps * t) * own_dd(x[i]);
        };
        f.dxx[j][j] = [=](double t, const std::array<double, 2>& x) {
            return std::exp(-eps * t) * riv_dd(x[j]);
        };
        f.dxx[0][1] = [](double, const std::array<double, 2>&) { return 0.0; };
        f.dxx[1][0] = [](double, const std::array<double, 2>&) { return 0.0; };
        out[i] = std::move(f);
    }
    return out;
}

std::array<ThresholdPolicy, 2> build_duopoly_policies(const DuopolySolution& s) {
    std::array<ThresholdPolicy, 2> out;
    for (int i = 0; i < 2; ++i) {
        ThresholdPolicy& pol = out[i];
        pol.player = i;
        pol.coord = i;
        pol.trigger = s.x_star[i];
        pol.retarget = s.x_hat[i];
        pol.lambda = s.problem.lambda[i];
        pol.kappa = s.problem.kappa[i];
        pol.direction = ThresholdPolicy::Direction::InterveneWhenBelow;
        pol.validate();
    }
    return out;
}

ModelSpec duopoly_model(const DuopolyProblem& p) {
    p.validate();
    ModelSpec m;
    m.dim = 2;
    m.drift = p.mu;
    m.vol = {{{p.sigma[0], p.sigma_cross[0]}, {p.sigma_cross[1], p.sigma[1]}}};
    m.jumps = p.jumps;
    m.exit.kind = ExitSpec::Kind::None;
    m.validate();
    return m;
}

InterventionQuery duopoly_query(const DuopolyProblem& p, int firm, double t) {
    if (firm < 0 || firm > 1) throw InputError("duopoly_query: firm must be 0 or 1");
    InterventionQuery q;
    q.coord = firm;
    q.z_lo = 0.0;
    q.z_hi = std::numeric_limits<double>::infinity();
    q.cost = CostSpec{p.lambda[firm], p.kappa[firm], CostConvention::SubtractedFromPayoff};
    q.cost_scale = std::exp(-p.epsilon * t);
    q.maximize = true;
    return q;
}

} // namespace igs
