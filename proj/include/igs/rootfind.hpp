#ifndef IGS_ROOTFIND_HPP
#define IGS_ROOTFIND_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "igs/errors.hpp"

namespace igs {

struct NewtonOptions {
    int max_iter = 100;
    double ftol = 1e-12;     // on the max-norm of the residual
    double xtol = 1e-14;     // on the max-norm of the relative step
    int max_halvings = 30;
    double fd_rel = 1e-7;    // relative Jacobian step
};

struct NewtonResult {
    Eigen::VectorXd x;
    Eigen::VectorXd residual;
    bool converged = false;
    int iterations = 0;
};

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline Eigen::MatrixXd fd_jacobian(const VectorField& F, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& fx, double rel) {
    const auto n = x.size();
    Eigen::MatrixXd J(fx.size(), n);
    Eigen::VectorXd xp = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = rel * std::max(1.0, std::fabs(x[j]));
        xp[j] = x[j] + h;
        J.col(j) = (F(xp) - fx) / h;
        xp[j] = x[j];
    }
    return J;
}

// Damped Newton on F(x) = 0. Steps that fail to reduce the residual norm
// are halved up to max_halvings times; a step that still fails ends the
// iteration with converged reflecting the ftol test only. NaN or infinite
// residuals at the starting point are rejected outright.
inline NewtonResult newton_solve(const VectorField& F, Eigen::VectorXd x0,
                                 const NewtonOptions& opt = {}) {
    NewtonResult out;
    out.x = std::move(x0);
    out.residual = F(out.x);
    if (!out.residual.allFinite()) throw InputError("newton_solve: residual not finite at start");

    double fnorm = out.residual.lpNorm<Eigen::Infinity>();
    for (out.iterations = 0; out.iterations < opt.max_iter; ++out.iterations) {
        if (fnorm < opt.ftol) {
            out.converged = true;
            return out;
        }
        const Eigen::MatrixXd J = fd_jacobian(F, out.x, out.residual, opt.fd_rel);
        if (!J.allFinite()) break;
        Eigen::VectorXd step = J.partialPivLu().solve(-out.residual);
        if (!step.allFinite()) break;

        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, scale *= 0.5) {
            Eigen::VectorXd xt = out.x + scale * step;
            Eigen::VectorXd ft = F(xt);
            if (ft.allFinite() && ft.lpNorm<Eigen::Infinity>() < fnorm) {
                const double rel_step =
                    (scale * step).cwiseQuotient(out.x.cwiseAbs().cwiseMax(1.0))
                        .lpNorm<Eigen::Infinity>();
                out.x = std::move(xt);
                out.residual = std::move(ft);
                fnorm = out.residual.lpNorm<Eigen::Infinity>();
                accepted = true;
                if (rel_step < opt.xtol) {
                    out.converged = fnorm < std::sqrt(opt.ftol);
                    return out;
                }
                break;
            }
        }
        if (!accepted) break;
    }
    out.converged = fnorm < opt.ftol;
    return out;
}

} // namespace igs

#endif
