#ifndef IGS_CANDIDATE_HPP
#define IGS_CANDIDATE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "igs/errors.hpp"

namespace igs {

// Scalar field on (t, x) with optional analytic derivatives. Residual scans
// evaluate through this interface so closed-form candidates and black-box
// candidates run through the same code. Missing derivatives fall back to
// central differences; used_fd records whether any evaluation did.
struct CandidateFunction {
    using Value = std::function<double(double, const std::array<double, 2>&)>;

    int dim = 1;
    Value value;                                     // required
    Value dt;                                        // optional: d/dt
    std::array<Value, 2> dx{};                       // optional: d/dx_i
    std::array<std::array<Value, 2>, 2> dxx{};       // optional: d2/dx_i dx_j
    std::array<double, 2> domain_lo{-std::numeric_limits<double>::infinity(),
                                    -std::numeric_limits<double>::infinity()};
    std::array<double, 2> domain_hi{std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity()};
    mutable bool used_fd = false;

    bool in_domain(const std::array<double, 2>& x) const {
        for (int i = 0; i < dim; ++i)
            if (x[i] < domain_lo[i] || x[i] > domain_hi[i]) return false;
        return true;
    }

    double operator()(double t, const std::array<double, 2>& x) const {
        if (!value) throw InputError("candidate: value function not set");
        return value(t, x);
    }

    double eval_dt(double t, const std::array<double, 2>& x) const {
        if (dt) return dt(t, x);
        used_fd = true;
        const double h = fd_step1(t);
        return ((*this)(t + h, x) - (*this)(t - h, x)) / (2.0 * h);
    }

    double eval_dx(int i, double t, const std::array<double, 2>& x) const {
        if (dx[i]) return dx[i](t, x);
        used_fd = true;
        const double h = fd_step1(x[i]);
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        return ((*this)(t, xp) - (*this)(t, xm)) / (2.0 * h);
    }

    double eval_dxx(int i, int j, double t, const std::array<double, 2>& x) const {
        if (dxx[i][j]) return dxx[i][j](t, x);
        used_fd = true;
        if (i == j) {
            const double h = fd_step2(x[i]);
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            return ((*this)(t, xp) - 2.0 * (*this)(t, x) + (*this)(t, xm)) / (h * h);
        }
        const double hi = fd_step2(x[i]), hj = fd_step2(x[j]);
        auto xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += hi; xpp[j] += hj;
        xpm[i] += hi; xpm[j] -= hj;
        xmp[i] -= hi; xmp[j] += hj;
        xmm[i] -= hi; xmm[j] -= hj;
        return ((*this)(t, xpp) - (*this)(t, xpm) - (*this)(t, xmp) + (*this)(t, xmm)) /
               (4.0 * hi * hj);
    }

  private:
    // Step sizes balance truncation against roundoff for first and second
    // central differences.
    static double fd_step1(double u) {
        return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::fabs(u));
    }
    static double fd_step2(double u) {
        return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * std::max(1.0, std::fabs(u));
    }
};

} // namespace igs

#endif
