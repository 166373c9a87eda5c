#ifndef IGS_MARK_LAW_HPP
#define IGS_MARK_LAW_HPP

#include <functional>
#include <random>
#include <utility>

namespace igs {

// Jump mark distributions with bounded support. Bounded support keeps every
// exponential moment finite, so the characteristic-equation integrals below
// never diverge; overflow of e^{u z} itself is still guarded at call sites.
enum class MarkKind { Constant, TwoPoint, TruncNormal };

struct MarkLaw {
    MarkKind kind = MarkKind::Constant;

    // Constant
    double value = 1.0;
    // TwoPoint: up with probability p_up, dn otherwise
    double up = 1.0, dn = -1.0, p_up = 0.5;
    // TruncNormal: N(mu, sigma^2) conditioned on [lo, hi]
    double mu = 0.0, sigma = 1.0, lo = -1.0, hi = 1.0;

    static MarkLaw constant(double c);
    static MarkLaw two_point(double up, double dn, double p_up);
    static MarkLaw truncated_normal(double mu, double sigma, double lo, double hi);

    void validate() const;

    double mean() const;
    std::pair<double, double> support() const;

    // E[g(Z)]: exact finite sum for atomic laws, adaptive Gauss-Legendre
    // against the truncated density otherwise.
    double expect(const std::function<double(double)>& g, bool* converged = nullptr) const;

    // E[e^{uZ} - 1 - uZ], the mark factor of the jump term in the
    // characteristic equation. Closed form for atomic laws.
    double exp_moment(double u, bool* converged = nullptr) const;

    double sample(std::mt19937_64& rng) const;
};

// Standard normal CDF and its inverse (Acklam rational approximation polished
// by one Halley step). Used for truncated-normal moments and sampling.
double norm_cdf(double x);
double norm_ppf(double p);

} // namespace igs

#endif
