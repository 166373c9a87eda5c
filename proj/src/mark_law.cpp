#include "igs/mark_law.hpp"

#include <cmath>

#include "igs/errors.hpp"
#include "igs/numerics.hpp"

namespace igs {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("norm_ppf: p must lie in (0,1)");
    // Acklam coefficients.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley step against erfc-based CDF brings the error to ~1 ulp.
    const double e = norm_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

MarkLaw MarkLaw::constant(double c) {
    MarkLaw m;
    m.kind = MarkKind::Constant;
    m.value = c;
    m.validate();
    return m;
}

MarkLaw MarkLaw::two_point(double up, double dn, double p_up) {
    MarkLaw m;
    m.kind = MarkKind::TwoPoint;
    m.up = up;
    m.dn = dn;
    m.p_up = p_up;
    m.validate();
    return m;
}

MarkLaw MarkLaw::truncated_normal(double mu, double sigma, double lo, double hi) {
    MarkLaw m;
    m.kind = MarkKind::TruncNormal;
    m.mu = mu;
    m.sigma = sigma;
    m.lo = lo;
    m.hi = hi;
    m.validate();
    return m;
}

void MarkLaw::validate() const {
    switch (kind) {
    case MarkKind::Constant:
        if (!std::isfinite(value)) throw InputError("mark law: constant value must be finite");
        break;
    case MarkKind::TwoPoint:
        if (!(p_up >= 0.0 && p_up <= 1.0))
            throw InputError("mark law: two-point probability must lie in [0,1]");
        if (!std::isfinite(up) || !std::isfinite(dn))
            throw InputError("mark law: two-point atoms must be finite");
        break;
    case MarkKind::TruncNormal: {
        if (!(sigma > 0.0)) throw InputError("mark law: sigma must be > 0");
        if (!(lo < hi)) throw InputError("mark law: truncation requires lo < hi");
        const double mass = norm_cdf((hi - mu) / sigma) - norm_cdf((lo - mu) / sigma);
        if (!(mass > 1e-12))
            throw InputError("mark law: truncation window carries negligible mass");
        break;
    }
    }
}

double MarkLaw::mean() const {
    switch (kind) {
    case MarkKind::Constant:
        return value;
    case MarkKind::TwoPoint:
        return p_up * up + (1.0 - p_up) * dn;
    case MarkKind::TruncNormal: {
        const double a = (lo - mu) / sigma, b = (hi - mu) / sigma;
        const double phi_a = std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI);
        const double phi_b = std::exp(-0.5 * b * b) / std::sqrt(2.0 * M_PI);
        const double mass = norm_cdf(b) - norm_cdf(a);
        return mu + sigma * (phi_a - phi_b) / mass;
    }
    }
    return 0.0;
}

std::pair<double, double> MarkLaw::support() const {
    switch (kind) {
    case MarkKind::Constant:
        return {value, value};
    case MarkKind::TwoPoint:
        return {std::min(up, dn), std::max(up, dn)};
    case MarkKind::TruncNormal:
        return {lo, hi};
    }
    return {0.0, 0.0};
}

double MarkLaw::expect(const std::function<double(double)>& g, bool* converged) const {
    if (converged) *converged = true;
    switch (kind) {
    case MarkKind::Constant:
        return g(value);
    case MarkKind::TwoPoint:
        return p_up * g(up) + (1.0 - p_up) * g(dn);
    case MarkKind::TruncNormal: {
        const double a = (lo - mu) / sigma, b = (hi - mu) / sigma;
        const double mass = norm_cdf(b) - norm_cdf(a);
        const double s = sigma, m = mu;
        auto integrand = [&](double z) {
            const double t = (z - m) / s;
            const double pdf = std::exp(-0.5 * t * t) / (s * std::sqrt(2.0 * M_PI) * mass);
            return g(z) * pdf;
        };
        return integrate_gl_adaptive(integrand, lo, hi, 1e-10, 32, 1024, converged);
    }
    }
    return 0.0;
}

double MarkLaw::exp_moment(double u, bool* converged) const {
    const auto [zlo, zhi] = support();
    const double worst = std::max(std::abs(u * zlo), std::abs(u * zhi));
    if (worst > 700.0)
        throw RegimeError("mark law: exponential moment overflows for |u z| > 700");
    auto f = [u](double z) { return std::expm1(u * z) - u * z; };
    return expect(f, converged);
}

double MarkLaw::sample(std::mt19937_64& rng) const {
    switch (kind) {
    case MarkKind::Constant:
        return value;
    case MarkKind::TwoPoint: {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        return unif(rng) < p_up ? up : dn;
    }
    case MarkKind::TruncNormal: {
        // Inverse-CDF with a single uniform; keeps the per-mark draw count
        // fixed so path reproducibility is independent of mark values.
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double Fa = norm_cdf((lo - mu) / sigma), Fb = norm_cdf((hi - mu) / sigma);
        double p = Fa + unif(rng) * (Fb - Fa);
        p = std::min(std::max(p, 1e-16), 1.0 - 1e-16);
        double z = mu + sigma * norm_ppf(p);
        return std::min(std::max(z, lo), hi);
    }
    }
    return 0.0;
}

} // namespace igs
