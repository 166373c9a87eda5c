#ifndef IGS_NUMERICS_HPP
#define IGS_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "igs/errors.hpp"

namespace igs {

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature.
// Nodes are the roots of P_n, found by Newton iteration on the three-term
// recurrence; weights w = 2 / ((1 - x^2) P_n'(x)^2).
// ---------------------------------------------------------------------------

struct GLRule {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

inline GLRule gauss_legendre(int n) {
    if (n < 1) throw InputError("gauss_legendre: order must be >= 1");
    GLRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

// Cached rule lookup. Single-threaded use only (solvers and scans); the
// Monte Carlo layer never touches quadrature from worker code.
inline const GLRule& gauss_legendre_cached(int n) {
    static std::vector<std::pair<int, GLRule>> cache;
    for (auto& e : cache)
        if (e.first == n) return e.second;
    cache.emplace_back(n, gauss_legendre(n));
    return cache.back().second;
}

inline double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const GLRule& r = gauss_legendre_cached(n);
    const double c = 0.5 * (b - a), d = 0.5 * (b + a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * f(c * r.nodes[i] + d);
    return c * s;
}

// Node-doubling convergence: integrate at n and 2n, accept when the relative
// change drops below rtol. Returns the 2n value; *converged reports success.
inline double integrate_gl_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rtol = 1e-8, int n0 = 16, int nmax = 512,
                                    bool* converged = nullptr) {
    double prev = integrate_gl(f, a, b, n0);
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        double cur = integrate_gl(f, a, b, n);
        if (std::abs(cur - prev) <= rtol * (1.0 + std::abs(cur))) {
            if (converged) *converged = true;
            return cur;
        }
        prev = cur;
    }
    if (converged) *converged = false;
    return prev;
}

// ---------------------------------------------------------------------------
// Scalar root finding.
// ---------------------------------------------------------------------------

// Brent's method on a sign-changing bracket [a, b].
inline double brent(const std::function<double(double)>& f, double a, double b,
                    double xtol = 1e-14, int maxit = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw RegimeError("brent: bracket does not change sign");
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, s = b, fs = fb, d = 0.0;
    bool mflag = true;
    for (int it = 0; it < maxit; ++it) {
        if (fb == 0.0 || std::abs(b - a) < xtol) return b;
        if (fa != fc && fb != fc) {
            // inverse quadratic interpolation
            s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa); // secant
        }
        double lo = (3.0 * a + b) / 4.0, hi = b;
        if (lo > hi) std::swap(lo, hi);
        bool cond = (s < lo || s > hi) || (mflag && std::abs(s - b) >= std::abs(b - c) / 2.0) ||
                    (!mflag && std::abs(s - b) >= std::abs(c - d) / 2.0) ||
                    (mflag && std::abs(b - c) < xtol) || (!mflag && std::abs(c - d) < xtol);
        if (cond) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return b;
}

// Expands [a, b] geometrically about its right (dir=+1) or left (dir=-1) end
// until f changes sign against f(anchor). Used to bracket the characteristic
// roots on each side of 0.
inline std::pair<double, double> expand_bracket(const std::function<double(double)>& f,
                                                double anchor, double step, int dir,
                                                int maxdoubles = 200) {
    double fa = f(anchor);
    double x = anchor;
    for (int i = 0; i < maxdoubles; ++i) {
        double xn = anchor + dir * step;
        double fn = f(xn);
        if (fa * fn <= 0.0) return dir > 0 ? std::make_pair(x, xn) : std::make_pair(xn, x);
        x = xn;
        step *= 2.0;
    }
    throw RegimeError("expand_bracket: no sign change found");
}

// ---------------------------------------------------------------------------
// Deterministic seeding and reproducible reductions.
// ---------------------------------------------------------------------------

// splitmix64 finalizer; decorrelates consecutive counters.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-path seed: master seed advanced by the path counter through splitmix64.
// Fixed scheme so that identical (inputs, seed) reproduce identical paths and
// common-random-number pairing holds across policy edits.
inline std::uint64_t path_seed(std::uint64_t master, std::uint64_t path_index) {
    return splitmix64(master + 0x9E3779B97F4A7C15ULL * (path_index + 1));
}

// Pairwise summation; association independent of caller's accumulation habits,
// so means are reproducible and insensitive to path count rounding.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline MeanSE mean_se(std::span<const double> v) {
    MeanSE r;
    r.n = v.size();
    if (r.n == 0) return r;
    r.mean = pairwise_sum(v) / double(r.n);
    if (r.n == 1) return r;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - r.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / double(r.n - 1);
    r.se = std::sqrt(var / double(r.n));
    return r;
}

} // namespace igs

#endif
