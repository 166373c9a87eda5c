#ifndef IGS_SDE_ENGINE_HPP
#define IGS_SDE_ENGINE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "igs/model.hpp"
#include "igs/numerics.hpp"
#include "igs/policy.hpp"

namespace igs {

struct ImpulseEvent {
    double time = 0.0;
    int player = 0;
    int coord = 0;
    double z = 0.0;    // displacement applied: retarget - state_before
    double cost = 0.0; // lambda * z + kappa of the owning policy
    double state_before = 0.0;
    double state_after = 0.0;
};

// Discretized controlled path. States are the post-impulse values at each
// grid time (the path is evaluated right-continuously at event times).
struct PathRecord {
    int dim = 1;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<std::array<double, 2>> states;
    std::vector<ImpulseEvent> events;
    bool exited = false;
    double exit_time = std::numeric_limits<double>::quiet_NaN();
};

// Compound-Poisson increment over one step for a single coordinate, together
// with its compensator. The compensated increment (increment - compensator)
// has mean zero. Utility form for one-coordinate models and moment tests;
// the path engine samples each source once and fans the marks out to all
// coordinates so that shared sources stay correlated.
inline std::pair<double, double> sample_jump_increment(const ModelSpec& model, int coord,
                                                       double dt, std::mt19937_64& rng) {
    if (coord < 0 || coord >= model.dim) throw InputError("sample_jump_increment: coord out of range");
    if (!(dt > 0.0)) throw InputError("sample_jump_increment: dt must be > 0");
    double incr = 0.0, comp = 0.0;
    for (const auto& src : model.jumps) {
        if (src.omega > 0.0) {
            std::poisson_distribution<int> pois(src.omega * dt);
            const int n = pois(rng);
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += src.law.sample(rng);
            incr += src.theta[coord] * s;
        }
        comp += src.theta[coord] * src.omega * src.law.mean() * dt;
    }
    return {incr, comp};
}

namespace detail {

inline void check_policies(const ModelSpec& model, std::span<const ThresholdPolicy> policies) {
    bool seen[2] = {false, false};
    for (const auto& p : policies) {
        p.validate();
        if (p.coord < 0 || p.coord >= model.dim)
            throw InputError("policy: coordinate out of model range");
        if (seen[p.player]) throw InputError("policy: at most one policy per player");
        seen[p.player] = true;
    }
}

// Dynamics core shared by the recorder and the payoff estimator.
//
// Per-step draw order (fixed; reproducibility depends on it):
//   1. model.dim Gaussian increments, in coordinate order of dB,
//   2. per jump source, in declaration order: Poisson count, then marks,
//   3. one uniform for the boundary-crossing test, iff an exit predicate is
//      set. The uniform is drawn every step, whatever the state, so paired
//      runs that differ only in their policies stay stream-aligned.
// Post-step order at each grid time: exit predicate first (an exited step
// takes no impulses), then policies in ascending player order, player 1
// seeing the post-impulse state of player 0.
//
// Exit detection combines the grid predicate with a Brownian-bridge test for
// crossings between grid times: a bridge from a to b over dt with diffusion
// variance v on the exit coordinate crosses the level with probability
// exp(-2 (a-L)(b-L) / v). Without it the survivorship error of pure grid
// checks decays only like sqrt(dt). Jumps inside the step are not bridged;
// they move the endpoint only. Exited paths are parked at the level itself
// (stopped-process convention), not at the overshot grid value.
//
// on_state(t, x) runs at t=0 and after every completed step;
// on_event(ev) runs at each impulse.
template <class FState, class FEvent>
inline void simulate_core(const ModelSpec& model, std::span<const ThresholdPolicy> policies,
                          std::array<double, 2> x, double T, double dt, std::mt19937_64& rng,
                          bool* exited, double* exit_time, FState&& on_state, FEvent&& on_event) {
    const long long nsteps = std::llround(T / dt);
    const double sqdt = std::sqrt(dt);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Policies indexed by player so the intervention order is fixed.
    const ThresholdPolicy* by_player[2] = {nullptr, nullptr};
    for (const auto& p : policies) by_player[p.player] = &p;

    // Per-source compensator rates (drift correction of the compensated form).
    double comp_rate[2] = {0.0, 0.0};
    bool any_jumps = false;
    for (const auto& src : model.jumps) {
        const double m = src.omega * src.law.mean();
        for (int i = 0; i < model.dim; ++i) comp_rate[i] += src.theta[i] * m;
        if (src.omega > 0.0) any_jumps = true;
    }

    const bool exit_active = model.exit.kind != ExitSpec::Kind::None;
    const int ec = model.exit.coord;
    const double exit_var = exit_active ? model.diffusion(ec, ec) * dt : 0.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    *exited = false;
    *exit_time = std::numeric_limits<double>::quiet_NaN();
    on_state(0.0, x);

    for (long long n = 1; n <= nsteps; ++n) {
        const double t = n * dt;
        const std::array<double, 2> x_prev = x;
        double g[2] = {0.0, 0.0};
        for (int j = 0; j < model.dim; ++j) g[j] = gauss(rng);
        for (int i = 0; i < model.dim; ++i) {
            double dx = model.drift[i] * dt - comp_rate[i] * dt;
            for (int j = 0; j < model.dim; ++j) dx += model.vol[i][j] * sqdt * g[j];
            x[i] += dx;
        }
        if (any_jumps) {
            for (const auto& src : model.jumps) {
                if (src.omega <= 0.0) continue;
                std::poisson_distribution<int> pois(src.omega * dt);
                const int k = pois(rng);
                double s = 0.0;
                for (int m = 0; m < k; ++m) s += src.law.sample(rng);
                if (k > 0)
                    for (int i = 0; i < model.dim; ++i) x[i] += src.theta[i] * s;
            }
        }

        for (int i = 0; i < model.dim; ++i) {
            if (!std::isfinite(x[i])) {
                std::string msg = "simulation: state became non-finite at t=" + std::to_string(t) +
                                  "; last finite state at t=" + std::to_string(t - dt) + " was (";
                for (int k = 0; k < model.dim; ++k)
                    msg += (k ? ", " : "") + std::to_string(x_prev[k]);
                throw RegimeError(msg + ")");
            }
        }

        if (exit_active) {
            const double u = unif(rng);
            bool hit = model.exit.triggered(std::span<const double>(x.data(), model.dim));
            if (!hit && exit_var > 0.0) {
                const double sgn = model.exit.kind == ExitSpec::Kind::Below ? 1.0 : -1.0;
                const double a = std::max(0.0, sgn * (x_prev[ec] - model.exit.level));
                const double b = std::max(0.0, sgn * (x[ec] - model.exit.level));
                hit = u < std::exp(-2.0 * a * b / exit_var);
            }
            if (hit) {
                x[ec] = model.exit.level;
                *exited = true;
                *exit_time = t;
                on_state(t, x);
                return;
            }
        }

        for (int pl = 0; pl < 2; ++pl) {
            const ThresholdPolicy* p = by_player[pl];
            if (p && p->triggered(x[p->coord])) {
                ImpulseEvent ev;
                ev.time = t;
                ev.player = pl;
                ev.coord = p->coord;
                ev.state_before = x[p->coord];
                ev.z = p->retarget - x[p->coord];
                ev.cost = p->cost_of(ev.z);
                x[p->coord] = apply_impulse(x[p->coord], ev.z);
                ev.state_after = x[p->coord];
                on_event(ev);
            }
        }
        on_state(t, x);
    }
}

} // namespace detail

// Records the full grid path. The horizon is rounded to the nearest grid
// multiple of dt. Identical (model, policies, x0, T, dt, seed) produce a
// bit-identical record.
inline PathRecord simulate_path(const ModelSpec& model, std::span<const ThresholdPolicy> policies,
                                std::array<double, 2> x0, double T, double dt, std::uint64_t seed) {
    model.validate();
    detail::check_policies(model, policies);
    if (!(dt > 0.0)) throw InputError("simulate_path: dt must be > 0");
    if (std::llround(T / dt) < 1) throw InputError("simulate_path: horizon shorter than one step");
    for (int i = 0; i < model.dim; ++i)
        if (!std::isfinite(x0[i])) throw InputError("simulate_path: x0 must be finite");

    PathRecord rec;
    rec.dim = model.dim;
    rec.dt = dt;
    rec.seed = seed;
    const long long nsteps = std::llround(T / dt);
    rec.times.reserve(nsteps + 1);
    rec.states.reserve(nsteps + 1);

    std::mt19937_64 rng(seed);
    detail::simulate_core(
        model, policies, x0, T, dt, rng, &rec.exited, &rec.exit_time,
        [&](double t, const std::array<double, 2>& x) {
            rec.times.push_back(t);
            rec.states.push_back(x);
        },
        [&](const ImpulseEvent& ev) { rec.events.push_back(ev); });
    return rec;
}

// One row per grid time: time, coordinates, cumulative impulse cost per player.
inline void write_path_csv(std::ostream& os, const PathRecord& rec) {
    os << "time";
    for (int i = 0; i < rec.dim; ++i) os << ",x" << i;
    os << ",cum_cost_p1,cum_cost_p2\n";
    double cum[2] = {0.0, 0.0};
    std::size_t ev = 0;
    for (std::size_t n = 0; n < rec.times.size(); ++n) {
        while (ev < rec.events.size() && rec.events[ev].time <= rec.times[n]) {
            cum[rec.events[ev].player] += rec.events[ev].cost;
            ++ev;
        }
        os << rec.times[n];
        for (int i = 0; i < rec.dim; ++i) os << ',' << rec.states[n][i];
        os << ',' << cum[0] << ',' << cum[1] << '\n';
    }
}

} // namespace igs

#endif
