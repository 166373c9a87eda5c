#include "igs/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "igs/errors.hpp"
#include "igs/numerics.hpp"
#include "igs/sde_engine.hpp"

namespace igs {

namespace {

constexpr std::uint64_t kStreamSalt = 0x9E3779B97F4A7C15ULL;

struct BatchResult {
    std::vector<std::vector<double>> samples; // one row per scoreboard
    std::array<double, 2> mean_events{0.0, 0.0};
    double exit_fraction = 0.0;
};

// One shared batch of paths scored under every spec. The simulation follows
// specs[0]; path i always uses path_seed(seed, i).
BatchResult run_batch(std::span<const PayoffSpec> specs, std::size_t n_paths, double dt,
                      std::uint64_t seed) {
    if (specs.empty()) throw InputError("payoff estimate: at least one scoreboard is required");
    const PayoffSpec& lead = specs.front();
    lead.model.validate();
    detail::check_policies(lead.model, lead.policies);
    if (!(dt > 0.0)) throw InputError("payoff estimate: dt must be positive");
    if (!(lead.horizon > 0.0)) throw InputError("payoff estimate: horizon must be positive");
    if (n_paths < 2) throw InputError("payoff estimate: at least two paths are required");

    const std::size_t K = specs.size();
    const long long nsteps = std::llround(lead.horizon / dt);

    // Discount factors tabulated on the step grid; events and states land on
    // grid times only, so lookups replace per-step exponentials.
    std::vector<std::vector<double>> disc(K);
    for (std::size_t k = 0; k < K; ++k) {
        disc[k].resize(std::size_t(nsteps) + 1);
        for (long long n = 0; n <= nsteps; ++n)
            disc[k][std::size_t(n)] = std::exp(-specs[k].discount * (double(n) * dt));
    }

    BatchResult out;
    out.samples.assign(K, std::vector<double>(n_paths, 0.0));
    std::vector<double> acc_run(K), acc_ev(K), prev_g(K);
    std::size_t exits = 0;

    for (std::size_t i = 0; i < n_paths; ++i) {
        std::mt19937_64 rng(path_seed(seed, i));
        std::fill(acc_run.begin(), acc_run.end(), 0.0);
        std::fill(acc_ev.begin(), acc_ev.end(), 0.0);
        double prev_t = 0.0;
        bool first = true;
        double last_t = 0.0;
        std::array<double, 2> last_x = lead.x0;
        std::array<double, 2> ev_count{0.0, 0.0};
        bool exited = false;
        double exit_time = 0.0;

        detail::simulate_core(
            lead.model, lead.policies, lead.x0, lead.horizon, dt, rng, &exited, &exit_time,
            [&](double t, const std::array<double, 2>& x) {
                last_t = t;
                last_x = x;
                const auto n = std::size_t(std::llround(t / dt));
                for (std::size_t k = 0; k < K; ++k) {
                    if (!specs[k].running) continue;
                    const double g = disc[k][n] * specs[k].running(t, x);
                    if (!first) acc_run[k] += 0.5 * (prev_g[k] + g) * (t - prev_t);
                    prev_g[k] = g;
                }
                prev_t = t;
                first = false;
            },
            [&](const ImpulseEvent& ev) {
                ev_count[ev.player] += 1.0;
                const auto n = std::size_t(std::llround(ev.time / dt));
                for (std::size_t k = 0; k < K; ++k) {
                    const double w = specs[k].event_weight[ev.player];
                    if (w == 0.0) continue;
                    acc_ev[k] += w * ev.cost * (specs[k].discount_event_costs ? disc[k][n] : 1.0);
                }
            });

        for (std::size_t k = 0; k < K; ++k) {
            double v = acc_run[k] + acc_ev[k];
            if (specs[k].terminal) {
                const auto n = std::size_t(std::llround(last_t / dt));
                v += disc[k][n] * specs[k].terminal(last_t, last_x);
            }
            if (!std::isfinite(v))
                throw RegimeError("payoff estimate: non-finite payoff on path " +
                                  std::to_string(i) + " (path seed " +
                                  std::to_string(path_seed(seed, i)) + ")");
            out.samples[k][i] = v;
        }
        out.mean_events[0] += ev_count[0];
        out.mean_events[1] += ev_count[1];
        if (exited) ++exits;
    }

    out.mean_events[0] /= double(n_paths);
    out.mean_events[1] /= double(n_paths);
    out.exit_fraction = double(exits) / double(n_paths);
    return out;
}

} // namespace

PayoffEstimate estimate_payoff(const PayoffSpec& spec, std::size_t n_paths, double dt,
                               std::uint64_t seed) {
    return estimate_payoffs(std::span<const PayoffSpec>(&spec, 1), n_paths, dt, seed).front();
}

std::vector<PayoffEstimate> estimate_payoffs(std::span<const PayoffSpec> specs,
                                             std::size_t n_paths, double dt, std::uint64_t seed) {
    const BatchResult batch = run_batch(specs, n_paths, dt, seed);
    std::vector<PayoffEstimate> out(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const MeanSE ms = mean_se(batch.samples[k]);
        out[k].mean = ms.mean;
        out[k].se = ms.se;
        out[k].n_paths = n_paths;
        out[k].events_per_path = batch.mean_events;
        out[k].exit_fraction = batch.exit_fraction;
    }
    return out;
}

std::vector<double> payoff_samples(const PayoffSpec& spec, std::size_t n_paths, double dt,
                                   std::uint64_t seed) {
    BatchResult batch = run_batch(std::span<const PayoffSpec>(&spec, 1), n_paths, dt, seed);
    return std::move(batch.samples.front());
}

std::vector<PolicyEdit> standard_edits(int player) {
    std::vector<PolicyEdit> out;
    for (bool trig : {true, false})
        for (double f : {0.9, 1.1, 0.75, 1.25}) out.push_back({player, trig, f});
    return out;
}

std::vector<DeviationResult> deviation_test(const PayoffSpec& spec,
                                            std::span<const PolicyEdit> edits,
                                            std::size_t n_paths, double dt, std::uint64_t seed) {
    const std::vector<double> base = payoff_samples(spec, n_paths, dt, seed);
    const MeanSE base_ms = mean_se(base);

    std::vector<DeviationResult> out;
    out.reserve(edits.size());
    for (const PolicyEdit& e : edits) {
        DeviationResult r;
        r.edit = e;
        r.base_mean = base_ms.mean;

        PayoffSpec edited = spec;
        int idx = -1;
        for (std::size_t j = 0; j < edited.policies.size(); ++j)
            if (edited.policies[j].player == e.player) idx = int(j);
        if (idx < 0) {
            r.note = "no policy for the edited player";
            out.push_back(std::move(r));
            continue;
        }
        ThresholdPolicy& pol = edited.policies[std::size_t(idx)];
        (e.edit_trigger ? pol.trigger : pol.retarget) *= e.factor;
        try {
            pol.validate();
        } catch (const InputError& ex) {
            r.note = ex.what();
            out.push_back(std::move(r));
            continue;
        }

        // Common random numbers: the edited batch replays the base seeds.
        const std::vector<double> dev = payoff_samples(edited, n_paths, dt, seed);
        std::vector<double> diff(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) diff[i] = dev[i] - base[i];
        const MeanSE dm = mean_se(dev);
        const MeanSE ds = mean_se(diff);
        r.valid = true;
        r.edited_mean = dm.mean;
        r.diff_mean = ds.mean;
        r.diff_se = ds.se;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<InterventionStats> intervention_scan(const ModelSpec& model,
                                                 std::span<const ThresholdPolicy> policies,
                                                 std::array<double, 2> x0, double horizon,
                                                 std::span<const double> dts, std::size_t n_paths,
                                                 std::uint64_t seed) {
    model.validate();
    if (dts.empty()) throw InputError("intervention scan: at least one step size is required");
    if (n_paths < 2) throw InputError("intervention scan: at least two paths are required");
    for (const ThresholdPolicy& p : policies) {
        if (p.retarget == p.trigger)
            throw RegimeError("intervention scan: a retarget equal to the trigger re-fires on "
                              "every grid step, so the intervention rate grows without bound "
                              "and the policy is inadmissible");
        p.validate();
    }
    detail::check_policies(model, policies);

    std::vector<InterventionStats> out;
    out.reserve(dts.size());
    for (std::size_t k = 0; k < dts.size(); ++k) {
        const double dt = dts[k];
        if (!(dt > 0.0)) throw InputError("intervention scan: step sizes must be positive");
        const std::uint64_t master = splitmix64(seed ^ (kStreamSalt * (k + 1)));

        std::array<std::vector<double>, 2> counts;
        counts[0].assign(n_paths, 0.0);
        counts[1].assign(n_paths, 0.0);
        std::size_t exits = 0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            std::mt19937_64 rng(path_seed(master, i));
            bool exited = false;
            double exit_time = 0.0;
            detail::simulate_core(
                model, policies, x0, horizon, dt, rng, &exited, &exit_time,
                [](double, const std::array<double, 2>&) {},
                [&](const ImpulseEvent& ev) { counts[ev.player][i] += 1.0; });
            if (exited) ++exits;
        }

        InterventionStats st;
        st.dt = dt;
        for (int pl = 0; pl < 2; ++pl) {
            const MeanSE ms = mean_se(counts[pl]);
            st.mean_count[pl] = ms.mean;
            st.se_count[pl] = ms.se;
        }
        st.exit_fraction = double(exits) / double(n_paths);
        out.push_back(st);
    }
    return out;
}

SingularPair singular_representation(const ImpulseSequence& seq, double lambda, double kappa) {
    if (!(lambda > 0.0))
        throw InputError("singular representation: the proportional cost must be positive so "
                         "the fixed charge can be folded into the monotone pair");
    if (!(kappa >= 0.0)) throw InputError("singular representation: the fixed cost is negative");
    if (seq.times.size() != seq.sizes.size())
        throw InputError("singular representation: times and sizes differ in length");

    const std::size_t m = seq.times.size();
    SingularPair out;
    out.times = seq.times;
    out.nu_plus.resize(m);
    out.nu_minus.resize(m);

    const double half = kappa / (2.0 * lambda);
    double np = 0.0, nm = 0.0, direct = 0.0;
    double prev_t = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        const double t = seq.times[i];
        if (t < prev_t)
            throw InputError("singular representation: impulse times must be nondecreasing");
        prev_t = t;
        const double z = seq.sizes[i];
        np += std::max(z, 0.0) + half;
        nm += std::max(-z, 0.0) + half;
        out.nu_plus[i] = np;
        out.nu_minus[i] = nm;
        direct += lambda * std::fabs(z) + kappa;
    }
    out.cost_direct = direct;
    out.cost_singular = lambda * (np + nm);
    return out;
}

// --- dense QVI residual scans ---------------------------------------------

namespace {

CandidateFunction strip_derivatives(CandidateFunction f) {
    f.dt = {};
    f.dx = {};
    f.dxx = {};
    f.used_fd = true;
    return f;
}

double lerp_at(double lo, double hi, int i, int n) {
    return n <= 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
}

void track(RegionScan& rs, const std::array<double, 2>& x, double r) {
    ++rs.n_points;
    if (r > rs.max_residual) {
        rs.max_residual = r;
        rs.worst_x = x;
    }
}

} // namespace

ScanReport scan_zero_sum(const ZeroSumSolution& s, const ScanOptions& opt) {
    const ZeroSumProblem& p = s.problem;
    CandidateFunction cand = zero_sum_candidate(s);
    if (opt.finite_difference) cand = strip_derivatives(std::move(cand));
    const ModelSpec model = zero_sum_model(p);
    const RunningTerm no_running{};
    const InterventionQuery q_sup = zero_sum_sup_query(p, opt.t);
    const InterventionQuery q_inf = zero_sum_inf_query(p, opt.t);

    const int n = std::max(2, opt.points_per_region);
    // Finite-difference stencils straddle the pasting kink when probes sit
    // closer to the free boundary than the stencil width.
    const double margin = (opt.finite_difference ? 1e-3 : 1e-5) * s.x_tilde;

    ScanReport rep;
    RegionScan cont, act, slack;
    cont.label = "I3";
    act.label = "I1";
    slack.label = "I2";
    std::size_t ambiguous = 0;

    auto visit = [&](double x, bool expect_action) {
        const std::array<double, 2> pt{x, 0.0};
        const ZeroSumResidual r =
            qvi_residual_zero_sum(cand, model, no_running, q_sup, q_inf, opt.t, pt);
        const double v = cand(opt.t, pt);
        const double band = opt.tolerance * (1.0 + std::fabs(v));

        if (expect_action)
            track(act, pt, std::fabs(r.residual));
        else
            track(cont, pt, std::fabs(r.residual));

        // Minimizer side of the system: its obstacle must stay nonpositive;
        // any positive excursion is a violation regardless of region.
        if (r.p2_feasible) track(slack, pt, std::max(0.0, r.obstacle_p2));
        if (r.p1_feasible && r.obstacle_p1 < -band) rep.dominance_ok = false;
        if (r.p2_feasible && r.obstacle_p2 > band) rep.dominance_ok = false;

        const RegionClass cls = classify_region(r, v, opt.tolerance);
        const Region expect = expect_action ? Region::P1Intervention : Region::Continuation;
        if (cls.ambiguous)
            ++ambiguous;
        else if (cls.region != expect)
            rep.bindings_ok = false;
    };

    for (int i = 0; i < n; ++i) visit(lerp_at(1e-3 * s.x_tilde, s.x_tilde - margin, i, n), false);
    for (int i = 0; i < n; ++i) visit(lerp_at(s.x_tilde + margin, 1.5 * s.x_bar, i, n), true);

    // Free-boundary neighbourhoods classify as ambiguous by construction;
    // anything beyond a sliver of the grid means the map is wrong.
    if (ambiguous * 5 > std::size_t(2 * n)) rep.bindings_ok = false;

    rep.regions = {cont, act, slack};
    rep.max_residual = std::max({cont.max_residual, act.max_residual, slack.max_residual});
    rep.notes.push_back("minimizer obstacle strictly slack on the scanned range; its action "
                        "region is empty for this candidate");
    if (ambiguous > 0)
        rep.notes.push_back("ambiguous classifications: " + std::to_string(ambiguous) +
                            " grid points adjacent to the free boundaries");
    return rep;
}

ScanReport scan_duopoly(const DuopolySolution& s, const ScanOptions& opt) {
    const DuopolyProblem& p = s.problem;
    std::array<CandidateFunction, 2> values = build_firm_values(s);
    if (opt.finite_difference)
        for (auto& v : values) v = strip_derivatives(std::move(v));
    const ModelSpec model = duopoly_model(p);

    std::array<InterventionQuery, 2> q{duopoly_query(p, 0, opt.t), duopoly_query(p, 1, opt.t)};
    std::array<RunningTerm, 2> running;
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        running[i] = [&p, i, j](double t, const std::array<double, 2>& x) {
            return std::exp(-p.epsilon * t) * (p.alpha[i] * x[i] - p.beta[i] * x[j]);
        };
    }

    const int k = std::max(2, int(std::ceil(std::sqrt(double(opt.points_per_region)))));
    const std::array<double, 2> w{s.x_hat[0] - s.x_star[0], s.x_hat[1] - s.x_star[1]};
    // The obstacle vanishes quadratically at the trigger, so continuation
    // probes must clear the layer where it still sits inside the binding
    // tolerance band (which scales with the candidate's magnitude); the
    // wider FD margin also keeps stencils off the kink.
    const double margin = opt.finite_difference ? 0.2 : 0.02;

    ScanReport rep;
    RegionScan joint, act1, act2;
    joint.label = "I3";
    act1.label = "I1";
    act2.label = "I2";
    std::size_t ambiguous = 0;

    auto probe = [&](int i, const std::array<double, 2>& x) {
        return qvi_residual_nonzero_sum(values[i], model, running[i], q[i], opt.t, x);
    };
    auto dominance = [&](const std::array<double, 2>& x, const ObstacleResidual& r, int i) {
        const double band = opt.tolerance * (1.0 + std::fabs(values[i](opt.t, x)));
        if (r.feasible && r.obstacle > band) rep.dominance_ok = false;
    };
    auto classify_at = [&](const std::array<double, 2>& x, const ObstacleResidual& r1,
                           const ObstacleResidual& r2, Region expect) {
        const RegionClass cls =
            classify_region(r1, r2, values[0](opt.t, x), values[1](opt.t, x), opt.tolerance);
        if (cls.ambiguous)
            ++ambiguous;
        else if (cls.region != expect)
            rep.bindings_ok = false;
    };

    // Joint continuation: both firms' full residuals vanish. The lattice
    // stops half a band width above the retargets; far beyond the band the
    // growing characteristic exponential turns the analytic cancellation
    // inside the generator into raw floating-point noise.
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            const std::array<double, 2> x{
                lerp_at(s.x_star[0] + margin * w[0], s.x_hat[0] + 0.5 * w[0], a, k),
                lerp_at(s.x_star[1] + margin * w[1], s.x_hat[1] + 0.5 * w[1], b, k)};
            const ObstacleResidual r1 = probe(0, x);
            const ObstacleResidual r2 = probe(1, x);
            track(joint, x, std::max(std::fabs(r1.residual), std::fabs(r2.residual)));
            dominance(x, r1, 0);
            dominance(x, r2, 1);
            classify_at(x, r1, r2, Region::Continuation);
        }
    }

    // Own action regions, rival strictly continuing: the acting firm's
    // obstacle binds and its PDE term stays nonpositive, so its full
    // residual vanishes. With the rival also below its trigger the state is
    // instantaneous and the clamped candidate owes no PDE inequality, so
    // those points are excluded.
    for (int side = 0; side < 2; ++side) {
        const int i = side, j = 1 - side;
        RegionScan& row = side == 0 ? act1 : act2;
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                std::array<double, 2> x{};
                x[i] = lerp_at(s.x_star[i] - 2.0 * w[i], s.x_star[i] - margin * w[i], a, k);
                x[j] = lerp_at(s.x_star[j] + margin * w[j], s.x_hat[j] + 0.5 * w[j], b, k);
                const ObstacleResidual r_own = probe(i, x);
                const ObstacleResidual r_riv = probe(j, x);
                track(row, x, std::fabs(r_own.residual));
                dominance(x, r_own, i);
                dominance(x, r_riv, j);
                const ObstacleResidual& r1 = i == 0 ? r_own : r_riv;
                const ObstacleResidual& r2 = i == 0 ? r_riv : r_own;
                classify_at(x, r1, r2, i == 0 ? Region::P1Intervention : Region::P2Intervention);
            }
        }
    }

    if (ambiguous * 5 > std::size_t(3 * k * k)) rep.bindings_ok = false;

    rep.regions = {joint, act1, act2};
    rep.max_residual =
        std::max({joint.max_residual, act1.max_residual, act2.max_residual});
    rep.notes.push_back("rival PDE terms are unconstrained off the joint continuation region; "
                        "only operator dominance is checked there");
    if (ambiguous > 0)
        rep.notes.push_back("ambiguous classifications: " + std::to_string(ambiguous) +
                            " grid points adjacent to the triggers");
    return rep;
}

void write_region_map(std::ostream& os, const ZeroSumSolution& s, double lo, double hi, int n,
                      const ScanOptions& opt) {
    if (n < 2) throw InputError("region map: at least two grid points are required");
    CandidateFunction cand = zero_sum_candidate(s);
    if (opt.finite_difference) cand = strip_derivatives(std::move(cand));
    const ModelSpec model = zero_sum_model(s.problem);
    const RunningTerm no_running{};
    const InterventionQuery q_sup = zero_sum_sup_query(s.problem, opt.t);
    const InterventionQuery q_inf = zero_sum_inf_query(s.problem, opt.t);

    os << "x,residual,branch,label\n";
    for (int i = 0; i < n; ++i) {
        const double x = lerp_at(lo, hi, i, n);
        const std::array<double, 2> pt{x, 0.0};
        const ZeroSumResidual r =
            qvi_residual_zero_sum(cand, model, no_running, q_sup, q_inf, opt.t, pt);
        const RegionClass cls = classify_region(r, cand(opt.t, pt), opt.tolerance);
        os << x << ',' << r.residual << ',' << branch_label(r.branch) << ','
           << region_label(cls.region) << '\n';
    }
}

void write_region_map(std::ostream& os, const DuopolySolution& s, double lo, double hi, int n,
                      const ScanOptions& opt) {
    if (n < 2) throw InputError("region map: at least two grid points are required");
    std::array<CandidateFunction, 2> values = build_firm_values(s);
    if (opt.finite_difference)
        for (auto& v : values) v = strip_derivatives(std::move(v));
    const ModelSpec model = duopoly_model(s.problem);
    const DuopolyProblem& p = s.problem;

    std::array<InterventionQuery, 2> q{duopoly_query(p, 0, opt.t), duopoly_query(p, 1, opt.t)};
    std::array<RunningTerm, 2> running;
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        running[i] = [&p, i, j](double t, const std::array<double, 2>& x) {
            return std::exp(-p.epsilon * t) * (p.alpha[i] * x[i] - p.beta[i] * x[j]);
        };
    }

    os << "x1,x2,residual,branch,label\n";
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const std::array<double, 2> x{lerp_at(lo, hi, a, n), lerp_at(lo, hi, b, n)};
            const ObstacleResidual r1 =
                qvi_residual_nonzero_sum(values[0], model, running[0], q[0], opt.t, x);
            const ObstacleResidual r2 =
                qvi_residual_nonzero_sum(values[1], model, running[1], q[1], opt.t, x);
            const RegionClass cls =
                classify_region(r1, r2, values[0](opt.t, x), values[1](opt.t, x), opt.tolerance);
            // Region-appropriate defect: binding obstacles inside the action
            // regions, the larger full residual on joint continuation.
            double defect = std::max(std::fabs(r1.residual), std::fabs(r2.residual));
            if (cls.region == Region::P1Intervention)
                defect = std::fabs(r1.obstacle);
            else if (cls.region == Region::P2Intervention)
                defect = std::fabs(r2.obstacle);
            os << x[0] << ',' << x[1] << ',' << defect << ','
               << (r1.pde_branch ? "pde" : "obstacle") << ',' << region_label(cls.region)
               << '\n';
        }
    }
}

} // namespace igs
