#ifndef SPR3_VERIFY_HPP
#define SPR3_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "spr3/bounds.hpp"
#include "spr3/errors.hpp"
#include "spr3/fk_gradient.hpp"
#include "spr3/geometry.hpp"

namespace spr3::verify {

/// Runs fn(i) for i in [0, n) on a few threads. fn must only write to slot i
/// of caller-owned storage, so aggregation order is independent of scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned threads = 0) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline WorkspaceConfig sample_pose(std::mt19937_64& rng, const WorkspaceBox& box) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double z = box.z_min + (box.z_max - box.z_min) * unit(rng);
    const double a = box.alpha_max * (2.0 * unit(rng) - 1.0);
    const double b = box.beta_max * (2.0 * unit(rng) - 1.0);
    return {z, a, b};
}

struct SweepCounts {
    std::size_t oracle = 1000;
    std::size_t lemma = 10000;      // Lemmas 1, 3, 4 and the held-out Lemma 2 check
    std::size_t gradient = 1000;    // finite-difference gradient check
    std::size_t expansion = 1000;   // Lemma 5 identity
    std::size_t theorem = 500;      // gradient-solver runs
    std::size_t lipschitz = 10000;  // Monte Carlo samples for L1, L2

    static SweepCounts all(std::size_t n) { return {n, n, n, n, n, n}; }
};

/// Tolerances pinned for the sweeps.
struct Tolerances {
    double oracle_xy_mm = 1e-8;
    double oracle_gamma_rad = 1e-10;
    double residual_mm = 1e-8;
    double lemma_slack_mm = 1e-12;
    double unit_slack = 1e-15;
    double gradient_rel = 1e-6;
    double expansion_rel = 1e-9;
    double envelope_rel = 1e-12;
};

struct VerifyOptions {
    std::uint64_t seed = 2024;
    SweepCounts counts;
    Tolerances tol;
    WorkspaceBox box;
    double state_offset = 10.0;  // |Z_hat - Z| range for random gradient-solver states, mm
    double eta = 0.08;
    int theorem_iters = 30;
    int baseline_iters = 6;
    unsigned threads = 0;
};

struct Violation {
    std::size_t index = 0;
    WorkspaceConfig pose;
    double z_hat = 0.0;
    std::string detail;
};

struct CheckStats {
    std::string name;
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::size_t skipped = 0;  // states where the check is undefined (e.g. infeasible arccos)
    double worst = -std::numeric_limits<double>::infinity();  // largest (lhs - rhs) style margin
    std::size_t worst_index = 0;
    std::vector<Violation> first_violations;  // at most 10

    bool passed() const { return violations == 0; }
};

struct OracleStats {
    double max_dx_mm = 0.0;
    double max_dy_mm = 0.0;
    double max_dgamma_rad = 0.0;
    double max_residual_mm = 0.0;
};

struct TheoremStats {
    std::size_t runs = 0;
    double max_error_over_envelope = 0.0;
    double max_c2_over_c1 = 0.0;
    double max_delta = 0.0;
    double max_c1 = 0.0;
    double median_error_n30 = 0.0;
    double median_error_n6 = 0.0;
    double max_error_n30 = 0.0;
    std::size_t step_condition_failures = 0;  // runs with eta >= 1/c1; envelope still evaluated
    std::size_t mirrored_pitch_root = 0;      // runs where the pitch estimator takes the other root
};

struct Report {
    std::uint64_t seed = 0;
    ManipulatorGeometry geometry;
    SweepCounts counts;
    std::vector<std::string> precondition_failures;
    std::vector<CheckStats> checks;
    std::optional<OracleStats> oracle;
    std::optional<bounds::LipschitzEstimate> lipschitz;
    std::optional<double> rho;
    std::optional<TheoremStats> theorem;

    bool passed() const {
        if (!precondition_failures.empty()) return false;
        return std::all_of(checks.begin(), checks.end(),
                           [](const CheckStats& c) { return c.passed(); });
    }
    const CheckStats* find(const std::string& name) const {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

namespace detail {

struct Outcome {
    bool evaluated = false;
    bool violated = false;
    double margin = -std::numeric_limits<double>::infinity();
    WorkspaceConfig pose;
    double z_hat = 0.0;
    std::string detail;
};

inline CheckStats reduce(const std::string& name, const std::vector<Outcome>& out) {
    CheckStats s;
    s.name = name;
    s.samples = out.size();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Outcome& o = out[i];
        if (!o.evaluated) {
            ++s.skipped;
            continue;
        }
        if (o.margin > s.worst) {
            s.worst = o.margin;
            s.worst_index = i;
        }
        if (o.violated) {
            ++s.violations;
            if (s.first_violations.size() < 10) {
                s.first_violations.push_back({i, o.pose, o.z_hat, o.detail});
            }
        }
    }
    return s;
}

/// A random gradient-solver state: true pose, measured lengths, an assumed heave and
/// the rotation the iteration would build there.
struct State {
    FullPose truth;
    JointLengths theta;
    double z_hat = 0.0;
    GradientStep<double> step;
    bool clamped = false;
};

inline State make_state(const ManipulatorGeometry& g, const VerifyOptions& opt,
                        std::uint64_t stream, std::size_t i) {
    auto rng = bounds::indexed_rng(opt.seed, stream, i);
    const WorkspaceConfig c = sample_pose(rng, opt.box);
    std::uniform_real_distribution<double> off(-opt.state_offset, opt.state_offset);
    State s;
    s.truth = full_pose(g, c);
    s.theta = spr3::detail::limb_lengths(g, s.truth.translation, s.truth.rotation);
    s.z_hat = c.z + off(rng);
    FkSettings fs;
    fs.clamp_infeasible = true;
    fs.eta = opt.eta;
    s.step = gradient_step(g, s.theta, s.z_hat, fs);
    s.clamped = s.step.clamp_events > 0;
    return s;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline std::vector<std::string> preconditions(const ManipulatorGeometry& g,
                                              const VerifyOptions& opt) {
    std::vector<std::string> f;
    if (!std::isfinite(g.d1) || !(g.d1 > 0.0)) f.push_back("d1 must be finite and > 0");
    if (!std::isfinite(g.d2) || !(g.d2 > 0.0)) f.push_back("d2 must be finite and > 0");
    if (!std::isfinite(g.d3) || !(g.d3 > 0.0)) f.push_back("d3 must be finite and > 0");
    if (!(opt.eta > 0.0)) f.push_back("eta must be > 0");
    if (opt.theorem_iters < 1 || opt.baseline_iters < 1) f.push_back("iteration counts must be >= 1");
    if (!(opt.box.z_max >= opt.box.z_min) || opt.box.alpha_max < 0.0 || opt.box.beta_max < 0.0) {
        f.push_back("invalid workspace box");
    }
    return f;
}

/// Closed-form parasitic motions against the constraint oracle.
inline CheckStats check_oracle(const ManipulatorGeometry& g, const VerifyOptions& opt,
                               OracleStats& stats) {
    const std::size_t n = opt.counts.oracle;
    std::vector<detail::Outcome> out(n);
    std::vector<std::array<double, 4>> err(n, {0.0, 0.0, 0.0, 0.0});
    parallel_for(
        n,
        [&](std::size_t i) {
            auto rng = bounds::indexed_rng(opt.seed, 1, i);
            const WorkspaceConfig c = sample_pose(rng, opt.box);
            detail::Outcome& o = out[i];
            o.pose = c;
            o.evaluated = true;
            try {
                const ParasiticMotion closed = parasitic_motions(g, c);
                const ParasiticMotion ref = bounds::parasitic_constraint_oracle(g, c);
                const double dx = std::abs(closed.x - ref.x);
                const double dy = std::abs(closed.y - ref.y);
                const double dg = std::abs(closed.gamma - ref.gamma);
                const double res = bounds::max_abs(bounds::constraint_residuals(g, c, closed));
                err[i] = {dx, dy, dg, res};
                o.margin = std::max({dx / opt.tol.oracle_xy_mm, dy / opt.tol.oracle_xy_mm,
                                     dg / opt.tol.oracle_gamma_rad, res / opt.tol.residual_mm}) -
                           1.0;
                o.violated = o.margin > 0.0;
                if (o.violated) {
                    o.detail = "dx=" + std::to_string(dx) + " dy=" + std::to_string(dy) +
                               " dgamma=" + std::to_string(dg) + " residual=" + std::to_string(res);
                }
            } catch (const std::exception& e) {
                o.violated = true;
                o.margin = std::numeric_limits<double>::infinity();
                o.detail = e.what();
            }
        },
        opt.threads);
    for (const auto& e : err) {
        stats.max_dx_mm = std::max(stats.max_dx_mm, e[0]);
        stats.max_dy_mm = std::max(stats.max_dy_mm, e[1]);
        stats.max_dgamma_rad = std::max(stats.max_dgamma_rad, e[2]);
        stats.max_residual_mm = std::max(stats.max_residual_mm, e[3]);
    }
    return detail::reduce("parasitic_oracle", out);
}

/// Lemma 1, Lemma 3 and Lemma 4 over random poses and states.
inline std::vector<CheckStats> check_lemmas(const ManipulatorGeometry& g,
                                            const VerifyOptions& opt) {
    const std::size_t n = opt.counts.lemma;
    std::vector<detail::Outcome> l1(n), l3(n), l4(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            auto rng = bounds::indexed_rng(opt.seed, 2, i);
            const WorkspaceConfig c = sample_pose(rng, opt.box);
            {
                detail::Outcome& o = l1[i];
                o.pose = c;
                o.evaluated = true;
                try {
                    const auto r = bounds::lemma1_check(g, c);
                    o.margin = r.margin();
                    o.violated = o.margin > opt.tol.lemma_slack_mm;
                } catch (const std::exception& e) {
                    o.violated = true;
                    o.detail = e.what();
                }
            }
            try {
                const detail::State s = detail::make_state(g, opt, 3, i);
                double worst_unit = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    worst_unit = std::max(worst_unit,
                                          std::abs(dlt_dz(g, s.z_hat, s.step.rotation, k)));
                }
                l3[i] = {true, worst_unit > 1.0 + opt.tol.unit_slack, worst_unit - 1.0,
                         s.truth.config, s.z_hat, ""};
                const auto gb = bounds::gradient_bound_check(g, s.theta, s.z_hat, s.step.rotation);
                l4[i] = {true, gb.lhs > gb.rhs * (1.0 + 1e-12) + 1e-300, gb.lhs - gb.rhs,
                         s.truth.config, s.z_hat, ""};
            } catch (const std::exception& e) {
                l3[i] = {true, true, std::numeric_limits<double>::infinity(), c, 0.0, e.what()};
                l4[i] = l3[i];
            }
        },
        opt.threads);
    return {detail::reduce("lemma1_limb_mismatch", l1), detail::reduce("lemma3_unit_slope", l3),
            detail::reduce("lemma4_gradient_bound", l4)};
}

/// gradient_z against a central difference of Lambda_3 with R_hat held fixed.
inline CheckStats check_gradient(const ManipulatorGeometry& g, const VerifyOptions& opt) {
    const std::size_t n = opt.counts.gradient;
    std::vector<detail::Outcome> out(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            detail::Outcome& o = out[i];
            o.evaluated = true;
            try {
                const detail::State s = detail::make_state(g, opt, 4, i);
                o.pose = s.truth.config;
                o.z_hat = s.z_hat;
                // Curvature of Lambda_3 scales with 1 / l~_i, so the step shrinks with the shortest limb.
                const double shortest = std::min(
                    {s.step.lengths[0], s.step.lengths[1], s.step.lengths[2]});
                const double h = 1e-4 * std::min(1.0, shortest);
                auto cost = [&](double z) {
                    return cost_simplified(s.theta,
                                           inverse_kinematics_simplified(g, z, s.step.rotation));
                };
                const double fd = (cost(s.z_hat + h) - cost(s.z_hat - h)) / (2.0 * h);
                const double an = gradient_z(g, s.theta, s.z_hat, s.step.rotation);
                const double scale = std::max(std::abs(fd), std::abs(an));
                const double rel = scale > 0.0 ? std::abs(fd - an) / scale : 0.0;
                o.margin = rel - opt.tol.gradient_rel;
                o.violated = o.margin > 0.0;
                if (o.violated) {
                    o.detail = "analytic=" + std::to_string(an) + " fd=" + std::to_string(fd);
                }
            } catch (const std::exception& e) {
                o.violated = true;
                o.margin = std::numeric_limits<double>::infinity();
                o.detail = e.what();
            }
        },
        opt.threads);
    return detail::reduce("gradient_finite_difference", out);
}

/// Lemma 5: the epsilon expansion reproduces gradient_z.
inline CheckStats check_expansion(const ManipulatorGeometry& g, const VerifyOptions& opt) {
    const std::size_t n = opt.counts.expansion;
    std::vector<detail::Outcome> out(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            detail::Outcome& o = out[i];
            o.evaluated = true;
            try {
                const detail::State s = detail::make_state(g, opt, 5, i);
                o.pose = s.truth.config;
                o.z_hat = s.z_hat;
                const double expanded =
                    bounds::gradient_expansion(g, s.truth, s.step.rotation, s.z_hat);
                const double grad = gradient_z(g, s.theta, s.z_hat, s.step.rotation);
                double scale = std::abs(grad);
                for (std::size_t k = 0; k < 3; ++k) {
                    scale = std::max(scale, std::abs((s.step.lengths[k] - s.theta[k]) *
                                                     dlt_dz(g, s.z_hat, s.step.rotation, k)));
                }
                const double rel = scale > 0.0 ? std::abs(expanded - grad) / scale : 0.0;
                o.margin = rel - opt.tol.expansion_rel;
                o.violated = o.margin > 0.0;
                if (o.violated) {
                    o.detail = "expansion=" + std::to_string(expanded) +
                               " gradient=" + std::to_string(grad);
                }
            } catch (const std::exception& e) {
                o.violated = true;
                o.margin = std::numeric_limits<double>::infinity();
                o.detail = e.what();
            }
        },
        opt.threads);
    return detail::reduce("lemma5_expansion", out);
}

/// Sampling region for the Lipschitz constants: the workspace box, the
/// parasitic radius rho, and a heave window covering the state offsets.
inline bounds::LipschitzRegion lipschitz_region(const WorkspaceBox& box, double rho,
                                                double z_window) {
    bounds::LipschitzRegion r;
    r.z_min = box.z_min;
    r.z_max = box.z_max;
    r.alpha_min = -box.alpha_max;
    r.alpha_max = box.alpha_max;
    r.beta_min = -box.beta_max;
    r.beta_max = box.beta_max;
    r.rho = rho;
    r.z_window = z_window;
    return r;
}

/// Held-out Lemma 2 check on random states, with sampled L1, L2.
inline CheckStats check_lemma2_states(const ManipulatorGeometry& g, const VerifyOptions& opt,
                                      const bounds::LipschitzEstimate& lip) {
    const std::size_t n = opt.counts.lemma;
    std::vector<detail::Outcome> out(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            detail::Outcome& o = out[i];
            try {
                const detail::State s = detail::make_state(g, opt, 6, i);
                o.pose = s.truth.config;
                o.z_hat = s.z_hat;
                // Outside Lemma 2's premise: the estimator is undefined there, or its
                // pitch root is the mirrored one so beta != Psi_2(X, Y, Z).
                if (s.clamped || s.step.roll_degenerate ||
                    !bounds::pitch_root_matches(g, s.truth)) {
                    return;
                }
                o.evaluated = true;
                const auto r = bounds::lemma2_check(s.truth, s.step.alpha, s.step.beta, s.z_hat,
                                                    lip.l1, lip.l2);
                o.margin = std::max(r.roll_error - r.roll_bound, r.pitch_error - r.pitch_bound);
                o.violated = !r.holds();
                if (o.violated) {
                    o.detail = "roll " + std::to_string(r.roll_error) + " > " +
                               std::to_string(r.roll_bound) + " or pitch " +
                               std::to_string(r.pitch_error) + " > " +
                               std::to_string(r.pitch_bound);
                }
            } catch (const std::exception& e) {
                o.evaluated = true;
                o.violated = true;
                o.margin = std::numeric_limits<double>::infinity();
                o.detail = e.what();
            }
        },
        opt.threads);
    return detail::reduce("lemma2_held_out", out);
}

/// gradient-solver runs: Theorem 1 envelope, Lemma 2 at the returned estimate and
/// the N = theorem_iters vs N = baseline_iters error comparison.
inline std::vector<CheckStats> check_theorem(const ManipulatorGeometry& g,
                                             const VerifyOptions& opt,
                                             const bounds::LipschitzEstimate& lip,
                                             TheoremStats& stats) {
    const std::size_t n = opt.counts.theorem;
    std::vector<detail::Outcome> env(n), l2(n);
    struct Extra {
        double ratio = 0, c2c1 = 0, delta = 0, c1 = 0, err_long = 0, err_short = 0;
        bool step_condition = true, mirrored = false;
    };
    std::vector<Extra> extra(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            auto rng = bounds::indexed_rng(opt.seed, 7, i);
            const WorkspaceConfig c = sample_pose(rng, opt.box);
            env[i].pose = c;
            env[i].evaluated = true;
            l2[i].pose = c;
            l2[i].evaluated = true;
            try {
                const FullPose truth = full_pose(g, c);
                const JointLengths theta =
                    spr3::detail::limb_lengths(g, truth.translation, truth.rotation);
                FkSettings s;
                s.eta = opt.eta;
                s.max_iters = opt.theorem_iters;
                s.clamp_infeasible = true;
                const FkSolution sol = solve_fk(g, theta, s);
                s.max_iters = opt.baseline_iters;
                const FkSolution base = solve_fk(g, theta, s);

                const bounds::TheoremBound tb =
                    bounds::theorem1_bound(g, truth, sol, opt.eta, false);
                extra[i].step_condition = tb.step_condition;
                extra[i].mirrored = !bounds::pitch_root_matches(g, truth);
                const double err = std::abs(sol.z_hat - c.z);
                const double envelope = tb.envelope();
                extra[i].ratio = err / envelope;
                extra[i].c2c1 = tb.ratio;
                extra[i].delta = tb.delta;
                extra[i].c1 = tb.c1;
                extra[i].err_long = err;
                extra[i].err_short = std::abs(base.z_hat - c.z);
                env[i].z_hat = sol.z_hat;
                env[i].margin = err - envelope;
                env[i].violated = err > envelope * (1.0 + opt.tol.envelope_rel);
                if (env[i].violated) {
                    env[i].detail = "error " + std::to_string(err) + " > envelope " +
                                    std::to_string(envelope);
                }

                const auto r =
                    bounds::lemma2_check(truth, sol.alpha_hat, sol.beta_hat, sol.z_hat, lip.l1, lip.l2);
                l2[i].z_hat = sol.z_hat;
                l2[i].margin = std::max(r.roll_error - r.roll_bound, r.pitch_error - r.pitch_bound);
                l2[i].violated = !r.holds();
                if (l2[i].violated) {
                    l2[i].detail = "roll " + std::to_string(r.roll_error) + " > " +
                                   std::to_string(r.roll_bound) + " or pitch " +
                                   std::to_string(r.pitch_error) + " > " +
                                   std::to_string(r.pitch_bound);
                }
            } catch (const std::exception& e) {
                env[i].violated = true;
                env[i].margin = std::numeric_limits<double>::infinity();
                env[i].detail = e.what();
                l2[i] = env[i];
            }
        },
        opt.threads);

    stats.runs = n;
    std::vector<double> e_long, e_short;
    for (const Extra& x : extra) {
        stats.max_error_over_envelope = std::max(stats.max_error_over_envelope, x.ratio);
        stats.max_c2_over_c1 = std::max(stats.max_c2_over_c1, x.c2c1);
        stats.max_delta = std::max(stats.max_delta, x.delta);
        stats.max_c1 = std::max(stats.max_c1, x.c1);
        stats.max_error_n30 = std::max(stats.max_error_n30, x.err_long);
        stats.step_condition_failures += x.step_condition ? 0 : 1;
        stats.mirrored_pitch_root += x.mirrored ? 1 : 0;
        e_long.push_back(x.err_long);
        e_short.push_back(x.err_short);
    }
    stats.median_error_n30 = detail::median(e_long);
    stats.median_error_n6 = detail::median(e_short);

    CheckStats median_check;
    median_check.name = "median_error_more_iterations";
    median_check.samples = n > 0 ? 1 : 0;
    if (n > 0) {
        median_check.worst = stats.median_error_n30 - stats.median_error_n6;
        if (median_check.worst > 0.0) {
            median_check.violations = 1;
            median_check.first_violations.push_back(
                {0, {}, 0.0,
                 "median |e| at N=" + std::to_string(opt.theorem_iters) + " exceeds N=" +
                     std::to_string(opt.baseline_iters)});
        }
    }
    return {detail::reduce("theorem1_envelope", env), detail::reduce("lemma2_algorithm", l2),
            median_check};
}

inline Report run(const ManipulatorGeometry& g, const VerifyOptions& opt) {
    Report rep;
    rep.seed = opt.seed;
    rep.geometry = g;
    rep.counts = opt.counts;
    rep.precondition_failures = preconditions(g, opt);
    if (!rep.precondition_failures.empty()) {
        return rep;
    }
    const SweepCounts& n = opt.counts;
    if (n.oracle > 0) {
        OracleStats os;
        rep.checks.push_back(check_oracle(g, opt, os));
        rep.oracle = os;
    }
    if (n.lemma > 0) {
        for (auto& c : check_lemmas(g, opt)) rep.checks.push_back(std::move(c));
    }
    if (n.gradient > 0) rep.checks.push_back(check_gradient(g, opt));
    if (n.expansion > 0) rep.checks.push_back(check_expansion(g, opt));

    if (n.lipschitz > 0) {
        bounds::LipschitzRegion whole = lipschitz_region(opt.box, 0.0, 0.0);
        rep.rho = bounds::parasitic_radius(g, whole, 20);
        const auto region = lipschitz_region(opt.box, *rep.rho, 2.0 * opt.state_offset);
        rep.lipschitz = bounds::lipschitz_estimate(g, region, n.lipschitz, opt.seed);
        if (n.lemma > 0) rep.checks.push_back(check_lemma2_states(g, opt, *rep.lipschitz));
    }
    if (n.theorem > 0) {
        TheoremStats ts;
        const bounds::LipschitzEstimate lip =
            rep.lipschitz ? *rep.lipschitz : bounds::LipschitzEstimate{};
        for (auto& c : check_theorem(g, opt, lip, ts)) {
            if (!rep.lipschitz && c.name == "lemma2_algorithm") continue;
            rep.checks.push_back(std::move(c));
        }
        rep.theorem = ts;
    }
    return rep;
}

inline nlohmann::ordered_json to_json(const Report& rep) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["seed"] = rep.seed;
    j["geometry"] = {{"d1", rep.geometry.d1}, {"d2", rep.geometry.d2}, {"d3", rep.geometry.d3}};
    j["counts"] = {{"oracle", rep.counts.oracle},       {"lemma", rep.counts.lemma},
                   {"gradient", rep.counts.gradient},   {"expansion", rep.counts.expansion},
                   {"theorem", rep.counts.theorem},     {"lipschitz", rep.counts.lipschitz}};
    j["precondition_failures"] = rep.precondition_failures;
    ordered_json checks = ordered_json::object();
    for (const CheckStats& c : rep.checks) {
        ordered_json cj;
        cj["samples"] = c.samples;
        cj["evaluated"] = c.samples - c.skipped;
        cj["passed"] = c.samples - c.skipped - c.violations;
        cj["violations"] = c.violations;
        if (std::isfinite(c.worst)) {
            cj["worst_margin"] = c.worst;
            cj["worst_index"] = c.worst_index;
        }
        if (!c.first_violations.empty()) {
            ordered_json vs = ordered_json::array();
            for (const Violation& v : c.first_violations) {
                vs.push_back({{"index", v.index},
                              {"z_mm", v.pose.z},
                              {"alpha_deg", rad_to_deg(v.pose.alpha)},
                              {"beta_deg", rad_to_deg(v.pose.beta)},
                              {"z_hat_mm", v.z_hat},
                              {"detail", v.detail}});
            }
            cj["violating"] = vs;
        }
        checks[c.name] = cj;
    }
    j["checks"] = checks;
    if (rep.oracle) {
        j["oracle"] = {{"max_dx_mm", rep.oracle->max_dx_mm},
                       {"max_dy_mm", rep.oracle->max_dy_mm},
                       {"max_dgamma_rad", rep.oracle->max_dgamma_rad},
                       {"max_residual_mm", rep.oracle->max_residual_mm}};
    }
    if (rep.lipschitz) {
        j["lipschitz"] = {{"L1_roll", rep.lipschitz->l1},
                          {"L2_pitch", rep.lipschitz->l2},
                          {"rho_mm", rep.rho.value_or(0.0)},
                          {"samples", rep.lipschitz->samples},
                          {"evaluated", rep.lipschitz->evaluated},
                          {"lower_bound_estimate", true}};
    }
    if (rep.theorem) {
        const TheoremStats& t = *rep.theorem;
        j["theorem1"] = {{"runs", t.runs},
                         {"max_error_over_envelope", t.max_error_over_envelope},
                         {"max_c2_over_c1", t.max_c2_over_c1},
                         {"max_delta", t.max_delta},
                         {"max_c1", t.max_c1},
                         {"median_error_n30_mm", t.median_error_n30},
                         {"median_error_n6_mm", t.median_error_n6},
                         {"max_error_n30_mm", t.max_error_n30},
                         {"step_condition_failures", t.step_condition_failures},
                         {"mirrored_pitch_root_runs", t.mirrored_pitch_root}};
    }
    j["passed"] = rep.passed();
    return j;
}

}  // namespace spr3::verify

#endif  // SPR3_VERIFY_HPP
