#ifndef SPR3_TRAJECTORY_HPP
#define SPR3_TRAJECTORY_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "spr3/errors.hpp"
#include "spr3/fk_gradient.hpp"
#include "spr3/fk_jacobian.hpp"
#include "spr3/geometry.hpp"

namespace spr3 {

/// Combined parabolic, ramp and sinusoidal test trajectory, evaluated verbatim.
///
///   Z(t) = (50 + 1.6t^2)(u(t) - u(t-2.5)) + (85 - 10t)(u(t-2.5) - u(t-5)) + 15 sin(pi t/2 - 3pi)  [mm]
///   alpha(t) = 0.4t (u(t) - u(t-5)) + 2 cos(0.4 pi t) u(t-5)                                   [deg]
///   beta(t) = (1 - 0.4t)(1 - u(t-2.5)) + sin(2 pi f t) u(t-5)                                  [deg]
///
/// u(t - tau) = 1 for t >= tau. The sine heave term is active over the whole run,
/// so Z leaves [0, 100] mm after t = 5 s.
struct TrajectorySpec {
    double duration = 20.0;     // s
    double sample_rate = 100.0;  // Hz
    double f_pitch = 0.2;       // Hz

    void validate() const {
        if (!(duration >= 0.0) || !std::isfinite(duration)) {
            throw KinematicsError(ErrorCode::InvalidArgument, "duration must be >= 0");
        }
        if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
            throw KinematicsError(ErrorCode::InvalidArgument, "sample rate must be > 0");
        }
        if (!std::isfinite(f_pitch)) {
            throw KinematicsError(ErrorCode::InvalidArgument, "f_pitch must be finite");
        }
    }

    std::size_t samples() const {
        return static_cast<std::size_t>(std::floor(duration * sample_rate + 1e-9)) + 1;
    }
    double time(std::size_t k) const { return static_cast<double>(k) / sample_rate; }

    static double step(double t, double tau) { return t >= tau ? 1.0 : 0.0; }

    double heave(double t) const {
        return (50.0 + 1.6 * t * t) * (step(t, 0.0) - step(t, 2.5)) +
               (85.0 - 10.0 * t) * (step(t, 2.5) - step(t, 5.0)) +
               15.0 * std::sin(std::numbers::pi / 2.0 * t - 3.0 * std::numbers::pi);
    }
    double roll_deg(double t) const {
        return 0.4 * t * (step(t, 0.0) - step(t, 5.0)) +
               2.0 * std::cos(0.4 * std::numbers::pi * t) * step(t, 5.0);
    }
    double pitch_deg(double t) const {
        return (-0.4 * t + 1.0) * (1.0 - step(t, 2.5)) +
               std::sin(2.0 * std::numbers::pi * f_pitch * t) * step(t, 5.0);
    }
    WorkspaceConfig config(double t) const {
        return {heave(t), deg_to_rad(roll_deg(t)), deg_to_rad(pitch_deg(t))};
    }
};

enum class Method { Gradient, Jacobian };

inline const char* to_string(Method m) { return m == Method::Gradient ? "gradient" : "jb"; }

struct RunRecord {
    std::size_t index = 0;
    double t = 0.0;
    WorkspaceConfig truth;
    Method method = Method::Gradient;
    WorkspaceConfig estimate;
    int iters = 0;
    double cost = 0.0;  // gradient: Lambda_3 at the estimate; jb: 1/2 |theta - Phi(estimate)|^2
    bool out_of_box = false;

    double err_z() const { return estimate.z - truth.z; }
    double err_alpha() const { return estimate.alpha - truth.alpha; }
    double err_beta() const { return estimate.beta - truth.beta; }
};

/// Solver error raised while processing a trajectory sample.
class SampleError : public KinematicsError {
public:
    SampleError(const KinematicsError& e, Method m, std::size_t sample, double t)
        : KinematicsError(e.code(), std::string(to_string(m)) + " failed at sample " +
                                        std::to_string(sample) + " (t = " + std::to_string(t) +
                                        " s): " + e.what()),
          sample_(sample) {}

    std::size_t sample() const noexcept { return sample_; }

private:
    std::size_t sample_;
};

struct TrajectoryOptions {
    FkSettings gradient;  // z_init is managed by the runner
    JbSettings jb;
    bool warm_start = true;  // gradient method starts each sample from the previous estimate
    WorkspaceBox box;

    TrajectoryOptions() { gradient.clamp_infeasible = true; }
};

struct TrajectoryRun {
    TrajectorySpec spec;
    std::vector<RunRecord> records;  // sample-major, gradient then jb
    int clamp_events = 0;            // gradient method, whole run
};

/// Runs both forward-kinematics methods along the trajectory.
///
/// The gradient method starts from the mean limb length and is warm-started
/// from its previous heave estimate. The JB method starts from the true
/// initial configuration and integrates J dTheta = theta_n - theta_{n-1}
/// with the measured lengths of the previous sample.
inline TrajectoryRun run_trajectory(const ManipulatorGeometry& g, const TrajectorySpec& spec,
                                    const TrajectoryOptions& opt = {}) {
    g.validate();
    spec.validate();
    opt.gradient.validate();
    opt.jb.validate();

    TrajectoryRun run;
    run.spec = spec;
    const std::size_t n = spec.samples();
    run.records.reserve(2 * n);

    std::optional<double> z_prev;
    WorkspaceConfig jb_config{};
    JointLengths jb_theta{};

    for (std::size_t k = 0; k < n; ++k) {
        const double t = spec.time(k);
        const WorkspaceConfig truth = spec.config(t);
        const bool out_of_box = !opt.box.contains(truth);
        JointLengths theta;
        try {
            theta = inverse_kinematics_exact(g, truth);
        } catch (const KinematicsError& e) {
            throw SampleError(e, Method::Gradient, k, t);
        }

        RunRecord grad;
        grad.index = k;
        grad.t = t;
        grad.truth = truth;
        grad.method = Method::Gradient;
        grad.out_of_box = out_of_box;
        try {
            FkSettings s = opt.gradient;
            s.z_init = opt.warm_start ? z_prev : std::nullopt;
            const FkSolution sol = solve_fk(g, theta, s);
            grad.estimate = sol.config();
            grad.iters = static_cast<int>(sol.trace.size());
            const Mat3<double> r = rotation_matrix(sol.alpha_hat, sol.beta_hat, sol.gamma_hat);
            grad.cost = cost_simplified(theta, inverse_kinematics_simplified(g, sol.z_hat, r));
            run.clamp_events += sol.clamp_events;
            z_prev = sol.z_hat;
        } catch (const KinematicsError& e) {
            throw SampleError(e, Method::Gradient, k, t);
        }
        run.records.push_back(grad);

        RunRecord jb;
        jb.index = k;
        jb.t = t;
        jb.truth = truth;
        jb.method = Method::Jacobian;
        jb.out_of_box = out_of_box;
        try {
            if (k == 0) {
                jb_config = truth;
                jb_theta = theta;
            }
            jb_config = solve_fk_jb(g, theta, jb_config, jb_theta, opt.jb);
            jb_theta = theta;
            jb.estimate = jb_config;
            jb.iters = opt.jb.iters_per_sample;
            jb.cost = cost_simplified(theta, inverse_kinematics_exact(g, jb_config));
        } catch (const KinematicsError& e) {
            throw SampleError(e, Method::Jacobian, k, t);
        }
        run.records.push_back(jb);
    }
    return run;
}

inline std::string csv_header() {
    return "t,Z_true,alpha_true_deg,beta_true_deg,method,Z_hat,alpha_hat_deg,beta_hat_deg,eZ,"
           "eAlpha_deg,eBeta_deg,iters,cost,out_of_box\n";
}

inline std::string csv_row(const RunRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%.4f,%.9f,%.9f,%.9f,%s,%.9f,%.9f,%.9f,%.6e,%.6e,%.6e,%d,%.6e,%d\n", r.t,
                  r.truth.z, rad_to_deg(r.truth.alpha), rad_to_deg(r.truth.beta),
                  to_string(r.method), r.estimate.z, rad_to_deg(r.estimate.alpha),
                  rad_to_deg(r.estimate.beta), r.err_z(), rad_to_deg(r.err_alpha()),
                  rad_to_deg(r.err_beta()), r.iters, r.cost, r.out_of_box ? 1 : 0);
    return buf;
}

inline std::string to_csv(const TrajectoryRun& run) {
    std::string out = csv_header();
    for (const RunRecord& r : run.records) {
        out += csv_row(r);
    }
    return out;
}

struct ChannelStats {
    double rms = 0.0;
    double max_abs = 0.0;
};

struct MethodSummary {
    ChannelStats z;      // mm
    ChannelStats alpha;  // rad
    ChannelStats beta;   // rad
    double early_z_rms = 0.0;  // heave RMS over t < 5 s (parabola and ramp)
    std::size_t samples = 0;
};

struct TrajectorySummary {
    MethodSummary gradient;
    MethodSummary jb;
    double early_heave_range = 0.0;  // max - min of true Z over t < 5 s
    std::size_t out_of_box = 0;
    int clamp_events = 0;
};

inline TrajectorySummary summarize(const TrajectoryRun& run, double early_until = 5.0) {
    TrajectorySummary s;
    s.clamp_events = run.clamp_events;
    double zmin = 0.0, zmax = 0.0;
    bool any_early = false;
    struct Acc {
        double z = 0, a = 0, b = 0, ez = 0;
        std::size_t n = 0, ne = 0;
    } acc[2];
    MethodSummary* out[2] = {&s.gradient, &s.jb};

    for (const RunRecord& r : run.records) {
        const int m = r.method == Method::Gradient ? 0 : 1;
        Acc& a = acc[m];
        MethodSummary& ms = *out[m];
        const double ez = r.err_z(), ea = r.err_alpha(), eb = r.err_beta();
        a.z += ez * ez;
        a.a += ea * ea;
        a.b += eb * eb;
        ++a.n;
        ms.z.max_abs = std::max(ms.z.max_abs, std::abs(ez));
        ms.alpha.max_abs = std::max(ms.alpha.max_abs, std::abs(ea));
        ms.beta.max_abs = std::max(ms.beta.max_abs, std::abs(eb));
        if (r.t < early_until) {
            a.ez += ez * ez;
            ++a.ne;
            if (m == 0) {
                zmin = any_early ? std::min(zmin, r.truth.z) : r.truth.z;
                zmax = any_early ? std::max(zmax, r.truth.z) : r.truth.z;
                any_early = true;
            }
        }
        if (m == 0 && r.out_of_box) {
            ++s.out_of_box;
        }
    }
    for (int m = 0; m < 2; ++m) {
        MethodSummary& ms = *out[m];
        const Acc& a = acc[m];
        ms.samples = a.n;
        if (a.n > 0) {
            ms.z.rms = std::sqrt(a.z / a.n);
            ms.alpha.rms = std::sqrt(a.a / a.n);
            ms.beta.rms = std::sqrt(a.b / a.n);
        }
        if (a.ne > 0) {
            ms.early_z_rms = std::sqrt(a.ez / a.ne);
        }
    }
    s.early_heave_range = zmax - zmin;
    return s;
}

inline nlohmann::ordered_json to_json(const MethodSummary& m) {
    return {{"samples", m.samples},
            {"rms_z_mm", m.z.rms},
            {"max_z_mm", m.z.max_abs},
            {"rms_alpha_deg", rad_to_deg(m.alpha.rms)},
            {"max_alpha_deg", rad_to_deg(m.alpha.max_abs)},
            {"rms_beta_deg", rad_to_deg(m.beta.rms)},
            {"max_beta_deg", rad_to_deg(m.beta.max_abs)},
            {"rms_z_early_mm", m.early_z_rms}};
}

inline nlohmann::ordered_json to_json(const TrajectorySpec& spec, const TrajectorySummary& s) {
    nlohmann::ordered_json j;
    j["duration_s"] = spec.duration;
    j["sample_rate_hz"] = spec.sample_rate;
    j["f_pitch_hz"] = spec.f_pitch;
    j["samples"] = spec.samples();
    j["gradient"] = to_json(s.gradient);
    j["jb"] = to_json(s.jb);
    j["early_heave_range_mm"] = s.early_heave_range;
    j["out_of_box_samples"] = s.out_of_box;
    j["gradient_clamp_events"] = s.clamp_events;
    return j;
}

}  // namespace spr3

#endif  // SPR3_TRAJECTORY_HPP
