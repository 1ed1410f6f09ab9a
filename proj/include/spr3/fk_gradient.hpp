#ifndef SPR3_FK_GRADIENT_HPP
#define SPR3_FK_GRADIENT_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spr3/errors.hpp"
#include "spr3/geometry.hpp"
#include "spr3/linalg.hpp"
#include "spr3/scalar.hpp"

namespace spr3 {

/// Arguments of arcsin/arccos this close outside [-1, 1] are treated as rounding noise.
inline constexpr double kArgumentSlack = 1e-9;

struct FkSettings {
    double eta = 0.08;
    int max_iters = 6;
    /// Initial heave; mean limb length when empty.
    std::optional<double> z_init;
    /// Insert the closed-form yaw at (alpha_hat, beta_hat) into R_hat.
    bool include_gamma_hat = true;
    /// Clamp infeasible arccos arguments instead of throwing InfeasibleJointLength.
    bool clamp_infeasible = false;
    /// Stop once |Z_{k+1} - Z_k| < early_exit_tol.
    bool early_exit = false;
    double early_exit_tol = 1e-9;

    void validate() const {
        if (!(eta > 0.0) || !std::isfinite(eta)) {
            throw KinematicsError(ErrorCode::InvalidArgument, "eta must be > 0");
        }
        if (max_iters < 1) {
            throw KinematicsError(ErrorCode::InvalidArgument, "max_iters must be >= 1");
        }
        if (z_init && !std::isfinite(*z_init)) {
            throw KinematicsError(ErrorCode::InvalidArgument, "z_init must be finite");
        }
    }
};

struct IterationRecord {
    int k = 0;
    double z = 0.0;       // heave at which the angles were estimated
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double cost = 0.0;    // 1/2 sum (l_i - l~_i)^2 at z
    double gradient = 0.0;
    double z_next = 0.0;  // heave after the update
    bool roll_degenerate = false;
};

struct FkSolution {
    double z_hat = 0.0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double gamma_hat = 0.0;
    double z_init = 0.0;
    std::vector<IterationRecord> trace;
    double converged_step_norm = 0.0;  // |Z_N - Z_{N-1}|
    int clamp_events = 0;
    bool roll_degenerate = false;

    WorkspaceConfig config() const { return {z_hat, alpha_hat, beta_hat}; }
};

namespace detail {

template <typename T>
struct Clamped {
    T value;
    bool clamped = false;
};

template <typename T>
Clamped<T> guard_unit_argument(T x, bool clamp_infeasible, const char* what) {
    const double v = value_of(x);
    if (v >= -1.0 && v <= 1.0) {
        return {x, false};
    }
    const bool noise = std::abs(v) <= 1.0 + kArgumentSlack;
    if (!noise && !clamp_infeasible) {
        throw KinematicsError(ErrorCode::InfeasibleJointLength,
                              std::string(what) + " argument " + std::to_string(v) +
                                  " outside [-1, 1]");
    }
    return {T(v > 0.0 ? 1.0 : -1.0), !noise};
}

template <typename T>
Clamped<T> pitch_estimate(const ManipulatorGeometry& g, T l1, T z_hat, bool clamp_infeasible) {
    using std::acos;
    using std::asin;
    using std::sqrt;
    const T a = T(g.d1);
    const T two_a = T(2.0) * a;
    const T two_a2 = two_a * a;
    const T two_az = two_a * z_hat;
    const T h = sqrt(two_a2 * two_a2 + two_az * two_az);
    const T lambda = asin(two_az / h);
    const auto arg = guard_unit_argument((two_a2 + z_hat * z_hat - l1 * l1) / h,
                                         clamp_infeasible, "pitch arccos");
    return {lambda - acos(arg.value), arg.clamped};
}

}  // namespace detail

/// Pitch from the front limb length at an assumed heave, neglecting X and Y.
///
/// beta = lambda - omega, lambda = asin(2aZ / h), omega = acos((2a^2 + Z^2 - l1^2) / h),
/// h = sqrt((2a^2)^2 + (2aZ)^2). The minus branch gives zero pitch at zero heave.
template <typename T>
T estimate_pitch(const ManipulatorGeometry& g, T l1, T z_hat) {
    return detail::pitch_estimate(g, l1, z_hat, false).value;
}

template <typename T>
struct RollEstimate {
    T alpha{};
    bool degenerate = false;  // |Z cos b + d2 sin b| < 1e-9 mm, alpha forced to 0
    bool clamped = false;
};

namespace detail {

template <typename T>
RollEstimate<T> roll_estimate(const ManipulatorGeometry& g, T l2, T l3, T z_hat, T beta_hat,
                              bool clamp_infeasible) {
    using std::acos;
    using std::cos;
    using std::sin;
    const T lever = z_hat * cos(beta_hat) + T(g.d2) * sin(beta_hat);
    if (std::abs(value_of(lever)) < 1e-9) {
        return {T(0.0), true, false};
    }
    const T q = (l2 * l2 - l3 * l3) / T(4.0 * g.d3);
    const auto arg = guard_unit_argument(q / lever, clamp_infeasible, "roll arccos");
    const T kappa = acos(arg.value);
    return {T(std::numbers::pi / 2.0) - kappa, false, arg.clamped};
}

}  // namespace detail

/// Roll from the rear limb lengths, the assumed heave and the pitch estimate.
///
/// alpha = pi/2 - acos(((l2^2 - l3^2) / 4c) / (Z cos b + d2 sin b)). The lever
/// keeps its sign so the estimate stays correct when it turns negative near
/// zero heave with negative pitch.
template <typename T>
RollEstimate<T> estimate_roll(const ManipulatorGeometry& g, T l2, T l3, T z_hat, T beta_hat) {
    return detail::roll_estimate(g, l2, l3, z_hat, beta_hat, false);
}

/// Lambda_3 = 1/2 sum (l_i - l~_i)^2. The unscaled Lambda_2 is twice this value.
template <typename T>
T cost_simplified(const BasicJointLengths<T>& theta, const BasicJointLengths<T>& theta_tilde) {
    T sum = T(0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        const T d = theta[i] - theta_tilde[i];
        sum = sum + d * d;
    }
    return T(0.5) * sum;
}

namespace detail {

template <typename T>
Vec3<T> simplified_limb(const ManipulatorGeometry& g, T z_hat, const Mat3<T>& rotation,
                        std::size_t i) {
    const auto a = g.base_joints()[i];
    const auto b = g.platform_joints()[i];
    const Vec3<T> bi{T(b[0]), T(b[1]), T(b[2])};
    const Vec3<T> ai{T(a[0]), T(a[1]), T(a[2])};
    return Vec3<T>{T(0.0), T(0.0), z_hat} + rotation * bi - ai;
}

inline void require_limb(double length, std::size_t i) {
    if (length < 1e-12) {
        throw KinematicsError(ErrorCode::ZeroLengthLimb,
                              "simplified limb " + std::to_string(i + 1) + " has zero length");
    }
}

}  // namespace detail

/// d l~_i / dZ = [0 0 1](P~ + R b_i - a_i) / l~_i for limb index 0..2.
template <typename T>
T dlt_dz(const ManipulatorGeometry& g, T z_hat, const Mat3<T>& rotation, std::size_t limb) {
    const Vec3<T> v = detail::simplified_limb(g, z_hat, rotation, limb);
    const T len = norm(v);
    detail::require_limb(value_of(len), limb);
    return v.z() / len;
}

/// dLambda_3/dZ_hat = sum (l~_i - l_i) dl~_i/dZ with the rotation held fixed.
///
/// The sign makes Z_{k+1} = Z_k - eta * gradient a descent step on Lambda_3.
template <typename T>
T gradient_z(const ManipulatorGeometry& g, const BasicJointLengths<T>& theta, T z_hat,
             const Mat3<T>& rotation) {
    T sum = T(0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec3<T> v = detail::simplified_limb(g, z_hat, rotation, i);
        const T len = norm(v);
        detail::require_limb(value_of(len), i);
        sum = sum + (len - theta[i]) * (v.z() / len);
    }
    return sum;
}

/// One gradient-solver iteration: pitch, roll, R_hat, simplified IK and the heave update.
template <typename T>
struct GradientStep {
    T beta{};
    T alpha{};
    T gamma{};
    Mat3<T> rotation;
    BasicJointLengths<T> lengths;  // l~ at (z, R_hat)
    T gradient{};
    T z_next{};
    bool roll_degenerate = false;
    int clamp_events = 0;
};

template <typename T>
GradientStep<T> gradient_step(const ManipulatorGeometry& g, const BasicJointLengths<T>& theta,
                              T z_hat, const FkSettings& s) {
    GradientStep<T> out;
    const auto pitch = detail::pitch_estimate(g, theta[0], z_hat, s.clamp_infeasible);
    out.beta = pitch.value;
    const auto roll =
        detail::roll_estimate(g, theta[1], theta[2], z_hat, out.beta, s.clamp_infeasible);
    out.alpha = roll.alpha;
    out.roll_degenerate = roll.degenerate;
    out.clamp_events = int(pitch.clamped) + int(roll.clamped);
    out.gamma = s.include_gamma_hat ? yaw_angle(g, out.alpha, out.beta) : T(0.0);
    out.rotation = rotation_matrix(out.alpha, out.beta, out.gamma);

    T grad = T(0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec3<T> v = detail::simplified_limb(g, z_hat, out.rotation, i);
        const T len = norm(v);
        detail::require_limb(value_of(len), i);
        out.lengths[i] = len;
        grad = grad + (len - theta[i]) * (v.z() / len);
    }
    out.gradient = grad;
    out.z_next = z_hat - T(s.eta) * grad;
    return out;
}

inline double mean_length(const JointLengths& theta) {
    return (theta[0] + theta[1] + theta[2]) / 3.0;
}

/// Gradient-based forward kinematics from the three joint lengths.
///
/// Runs exactly max_iters heave updates (unless early_exit is set) and
/// re-estimates roll, pitch and yaw at the final heave.
inline FkSolution solve_fk(const ManipulatorGeometry& g, const JointLengths& theta,
                           const FkSettings& s = {}) {
    g.validate();
    s.validate();
    for (std::size_t i = 0; i < 3; ++i) {
        if (!std::isfinite(theta[i]) || theta[i] < 0.0) {
            throw KinematicsError(ErrorCode::InvalidArgument,
                                  "joint length l" + std::to_string(i + 1) +
                                      " must be finite and >= 0");
        }
    }

    FkSolution sol;
    double z = s.z_init.value_or(mean_length(theta));
    sol.z_init = z;
    sol.trace.reserve(static_cast<std::size_t>(s.max_iters));

    for (int k = 0; k < s.max_iters; ++k) {
        GradientStep<double> step;
        try {
            step = gradient_step(g, theta, z, s);
        } catch (const KinematicsError& e) {
            throw e.with_iteration(k);
        }
        IterationRecord rec;
        rec.k = k;
        rec.z = z;
        rec.alpha = step.alpha;
        rec.beta = step.beta;
        rec.gamma = step.gamma;
        rec.cost = cost_simplified(theta, step.lengths);
        rec.gradient = step.gradient;
        rec.z_next = step.z_next;
        rec.roll_degenerate = step.roll_degenerate;
        sol.trace.push_back(rec);
        sol.clamp_events += step.clamp_events;

        if (!std::isfinite(step.z_next) || step.z_next < -1e3 || step.z_next > 1e4) {
            throw KinematicsError(ErrorCode::NonFiniteIterate,
                                  "heave iterate " + std::to_string(step.z_next) +
                                      " left [-1e3, 1e4] mm")
                .with_iteration(k);
        }
        sol.converged_step_norm = std::abs(step.z_next - z);
        z = step.z_next;
        if (s.early_exit && sol.converged_step_norm < s.early_exit_tol) {
            break;
        }
    }

    sol.z_hat = z;
    const int k_final = static_cast<int>(sol.trace.size());
    try {
        const auto pitch = detail::pitch_estimate(g, theta[0], z, s.clamp_infeasible);
        const auto roll =
            detail::roll_estimate(g, theta[1], theta[2], z, pitch.value, s.clamp_infeasible);
        sol.beta_hat = pitch.value;
        sol.alpha_hat = roll.alpha;
        sol.roll_degenerate = roll.degenerate;
        sol.clamp_events += int(pitch.clamped) + int(roll.clamped);
    } catch (const KinematicsError& e) {
        throw e.with_iteration(k_final);
    }
    sol.gamma_hat = s.include_gamma_hat ? yaw_angle(g, sol.alpha_hat, sol.beta_hat) : 0.0;
    return sol;
}

}  // namespace spr3

#endif  // SPR3_FK_GRADIENT_HPP
