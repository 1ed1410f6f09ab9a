#ifndef SPR3_FK_JACOBIAN_HPP
#define SPR3_FK_JACOBIAN_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "spr3/errors.hpp"
#include "spr3/geometry.hpp"
#include "spr3/linalg.hpp"
#include "spr3/scalar.hpp"

namespace spr3 {

struct JbSettings {
    /// Central-difference steps for (Z [mm], alpha [rad], beta [rad]).
    Vec3<double> fd_step{1e-4, 1e-6, 1e-6};
    int iters_per_sample = 1;
    /// Smallest admissible pivot relative to the largest one.
    double singular_tolerance = 1e-12;

    void validate() const {
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(fd_step[i] > 0.0)) {
                throw KinematicsError(ErrorCode::InvalidArgument, "fd_step entries must be > 0");
            }
        }
        if (iters_per_sample < 1) {
            throw KinematicsError(ErrorCode::InvalidArgument, "iters_per_sample must be >= 1");
        }
        if (!(singular_tolerance >= 0.0)) {
            throw KinematicsError(ErrorCode::InvalidArgument, "singular_tolerance must be >= 0");
        }
    }
};

/// Solves a x = b by Gaussian elimination with partial pivoting.
/// Throws SingularJacobian when a pivot drops below tol times the largest pivot.
template <typename T>
Vec3<T> solve3(Mat3<T> a, Vec3<T> b, double tol) {
    double pivots[3] = {0.0, 0.0, 0.0};
    for (std::size_t col = 0; col < 3; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < 3; ++r) {
            if (std::abs(value_of(a[r][col])) > std::abs(value_of(a[piv][col]))) {
                piv = r;
            }
        }
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(b[piv], b[col]);
        }
        pivots[col] = std::abs(value_of(a[col][col]));
        if (pivots[col] == 0.0) {
            throw KinematicsError(ErrorCode::SingularJacobian, "zero pivot");
        }
        for (std::size_t r = col + 1; r < 3; ++r) {
            const T f = a[r][col] / a[col][col];
            for (std::size_t c = col + 1; c < 3; ++c) {
                a[r][c] = a[r][c] - f * a[col][c];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    const double largest = std::max({pivots[0], pivots[1], pivots[2]});
    for (double p : pivots) {
        if (p < tol * largest) {
            throw KinematicsError(ErrorCode::SingularJacobian,
                                  "pivot " + std::to_string(p) + " below tolerance");
        }
    }
    Vec3<T> x;
    for (std::size_t k = 3; k-- > 0;) {
        T acc = b[k];
        for (std::size_t c = k + 1; c < 3; ++c) {
            acc = acc - a[k][c] * x[c];
        }
        x[k] = acc / a[k][k];
    }
    return x;
}

/// Central finite-difference Jacobian of the exact IK map, columns (Z, alpha, beta).
template <typename T>
Mat3<T> jacobian(const ManipulatorGeometry& g, const BasicWorkspaceConfig<T>& c,
                 const Vec3<double>& steps = JbSettings{}.fd_step) {
    Mat3<T> j;
    for (std::size_t col = 0; col < 3; ++col) {
        BasicWorkspaceConfig<T> plus = c, minus = c;
        const T h = T(steps[col]);
        T* fp = col == 0 ? &plus.z : (col == 1 ? &plus.alpha : &plus.beta);
        T* fm = col == 0 ? &minus.z : (col == 1 ? &minus.alpha : &minus.beta);
        *fp = *fp + h;
        *fm = *fm - h;
        const auto lp = inverse_kinematics_exact(g, plus);
        const auto lm = inverse_kinematics_exact(g, minus);
        const T inv = T(0.5 / steps[col]);
        for (std::size_t r = 0; r < 3; ++r) {
            j[r][col] = (lp[r] - lm[r]) * inv;
        }
    }
    return j;
}

/// One first-order update: solves J(prev) dTheta = theta_n - theta_prev.
template <typename T>
BasicWorkspaceConfig<T> jb_step(const ManipulatorGeometry& g, const BasicJointLengths<T>& theta_n,
                                const BasicWorkspaceConfig<T>& prev,
                                const BasicJointLengths<T>& prev_theta, const JbSettings& s) {
    const Mat3<T> j = jacobian(g, prev, s.fd_step);
    const Vec3<T> dtheta{theta_n[0] - prev_theta[0], theta_n[1] - prev_theta[1],
                         theta_n[2] - prev_theta[2]};
    const Vec3<T> d = solve3(j, dtheta, s.singular_tolerance);
    return {prev.z + d[0], prev.alpha + d[1], prev.beta + d[2]};
}

/// Jacobian-based forward kinematics for one sample of a trajectory.
///
/// With iters_per_sample > 1 the linearisation is repeated at the updated
/// configuration, with theta_prev replaced by the exact IK there.
inline WorkspaceConfig solve_fk_jb(const ManipulatorGeometry& g, const JointLengths& theta_n,
                                   const WorkspaceConfig& prev_config,
                                   const JointLengths& prev_theta, const JbSettings& s = {}) {
    g.validate();
    s.validate();
    WorkspaceConfig cfg = jb_step(g, theta_n, prev_config, prev_theta, s);
    for (int it = 1; it < s.iters_per_sample; ++it) {
        const JointLengths at_cfg = inverse_kinematics_exact(g, cfg);
        cfg = jb_step(g, theta_n, cfg, at_cfg, s);
    }
    if (!std::isfinite(cfg.z) || !std::isfinite(cfg.alpha) || !std::isfinite(cfg.beta)) {
        throw KinematicsError(ErrorCode::NonFiniteIterate, "JB update produced a non-finite value");
    }
    return cfg;
}

}  // namespace spr3

#endif  // SPR3_FK_JACOBIAN_HPP
