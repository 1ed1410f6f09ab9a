#ifndef SPR3_GEOMETRY_HPP
#define SPR3_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "spr3/errors.hpp"
#include "spr3/linalg.hpp"
#include "spr3/scalar.hpp"

namespace spr3 {

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Base and platform dimensions of the 3SPR manipulator, in millimetres.
///
/// Joint 1 sits on the x axis at d1; joints 2 and 3 sit behind the origin at
/// x = -d2, y = +/-d3. The platform triangle is congruent to the base one, so
/// the platform-frame revolute joints have the same coordinates as the base
/// spherical joints and the home pose (Z, alpha, beta) = 0 has all limbs at
/// zero length.
struct ManipulatorGeometry {
    double d1 = 1150.0;
    double d2 = 500.0;
    double d3 = 390.0;

    /// The motion-platform dimensions used throughout the experiments.
    static constexpr ManipulatorGeometry reference() { return {1150.0, 500.0, 390.0}; }

    bool valid() const {
        return std::isfinite(d1) && std::isfinite(d2) && std::isfinite(d3) && d1 > 0.0 &&
               d2 > 0.0 && d3 > 0.0;
    }

    void validate() const {
        if (!valid()) {
            throw KinematicsError(ErrorCode::InvalidArgument,
                                  "geometry requires finite d1, d2, d3 > 0 (got " +
                                      std::to_string(d1) + ", " + std::to_string(d2) + ", " +
                                      std::to_string(d3) + ")");
        }
    }

    /// Base-frame spherical joint positions a_i.
    std::array<Vec3<double>, 3> base_joints() const {
        return {Vec3<double>{d1, 0.0, 0.0}, Vec3<double>{-d2, d3, 0.0},
                Vec3<double>{-d2, -d3, 0.0}};
    }

    /// Platform-frame revolute joint positions; identical to base_joints().
    std::array<Vec3<double>, 3> platform_joints() const { return base_joints(); }

    /// Slope of the rear revolute-joint radial lines, b2.y / b2.x.
    double slope() const { return -d3 / d2; }
};

template <typename T>
struct BasicWorkspaceConfig {
    T z{};      // heave, mm
    T alpha{};  // roll about x, rad
    T beta{};   // pitch about y, rad
};
using WorkspaceConfig = BasicWorkspaceConfig<double>;

/// Nominal workspace: Z in [0, 100] mm, |alpha| <= 3.5 deg, |beta| <= 1.5 deg.
struct WorkspaceBox {
    double z_min = 0.0;
    double z_max = 100.0;
    double alpha_max = deg_to_rad(3.5);
    double beta_max = deg_to_rad(1.5);

    bool contains(const WorkspaceConfig& c) const {
        return c.z >= z_min && c.z <= z_max && std::abs(c.alpha) <= alpha_max &&
               std::abs(c.beta) <= beta_max;
    }
};

template <typename T>
struct BasicParasiticMotion {
    T x{};      // mm
    T y{};      // mm
    T gamma{};  // yaw, rad
};
using ParasiticMotion = BasicParasiticMotion<double>;

template <typename T>
struct BasicJointLengths {
    std::array<T, 3> l{};

    T& operator[](std::size_t i) { return l[i]; }
    const T& operator[](std::size_t i) const { return l[i]; }
};
using JointLengths = BasicJointLengths<double>;

template <typename T>
struct BasicFullPose {
    BasicWorkspaceConfig<T> config;
    BasicParasiticMotion<T> parasitic;
    Mat3<T> rotation;
    Vec3<T> translation;  // [X, Y, Z]
};
using FullPose = BasicFullPose<double>;

/// R = Rz(gamma) * Ry(beta) * Rx(alpha), expanded element-wise.
template <typename T>
Mat3<T> rotation_matrix(T alpha, T beta, T gamma) {
    using std::cos;
    using std::sin;
    const T ca = cos(alpha), sa = sin(alpha);
    const T cb = cos(beta), sb = sin(beta);
    const T cg = cos(gamma), sg = sin(gamma);
    const T sbsa = sb * sa;
    const T sbca = sb * ca;

    Mat3<T> r;
    r[0] = {cg * cb, cg * sbsa - sg * ca, cg * sbca + sg * sa};
    r[1] = {sg * cb, sg * sbsa + cg * ca, sg * sbca - cg * sa};
    r[2] = {T(0.0) - sb, cb * sa, cb * ca};
    return r;
}

namespace detail {

template <typename T>
struct YawTerms {
    T numerator;    // (ab + b^2) sin(alpha) sin(beta)
    T denominator;  // (ab + b^2) cos(alpha) + c^2 cos(beta)
};

template <typename T>
YawTerms<T> yaw_terms(const ManipulatorGeometry& g, T ca, T sa, T cb, T sb) {
    const T k = T(g.d1 * g.d2 + g.d2 * g.d2);
    return {k * sa * sb, k * ca + T(g.d3 * g.d3) * cb};
}

}  // namespace detail

/// Yaw forced by the revolute-joint constraints at roll alpha and pitch beta.
///
/// The constraints fix tan(gamma) = (ab + b^2) sin a sin b / ((ab + b^2) cos a + c^2 cos b)
/// with a = d1, b = d2, c = d3.
template <typename T>
T yaw_angle(const ManipulatorGeometry& g, T alpha, T beta) {
    using std::atan;
    using std::cos;
    using std::sin;
    const auto t = detail::yaw_terms(g, cos(alpha), sin(alpha), cos(beta), sin(beta));
    return atan(t.numerator / t.denominator);
}

/// Closed-form parasitic motions (X, Y, gamma) for a workspace configuration.
///
/// X = P_x / Q_x and Y = -P_y / Q_y, where Q_x = cos a cos b Q, Q_y = cos a Q and
/// Q = D^2 + N^2 with N, D the yaw numerator and denominator. The polynomial
/// terms are evaluated as the expanded listing; the Z-bearing part of each
/// numerator carries the factor sec(gamma) = sqrt(Q) / D.
///
/// Throws DegenerateOrientation when Q_x, Q_y or D fall below 1e-9 d2^4
/// (1e-9 d2^2 for D), which only happens far outside the workspace.
template <typename T>
BasicParasiticMotion<T> parasitic_motions(const ManipulatorGeometry& g,
                                          const BasicWorkspaceConfig<T>& c) {
    using std::atan;
    using std::cos;
    using std::sin;
    using std::sqrt;

    const T z = c.z;
    const T ca = cos(c.alpha), sa = sin(c.alpha);
    const T cb = cos(c.beta), sb = sin(c.beta);

    const T ca2 = ca * ca, ca3 = ca2 * ca, ca4 = ca2 * ca2;
    const T sa2 = sa * sa, sa3 = sa2 * sa, sa4 = sa2 * sa2;
    const T cb2 = cb * cb, cb3 = cb2 * cb;
    const T sb2 = sb * sb, sb3 = sb2 * sb, sb4 = sb2 * sb2;
    const T sa2sb2 = sa2 * sb2;
    const T cacb = ca * cb;

    // Dimension monomials.
    const double d1 = g.d1, d2 = g.d2, d3 = g.d3;
    const T d1_2 = T(d1 * d1);
    const T d2_2 = T(d2 * d2), d2_3 = T(d2 * d2 * d2), d2_4 = T(d2 * d2 * d2 * d2);
    const T d2_5 = T(d2 * d2 * d2 * d2 * d2);
    const T d3_2 = T(d3 * d3), d3_4 = T(d3 * d3 * d3 * d3);
    const T d1d2_4 = T(d1) * d2_4;
    const T d1_2d2_3 = d1_2 * d2_3;
    const T d2_3d3_2 = d2_3 * d3_2;
    const T d2d3_4 = T(d2) * d3_4;
    const T d1d2_2d3_2 = T(d1) * d2_2 * d3_2;
    const T d1_2d2_2 = d1_2 * d2_2;
    const T d1d2_3 = T(d1) * d2_3;
    const T d2_2d3_2 = d2_2 * d3_2;
    const T d1d2d3_2 = T(d1 * d2) * d3_2;
    const T d1_2d2d3_2 = d1_2 * T(d2) * d3_2;

    const auto yaw = detail::yaw_terms(g, ca, sa, cb, sb);

    // Shared bracket of Q_x and Q_y; equals D^2 + N^2.
    const T q = d2_4 * ca2 + d3_4 * cb2 + d1_2d2_2 * ca2 + d2_4 * sa2sb2 + T(2.0) * d1d2_3 * ca2 +
                d1_2d2_2 * sa2sb2 + T(2.0) * d2_2d3_2 * cacb + T(2.0) * d1d2_3 * sa2sb2 +
                T(2.0) * d1d2d3_2 * cacb;
    const T qx = cacb * q;
    const T qy = ca * q;

    const double guard = 1e-9 * d2 * d2 * d2 * d2;
    if (std::abs(value_of(qx)) < guard || std::abs(value_of(qy)) < guard ||
        value_of(yaw.denominator) < 1e-9 * d2 * d2) {
        throw KinematicsError(ErrorCode::DegenerateOrientation,
                              "parasitic-motion denominators vanish at alpha=" +
                                  std::to_string(value_of(c.alpha)) +
                                  " rad, beta=" + std::to_string(value_of(c.beta)) + " rad");
    }

    const T sec_gamma = sqrt(q) / yaw.denominator;

    // P_x, terms without Z.
    const T px0 = d2_5 * ca4 + d1_2d2_3 * ca4 - d2_5 * ca3 * cb + d2_5 * sa4 * sb4 +
                  T(2.0) * d1d2_4 * ca4 - T(2.0) * d2_3d3_2 * ca2 * cb2 + d1_2d2_3 * sa4 * sb4 -
                  T(2.0) * d1d2_4 * ca3 * cb - d2d3_4 * ca * cb3 +
                  T(2.0) * d2_5 * ca2 * sa2sb2 - d1_2d2_3 * ca3 * cb + d2d3_4 * ca2 * cb2 +
                  T(2.0) * d2_3d3_2 * ca3 * cb + T(2.0) * d1d2_4 * sa4 * sb4 +
                  T(4.0) * d1d2_4 * ca2 * sa2sb2 - d2_5 * cacb * sa2sb2 +
                  T(2.0) * d1d2_2d3_2 * ca3 * cb + T(2.0) * d1_2d2_3 * ca2 * sa2sb2 -
                  d2_3d3_2 * cb2 * sa2sb2 - T(2.0) * d1d2_2d3_2 * ca2 * cb2 -
                  T(2.0) * d1d2_4 * cacb * sa2sb2 - T(2.0) * d1d2_2d3_2 * cb2 * sa2sb2 -
                  d1_2d2d3_2 * cb2 * sa2sb2 + (T(2.0) * d2_3d3_2 - d1_2d2_3) * cacb * sa2sb2 +
                  T(2.0) * d1d2_2d3_2 * cacb * sa2sb2;

    // P_x, coefficient of Z.
    const T pxz = d2_4 * ca3 * sb + d1_2d2_2 * ca3 * sb + d3_4 * ca * cb2 * sb +
                  (d2_4 + T(2.0) * d1d2_3) * ca * sa2 * sb3 + T(2.0) * d1d2_3 * ca3 * sb +
                  d1_2d2_2 * ca * sa2 * sb3 + d2_2d3_2 * cb * sa2 * sb3 +
                  d2_2d3_2 * cb3 * sa2 * sb + d2_4 * ca * cb2 * sa2 * sb +
                  T(2.0) * d2_2d3_2 * ca2 * cb * sb + d1_2d2_2 * ca * cb2 * sa2 * sb +
                  d1d2d3_2 * cb * sa2 * sb3 + d1d2d3_2 * cb3 * sa2 * sb +
                  T(2.0) * d1d2_3 * ca * cb2 * sa2 * sb + T(2.0) * d1d2d3_2 * ca2 * cb * sb;

    // P_y, terms without Z.
    const T py0 = d2_3d3_2 * sa3 * sb3 - T(d1) * d3_4 * cb2 * sa * sb - d2d3_4 * cb2 * sa * sb +
                  d1d2_2d3_2 * sa3 * sb3 + d2_3d3_2 * ca2 * sa * sb +
                  d1d2_2d3_2 * ca2 * sa * sb - d2_3d3_2 * cacb * sa * sb +
                  d2d3_4 * cacb * sa * sb - T(2.0) * d1d2_2d3_2 * cacb * sa * sb -
                  d1_2d2d3_2 * cacb * sa * sb;

    // P_y, coefficient of Z.
    const T pyz = d3_4 * cb3 * sa + d2_4 * ca2 * cb * sa + d3_4 * cb * sa * sb2 +
                  d2_2d3_2 * ca * sa * sb2 + T(2.0) * d1d2_3 * ca2 * cb * sa +
                  d1_2d2_2 * ca2 * cb * sa + T(2.0) * d2_2d3_2 * ca * cb2 * sa +
                  d1d2d3_2 * ca * sa * sb2 + T(2.0) * d1d2d3_2 * ca * cb2 * sa;

    BasicParasiticMotion<T> out;
    out.x = (px0 + z * sec_gamma * pxz) / qx;
    out.y = T(0.0) - (py0 + z * sec_gamma * pyz) / qy;
    out.gamma = atan(yaw.numerator / yaw.denominator);
    return out;
}

/// Complete platform pose: parasitic motions, rotation and translation.
template <typename T>
BasicFullPose<T> full_pose(const ManipulatorGeometry& g, const BasicWorkspaceConfig<T>& c) {
    BasicFullPose<T> pose;
    pose.config = c;
    pose.parasitic = parasitic_motions(g, c);
    pose.rotation = rotation_matrix(c.alpha, c.beta, pose.parasitic.gamma);
    pose.translation = {pose.parasitic.x, pose.parasitic.y, c.z};
    return pose;
}

namespace detail {

template <typename T>
BasicJointLengths<T> limb_lengths(const ManipulatorGeometry& g, const Vec3<T>& p,
                                  const Mat3<T>& r) {
    const auto a = g.base_joints();
    const auto b = g.platform_joints();
    BasicJointLengths<T> out;
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec3<T> bi{T(b[i][0]), T(b[i][1]), T(b[i][2])};
        const Vec3<T> ai{T(a[i][0]), T(a[i][1]), T(a[i][2])};
        out[i] = norm(p + r * bi - ai);
    }
    return out;
}

}  // namespace detail

/// Exact joint lengths l_i = |P + R b_i - a_i| including parasitic motions.
template <typename T>
BasicJointLengths<T> inverse_kinematics_exact(const ManipulatorGeometry& g,
                                              const BasicWorkspaceConfig<T>& c) {
    const auto pose = full_pose(g, c);
    return detail::limb_lengths(g, pose.translation, pose.rotation);
}

/// Joint lengths with the platform translation truncated to [0, 0, Z].
///
/// The rotation is supplied by the caller: the exact one when comparing models,
/// or the estimated one inside the forward-kinematics iteration.
template <typename T>
BasicJointLengths<T> inverse_kinematics_simplified(const ManipulatorGeometry& g, T z,
                                                   const Mat3<T>& rotation) {
    return detail::limb_lengths(g, Vec3<T>{T(0.0), T(0.0), z}, rotation);
}

struct JointPositions {
    std::array<Vec3<double>, 3> platform;    // revolute joints in the base frame
    std::array<Vec3<double>, 3> directions;  // unit limb vectors
    JointLengths lengths;
};

/// Revolute-joint positions b_i = P + R b_i^M and unit limb directions.
inline JointPositions joint_positions(const ManipulatorGeometry& g, const FullPose& pose) {
    const auto a = g.base_joints();
    const auto b = g.platform_joints();
    JointPositions out;
    for (std::size_t i = 0; i < 3; ++i) {
        out.platform[i] = pose.translation + pose.rotation * b[i];
        const Vec3<double> limb = out.platform[i] - a[i];
        const double len = norm(limb);
        if (len < 1e-12) {
            throw KinematicsError(ErrorCode::ZeroLengthLimb,
                                  "limb " + std::to_string(i + 1) + " has zero length");
        }
        out.lengths[i] = len;
        out.directions[i] = (1.0 / len) * limb;
    }
    return out;
}

}  // namespace spr3

#endif  // SPR3_GEOMETRY_HPP
