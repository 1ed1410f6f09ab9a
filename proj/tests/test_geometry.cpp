#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spr3/bounds.hpp"
#include "spr3/geometry.hpp"

using namespace spr3;

namespace {

const ManipulatorGeometry kGeom = ManipulatorGeometry::reference();

Mat3<double> rx(double a) {
    Mat3<double> m = Mat3<double>::identity();
    m[1] = {0.0, std::cos(a), -std::sin(a)};
    m[2] = {0.0, std::sin(a), std::cos(a)};
    return m;
}
Mat3<double> ry(double b) {
    Mat3<double> m = Mat3<double>::identity();
    m[0] = {std::cos(b), 0.0, std::sin(b)};
    m[2] = {-std::sin(b), 0.0, std::cos(b)};
    return m;
}
Mat3<double> rz(double g) {
    Mat3<double> m = Mat3<double>::identity();
    m[0] = {std::cos(g), -std::sin(g), 0.0};
    m[1] = {std::sin(g), std::cos(g), 0.0};
    return m;
}

double max_diff(const Mat3<double>& a, const Mat3<double>& b) { return max_abs_entry(a - b); }

WorkspaceConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> z(0.0, 100.0), a(-3.5, 3.5), b(-1.5, 1.5);
    return {z(rng), deg_to_rad(a(rng)), deg_to_rad(b(rng))};
}

}  // namespace

TEST(Geometry, ReferenceDimensionsAndJoints) {
    EXPECT_DOUBLE_EQ(kGeom.d1, 1150.0);
    EXPECT_DOUBLE_EQ(kGeom.d2, 500.0);
    EXPECT_DOUBLE_EQ(kGeom.d3, 390.0);
    const auto a = kGeom.base_joints();
    EXPECT_DOUBLE_EQ(a[0].x(), 1150.0);
    EXPECT_DOUBLE_EQ(a[1].x(), -500.0);
    EXPECT_DOUBLE_EQ(a[1].y(), 390.0);
    EXPECT_DOUBLE_EQ(a[2].y(), -390.0);
    EXPECT_DOUBLE_EQ(kGeom.slope(), -390.0 / 500.0);
}

TEST(Geometry, InvalidDimensionsRejected) {
    for (const ManipulatorGeometry g : {ManipulatorGeometry{1150, 500, 0},
                                        ManipulatorGeometry{-1, 500, 390},
                                        ManipulatorGeometry{1150, NAN, 390}}) {
        EXPECT_FALSE(g.valid());
        try {
            g.validate();
            FAIL();
        } catch (const KinematicsError& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        }
    }
}

TEST(Rotation, IdentityAtZero) {
    EXPECT_LT(max_diff(rotation_matrix(0.0, 0.0, 0.0), Mat3<double>::identity()), 1e-15);
}

TEST(Rotation, QuarterRollMapsYToZ) {
    const Vec3<double> v = rotation_matrix(std::numbers::pi / 2, 0.0, 0.0) * Vec3<double>{0, 1, 0};
    EXPECT_NEAR(v.x(), 0.0, 1e-15);
    EXPECT_NEAR(v.y(), 0.0, 1e-15);
    EXPECT_NEAR(v.z(), 1.0, 1e-15);
}

TEST(Rotation, MatchesElementaryProduct) {
    const double a = 0.01, b = 0.02, g = 0.003;
    EXPECT_LT(max_diff(rotation_matrix(a, b, g), rz(g) * ry(b) * rx(a)), 1e-15);
}

TEST(Rotation, OrthonormalOverRandomAngles) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-std::numbers::pi / 4, std::numbers::pi / 4);
    for (int i = 0; i < 10000; ++i) {
        const Mat3<double> r = rotation_matrix(u(rng), u(rng), u(rng));
        ASSERT_LT(max_diff(transpose(r) * r, Mat3<double>::identity()), 1e-12);
        ASSERT_NEAR(determinant(r), 1.0, 1e-12);
    }
}

TEST(Parasitic, PureHeaveIsZero) {
    const auto p = parasitic_motions(kGeom, WorkspaceConfig{60.0, 0.0, 0.0});
    EXPECT_NEAR(p.x, 0.0, 1e-12);
    EXPECT_NEAR(p.y, 0.0, 1e-12);
    EXPECT_EQ(p.gamma, 0.0);
}

TEST(Parasitic, CancellationAtZeroOrientation) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> z(0.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const auto p = parasitic_motions(kGeom, WorkspaceConfig{z(rng), 0.0, 0.0});
        ASSERT_LT(std::abs(p.x), 1e-9);
        ASSERT_LT(std::abs(p.y), 1e-9);
    }
}

TEST(Parasitic, YawVanishesWithZeroPitchOrRoll) {
    for (double z : {0.0, 35.0, 90.0}) {
        EXPECT_EQ(parasitic_motions(kGeom, WorkspaceConfig{z, 0.05, 0.0}).gamma, 0.0);
        EXPECT_EQ(parasitic_motions(kGeom, WorkspaceConfig{z, 0.0, 0.02}).gamma, 0.0);
    }
}

// With zero pitch, limb 1 stays in the platform x-z plane: gamma = 0,
// X = d2 (cos a - 1) and Y = -Z tan a.
TEST(Parasitic, ZeroPitchClosedForm) {
    for (double z : {10.0, 50.0, 100.0}) {
        for (double a_deg : {-3.5, 1.0, 3.0}) {
            const double a = deg_to_rad(a_deg);
            const auto p = parasitic_motions(kGeom, WorkspaceConfig{z, a, 0.0});
            EXPECT_NEAR(p.gamma, 0.0, 1e-15);
            EXPECT_NEAR(p.x, kGeom.d2 * (std::cos(a) - 1.0), 1e-10);
            EXPECT_NEAR(p.y, -z * std::tan(a), 1e-10);
        }
    }
}

// Mirror symmetry about the x-z plane at zero roll.
TEST(Parasitic, ZeroRollHasNoSway) {
    for (double z : {10.0, 50.0, 100.0}) {
        for (double b_deg : {-1.5, 0.7, 1.5}) {
            const auto p = parasitic_motions(kGeom, WorkspaceConfig{z, 0.0, deg_to_rad(b_deg)});
            EXPECT_NEAR(p.y, 0.0, 1e-12);
            EXPECT_EQ(p.gamma, 0.0);
        }
    }
}

TEST(Parasitic, MatchesConstraintOracleAtReferencePose) {
    const WorkspaceConfig c{50.0, deg_to_rad(3.0), deg_to_rad(1.0)};
    const auto p = parasitic_motions(kGeom, c);
    const auto o = bounds::parasitic_constraint_oracle(kGeom, c);
    EXPECT_NEAR(p.x, o.x, 1e-8);
    EXPECT_NEAR(p.y, o.y, 1e-8);
    EXPECT_NEAR(p.gamma, o.gamma, 1e-10);
}

TEST(Parasitic, ConstraintResidualsOverWorkspace) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const WorkspaceConfig c = random_config(rng);
        const auto r = bounds::constraint_residuals(kGeom, c, parasitic_motions(kGeom, c));
        ASSERT_LT(bounds::max_abs(r), 1e-8) << "pose " << i;
    }
}

TEST(Parasitic, YawMatchesTangentForm) {
    const double a = deg_to_rad(3.0), b = deg_to_rad(1.5);
    const double k = kGeom.d1 * kGeom.d2 + kGeom.d2 * kGeom.d2;
    const double expected = std::atan(k * std::sin(a) * std::sin(b) /
                                      (k * std::cos(a) + kGeom.d3 * kGeom.d3 * std::cos(b)));
    EXPECT_DOUBLE_EQ(yaw_angle(kGeom, a, b), expected);
    EXPECT_DOUBLE_EQ(parasitic_motions(kGeom, WorkspaceConfig{40.0, a, b}).gamma, expected);
}

TEST(Parasitic, DegenerateOrientationThrows) {
    try {
        parasitic_motions(kGeom, WorkspaceConfig{50.0, std::numbers::pi / 2, 0.0});
        FAIL();
    } catch (const KinematicsError& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateOrientation);
    }
}

// The platform is mirrored through the base plane by (Z, a, b) -> (-Z, -a, -b).
TEST(InverseKinematics, MirrorSymmetry) {
    const WorkspaceConfig c{30.0, deg_to_rad(2.0), deg_to_rad(-1.0)};
    const auto l = inverse_kinematics_exact(kGeom, c);
    const auto m = inverse_kinematics_exact(kGeom, WorkspaceConfig{-c.z, -c.alpha, -c.beta});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(l[i], m[i], 1e-10);
}

TEST(InverseKinematics, HomeAndPureHeave) {
    const auto home = inverse_kinematics_exact(kGeom, WorkspaceConfig{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(home[i], 0.0);
    for (double z : {1.0, 60.0, 100.0}) {
        const auto l = inverse_kinematics_exact(kGeom, WorkspaceConfig{z, 0.0, 0.0});
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(l[i], z, 1e-12);
        const auto s = inverse_kinematics_simplified(kGeom, z, Mat3<double>::identity());
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s[i], z, 1e-12);
    }
}

// Independent loop closure: b_i = P + R b_i^M built from the elementary rotations.
TEST(InverseKinematics, LoopClosureOracle) {
    const WorkspaceConfig c{80.0, deg_to_rad(2.0), deg_to_rad(-1.0)};
    const auto p = parasitic_motions(kGeom, c);
    const Mat3<double> r = rz(p.gamma) * ry(c.beta) * rx(c.alpha);
    const auto l = inverse_kinematics_exact(kGeom, c);
    const double a[3][3] = {{1150, 0, 0}, {-500, 390, 0}, {-500, -390, 0}};
    for (int i = 0; i < 3; ++i) {
        double d[3];
        for (int k = 0; k < 3; ++k) {
            const double pk = k == 0 ? p.x : (k == 1 ? p.y : c.z);
            d[k] = pk + r[k][0] * a[i][0] + r[k][1] * a[i][1] + r[k][2] * a[i][2] - a[i][k];
        }
        EXPECT_NEAR(l[i], std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]), 1e-10);
    }
}

// l~ with the exact rotation differs from l only by the dropped [X, Y, 0] shift.
TEST(InverseKinematics, SimplifiedDropsHorizontalShift) {
    const WorkspaceConfig c{50.0, deg_to_rad(3.0), deg_to_rad(1.5)};
    const FullPose pose = full_pose(kGeom, c);
    const auto lt = inverse_kinematics_simplified(kGeom, c.z, pose.rotation);
    const auto a = kGeom.base_joints();
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec3<double> chain = pose.translation + pose.rotation * a[i] - a[i];
        const Vec3<double> shifted = chain - Vec3<double>{pose.parasitic.x, pose.parasitic.y, 0.0};
        EXPECT_NEAR(lt[i], norm(shifted), 1e-12);
    }
    const auto l1 = bounds::lemma1_check(kGeom, c);
    EXPECT_TRUE(l1.holds());
}

TEST(JointPositions, HomeIsZeroLength) {
    try {
        joint_positions(kGeom, full_pose(kGeom, WorkspaceConfig{0.0, 0.0, 0.0}));
        FAIL();
    } catch (const KinematicsError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroLengthLimb);
    }
}

TEST(JointPositions, PureHeave) {
    const auto jp = joint_positions(kGeom, full_pose(kGeom, WorkspaceConfig{40.0, 0.0, 0.0}));
    const auto a = kGeom.base_joints();
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(jp.platform[i].x(), a[i].x(), 1e-12);
        EXPECT_NEAR(jp.platform[i].y(), a[i].y(), 1e-12);
        EXPECT_NEAR(jp.platform[i].z(), 40.0, 1e-12);
        EXPECT_NEAR(jp.directions[i].z(), 1.0, 1e-15);
    }
}

// b_i = P + R b_i^M must also equal a_i + l_i s_i.
TEST(JointPositions, DualExpressionConsistency) {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 200; ++n) {
        const WorkspaceConfig c = random_config(rng);
        if (c.z < 1.0) continue;
        const FullPose pose = full_pose(kGeom, c);
        const auto jp = joint_positions(kGeom, pose);
        const auto l = inverse_kinematics_exact(kGeom, c);
        const auto a = kGeom.base_joints();
        for (std::size_t i = 0; i < 3; ++i) {
            const Vec3<double> via_limb = a[i] + l[i] * jp.directions[i];
            ASSERT_LT(norm(via_limb - jp.platform[i]), 1e-10);
            ASSERT_NEAR(jp.lengths[i], l[i], 1e-12);
        }
    }
}
