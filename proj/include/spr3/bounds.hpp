#ifndef SPR3_BOUNDS_HPP
#define SPR3_BOUNDS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spr3/errors.hpp"
#include "spr3/fk_gradient.hpp"
#include "spr3/fk_jacobian.hpp"
#include "spr3/geometry.hpp"
#include "spr3/linalg.hpp"

namespace spr3::bounds {

// ---------------------------------------------------------------------------
// Constraint oracle

/// Residuals of the revolute-joint constraints for a candidate (X, Y, gamma).
///
/// With a_i^M = R^T (a_i - P): a_1^M.y = 0, a_2^M.y = m a_2^M.x, a_3^M.y = -m a_3^M.x.
inline Vec3<double> constraint_residuals(const ManipulatorGeometry& g, const WorkspaceConfig& c,
                                         const ParasiticMotion& p) {
    const Mat3<double> rt = transpose(rotation_matrix(c.alpha, c.beta, p.gamma));
    const Vec3<double> pos{p.x, p.y, c.z};
    const auto a = g.base_joints();
    const double m = g.slope();
    const Vec3<double> m1 = rt * (a[0] - pos);
    const Vec3<double> m2 = rt * (a[1] - pos);
    const Vec3<double> m3 = rt * (a[2] - pos);
    return {m1.y(), m2.y() - m * m2.x(), m3.y() + m * m3.x()};
}

inline double max_abs(const Vec3<double>& v) {
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

/// Solves the constraint equations for (X, Y, gamma) by damped Newton
/// iteration from zero, independently of the closed forms.
inline ParasiticMotion parasitic_constraint_oracle(const ManipulatorGeometry& g,
                                                   const WorkspaceConfig& c,
                                                   double tolerance = 1e-12,
                                                   int max_iters = 100) {
    ParasiticMotion p{0.0, 0.0, 0.0};
    Vec3<double> r = constraint_residuals(g, c, p);
    const std::array<double, 3> h{1e-5, 1e-5, 1e-8};
    for (int it = 0; it < max_iters; ++it) {
        if (max_abs(r) < tolerance) {
            return p;
        }
        Mat3<double> j;
        for (std::size_t k = 0; k < 3; ++k) {
            ParasiticMotion pp = p, pm = p;
            double* fp = k == 0 ? &pp.x : (k == 1 ? &pp.y : &pp.gamma);
            double* fm = k == 0 ? &pm.x : (k == 1 ? &pm.y : &pm.gamma);
            *fp += h[k];
            *fm -= h[k];
            const Vec3<double> rp = constraint_residuals(g, c, pp);
            const Vec3<double> rm = constraint_residuals(g, c, pm);
            for (std::size_t row = 0; row < 3; ++row) {
                j[row][k] = (rp[row] - rm[row]) / (2.0 * h[k]);
            }
        }
        const Vec3<double> step = solve3(j, r, 0.0);
        // Backtracking on the residual norm.
        double t = 1.0;
        for (int ls = 0; ls < 30; ++ls) {
            const ParasiticMotion trial{p.x - t * step[0], p.y - t * step[1],
                                        p.gamma - t * step[2]};
            const Vec3<double> rt = constraint_residuals(g, c, trial);
            if (max_abs(rt) < max_abs(r) || ls == 29) {
                p = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
    }
    if (max_abs(r) < tolerance) {
        return p;
    }
    throw KinematicsError(ErrorCode::NoConvergence,
                          "constraint oracle residual " + std::to_string(max_abs(r)) +
                              " mm after " + std::to_string(max_iters) + " iterations");
}

// ---------------------------------------------------------------------------
// Lemma 1: |l_i - l~_i| <= sqrt(2) max(|X|, |Y|)

struct Lemma1Result {
    std::array<double, 3> lhs{};
    double rhs = 0.0;

    bool holds(double slack = 1e-12) const {
        return std::all_of(lhs.begin(), lhs.end(), [&](double v) { return v <= rhs + slack; });
    }
    double margin() const { return *std::max_element(lhs.begin(), lhs.end()) - rhs; }
};

inline Lemma1Result lemma1_check(const ManipulatorGeometry& g, const WorkspaceConfig& c) {
    const FullPose pose = full_pose(g, c);
    const JointLengths exact = spr3::detail::limb_lengths(g, pose.translation, pose.rotation);
    const JointLengths simplified = inverse_kinematics_simplified(g, c.z, pose.rotation);
    Lemma1Result out;
    for (std::size_t i = 0; i < 3; ++i) {
        out.lhs[i] = std::abs(exact[i] - simplified[i]);
    }
    out.rhs = std::sqrt(2.0) * std::max(std::abs(pose.parasitic.x), std::abs(pose.parasitic.y));
    return out;
}

// ---------------------------------------------------------------------------
// Lemma 4: |dLambda_3/dZ| <= ||l~ - l||_1

struct GradientBound {
    double lhs = 0.0;  // |dLambda_3/dZ|
    double rhs = 0.0;  // ||l~ - l||_1
};

inline GradientBound gradient_bound_check(const ManipulatorGeometry& g, const JointLengths& theta,
                                          double z_hat, const Mat3<double>& rotation) {
    const JointLengths lt = inverse_kinematics_simplified(g, z_hat, rotation);
    GradientBound out;
    out.lhs = std::abs(gradient_z(g, theta, z_hat, rotation));
    for (std::size_t i = 0; i < 3; ++i) {
        out.rhs += std::abs(lt[i] - theta[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Epsilon terms and the gradient expansion

struct EpsilonTerms {
    std::array<double, 3> eps1{}, eps2{}, eps3{}, eps4{};
    std::array<double, 3> denominator{};  // l~_i + l_i
};

/// Scaled effect of the neglected translation and the rotation error on each limb.
///
/// With u = (R_hat - I) a_i, v = (R - I) a_i and s = l~_i + l_i:
///   eps1 = (Z_hat + Z + 2 u.z) / s - 1
///   eps2 = (u.u - v.v) / s
///   eps3 = 2 Z [(R_hat - R) a_i].z / s
///   eps4 = -(X^2 + Y^2 + 2 [X Y 0] v) / s
/// so that l~_i - l_i = (1 + eps1)(Z_hat - Z) + eps2 + eps3 + eps4 exactly.
inline EpsilonTerms epsilon_terms(const ManipulatorGeometry& g, const FullPose& truth,
                                  const Mat3<double>& estimated_rotation, double z_hat) {
    const auto a = g.base_joints();
    const JointLengths l = spr3::detail::limb_lengths(g, truth.translation, truth.rotation);
    const JointLengths lt = inverse_kinematics_simplified(g, z_hat, estimated_rotation);
    const double x = truth.parasitic.x, y = truth.parasitic.y, z = truth.config.z;
    const Mat3<double> id = Mat3<double>::identity();

    EpsilonTerms e;
    for (std::size_t i = 0; i < 3; ++i) {
        const double s = lt[i] + l[i];
        if (!(s > 1e-9)) {
            throw KinematicsError(ErrorCode::DegeneratePose,
                                  "l~ + l vanishes on limb " + std::to_string(i + 1));
        }
        const Vec3<double> u = (estimated_rotation - id) * a[i];
        const Vec3<double> v = (truth.rotation - id) * a[i];
        const Vec3<double> w = (estimated_rotation - truth.rotation) * a[i];
        e.denominator[i] = s;
        e.eps1[i] = (z_hat + z + 2.0 * u.z()) / s - 1.0;
        e.eps2[i] = (dot(u, u) - dot(v, v)) / s;
        e.eps3[i] = 2.0 * z * w.z() / s;
        e.eps4[i] = -(x * x + y * y + 2.0 * (x * v.x() + y * v.y())) / s;
    }
    return e;
}

/// sum ((1 + eps1)(Z_hat - Z) + eps2 + eps3 + eps4) dl~_i/dZ; equals gradient_z.
inline double gradient_expansion(const ManipulatorGeometry& g, const FullPose& truth,
                                 const Mat3<double>& estimated_rotation, double z_hat) {
    const EpsilonTerms e = epsilon_terms(g, truth, estimated_rotation, z_hat);
    const double ez = z_hat - truth.config.z;
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double dl = dlt_dz(g, z_hat, estimated_rotation, i);
        sum += ((1.0 + e.eps1[i]) * ez + e.eps2[i] + e.eps3[i] + e.eps4[i]) * dl;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Theorem 1 envelope

struct TheoremBound {
    double c1 = 0.0;         // max over the trace of sum |1 + eps1_i|
    double c2 = 0.0;         // max over the trace of sum |eps2_i| + |eps3_i| + |eps4_i|
    double ratio = 0.0;      // max over the trace of |c2 / c1|
    double delta = 0.0;      // max over the trace of |1 - eta sum (1 + eps1_i) dl~_i/dZ|
    double eta = 0.0;
    int iterations = 0;
    double initial_error = 0.0;  // |Z_0 - Z|
    bool step_condition = true;  // eta < 1/c1, the hypothesis under which delta < 1

    /// max|c2/c1| + delta^(N-1) |Z_0 - Z|
    double envelope(int n, double initial_err) const {
        return ratio + std::pow(delta, n - 1) * initial_err;
    }
    double envelope() const { return envelope(iterations, initial_error); }
};

/// Evaluates c1, c2 and delta along a gradient-solver trace against the true pose.
/// Throws StepTooLarge when eta >= 1 / c1, unless require_step_condition is
/// false, in which case the quantities are returned with step_condition unset.
inline TheoremBound theorem1_bound(const ManipulatorGeometry& g, const FullPose& truth,
                                   const FkSolution& sol, double eta,
                                   bool require_step_condition = true) {
    if (sol.trace.empty()) {
        throw KinematicsError(ErrorCode::InvalidArgument, "empty gradient-solver trace");
    }
    TheoremBound b;
    b.eta = eta;
    b.iterations = static_cast<int>(sol.trace.size());
    b.initial_error = std::abs(sol.z_init - truth.config.z);
    for (const IterationRecord& rec : sol.trace) {
        const Mat3<double> r_hat = rotation_matrix(rec.alpha, rec.beta, rec.gamma);
        const EpsilonTerms e = epsilon_terms(g, truth, r_hat, rec.z);
        double c1 = 0.0, c2 = 0.0, slope = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            c1 += std::abs(1.0 + e.eps1[i]);
            c2 += std::abs(e.eps2[i]) + std::abs(e.eps3[i]) + std::abs(e.eps4[i]);
            slope += (1.0 + e.eps1[i]) * dlt_dz(g, rec.z, r_hat, i);
        }
        b.c1 = std::max(b.c1, c1);
        b.c2 = std::max(b.c2, c2);
        b.ratio = std::max(b.ratio, std::abs(c2 / c1));
        b.delta = std::max(b.delta, std::abs(1.0 - eta * slope));
    }
    b.step_condition = eta < 1.0 / b.c1;
    if (!b.step_condition && require_step_condition) {
        throw KinematicsError(ErrorCode::StepTooLarge,
                              "eta = " + std::to_string(eta) + " >= 1/c1 = " +
                                  std::to_string(1.0 / b.c1));
    }
    return b;
}

// ---------------------------------------------------------------------------
// Lemma 2: roll and pitch as functions of the platform translation

/// Pitch solving the limb-1 relation with yaw neglected:
/// (2a^2 - 2aX) cos b + 2aZ sin b = 2a^2 - 2aX + X^2 + Y^2 + Z^2 - l1^2.
/// Reduces to the pitch estimator at X = Y = 0. Empty when no real solution exists.
inline std::optional<double> pitch_from_translation(const ManipulatorGeometry& g, double l1,
                                                    double x, double y, double z) {
    const double a = g.d1;
    const double p = 2.0 * a * a - 2.0 * a * x;
    const double q = 2.0 * a * z;
    const double rhs = p + x * x + y * y + z * z - l1 * l1;
    const double arg = rhs / std::hypot(p, q);
    if (std::abs(arg) > 1.0 + kArgumentSlack) {
        return std::nullopt;
    }
    return std::atan2(q, p) - std::acos(std::clamp(arg, -1.0, 1.0));
}

/// Roll solving the rear-limb relation Y cos a + K sin a = (l2^2 - l3^2)/4c + Y with
/// K = Z cos b + (X + b) sin b. The root is the one that reduces to the roll
/// estimator at X = Y = 0.
inline std::optional<double> roll_from_translation(const ManipulatorGeometry& g, double l2,
                                                   double l3, double x, double y, double z,
                                                   double beta) {
    const double k = z * std::cos(beta) + (x + g.d2) * std::sin(beta);
    const double r = std::hypot(y, k);
    if (r < 1e-12) {
        return std::nullopt;
    }
    const double q = (l2 * l2 - l3 * l3) / (4.0 * g.d3);
    const double arg = (q + y) / r;
    if (std::abs(arg) > 1.0 + kArgumentSlack) {
        return std::nullopt;
    }
    const double phi = std::atan2(k, y);
    const double kappa = std::acos(std::clamp(arg, -1.0, 1.0));
    return k >= 0.0 ? phi - kappa : phi + kappa;
}

/// Psi_1 (roll) and Psi_2 (pitch) at translation (X, Y, Z) for fixed joint lengths.
struct PsiValues {
    double roll = 0.0;
    double pitch = 0.0;
};

inline std::optional<PsiValues> psi(const ManipulatorGeometry& g, const JointLengths& theta,
                                    double x, double y, double z) {
    const auto pitch = pitch_from_translation(g, theta[0], x, y, z);
    if (!pitch) {
        return std::nullopt;
    }
    const auto roll = roll_from_translation(g, theta[1], theta[2], x, y, z, *pitch);
    if (!roll) {
        return std::nullopt;
    }
    return PsiValues{*roll, *pitch};
}

struct PsiGradientNorms {
    double roll = 0.0;
    double pitch = 0.0;
};

/// Central-difference gradient magnitudes of Psi_1 and Psi_2 over (X, Y, Z).
inline std::optional<PsiGradientNorms> psi_gradient_norms(const ManipulatorGeometry& g,
                                                          const JointLengths& theta,
                                                          const Vec3<double>& point,
                                                          double h = 1e-4) {
    std::array<double, 3> gr{}, gp{};
    for (std::size_t k = 0; k < 3; ++k) {
        Vec3<double> pp = point, pm = point;
        pp[k] += h;
        pm[k] -= h;
        const auto vp = psi(g, theta, pp[0], pp[1], pp[2]);
        const auto vm = psi(g, theta, pm[0], pm[1], pm[2]);
        if (!vp || !vm) {
            return std::nullopt;
        }
        gr[k] = (vp->roll - vm->roll) / (2.0 * h);
        gp[k] = (vp->pitch - vm->pitch) / (2.0 * h);
    }
    return PsiGradientNorms{std::hypot(gr[0], gr[1], gr[2]), std::hypot(gp[0], gp[1], gp[2])};
}

/// Sampling region for the Lipschitz estimate: joint lengths come from
/// configurations in `box`; evaluation points have (X, Y) in the disc of
/// radius rho and Z within z_window of the configuration's heave.
struct LipschitzRegion {
    double z_min = 0.0, z_max = 100.0;
    double alpha_min = -deg_to_rad(3.5), alpha_max = deg_to_rad(3.5);
    double beta_min = -deg_to_rad(1.5), beta_max = deg_to_rad(1.5);
    double rho = 8.0;
    double z_window = 10.0;
};

struct LipschitzEstimate {
    double l1 = 0.0;  // roll
    double l2 = 0.0;  // pitch
    std::size_t samples = 0;
    std::size_t evaluated = 0;  // samples where both Psi were defined
    bool lower_bound = true;    // sampled maxima never exceed the true suprema
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic per-index generator: the i-th draw of stream `stream` only
/// depends on (seed, stream, i), so sample sets nest as counts grow.
inline std::mt19937_64 indexed_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    return std::mt19937_64(
        detail::splitmix64(detail::splitmix64(seed ^ (stream * 0x5851F42D4C957F2DULL)) + i));
}

/// Monte Carlo estimate of L1 = max |grad Psi_1| and L2 = max |grad Psi_2|.
///
/// Every sample is polished by ten projected gradient-ascent steps on the
/// gradient magnitude, so the estimate is monotone in the sample count.
inline LipschitzEstimate lipschitz_estimate(const ManipulatorGeometry& g,
                                            const LipschitzRegion& region, std::size_t samples,
                                            std::uint64_t seed = 7) {
    LipschitzEstimate est;
    est.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        auto rng = indexed_rng(seed, 101, i);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const WorkspaceConfig cfg{
            region.z_min + (region.z_max - region.z_min) * unit(rng),
            region.alpha_min + (region.alpha_max - region.alpha_min) * unit(rng),
            region.beta_min + (region.beta_max - region.beta_min) * unit(rng)};
        const double radius = region.rho * std::sqrt(unit(rng));
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        const double dz = region.z_window * (2.0 * unit(rng) - 1.0);

        JointLengths theta;
        try {
            theta = inverse_kinematics_exact(g, cfg);
        } catch (const KinematicsError&) {
            continue;
        }

        auto project = [&](Vec3<double> p) {
            const double r = std::hypot(p[0], p[1]);
            if (r > region.rho) {
                const double s = r > 0.0 ? region.rho / r : 0.0;
                p[0] *= s;
                p[1] *= s;
            }
            p[2] = std::clamp(p[2], cfg.z - region.z_window, cfg.z + region.z_window);
            return p;
        };

        const Vec3<double> start{radius * std::cos(angle), radius * std::sin(angle), cfg.z + dz};
        const auto base = psi_gradient_norms(g, theta, start);
        if (!base) {
            continue;
        }
        ++est.evaluated;

        for (int which = 0; which < 2; ++which) {
            auto value = [&](const Vec3<double>& p) -> std::optional<double> {
                const auto n = psi_gradient_norms(g, theta, p);
                if (!n) {
                    return std::nullopt;
                }
                return which == 0 ? n->roll : n->pitch;
            };
            Vec3<double> p = start;
            double best = which == 0 ? base->roll : base->pitch;
            double step = 0.25 * std::max({region.rho, region.z_window, 1e-3});
            for (int polish = 0; polish < 10 && step > 0.0; ++polish) {
                // Ascent direction from a central difference of the gradient magnitude.
                Vec3<double> dir;
                bool ok = true;
                const double hh = 1e-3;
                for (std::size_t k = 0; k < 3 && ok; ++k) {
                    Vec3<double> pp = p, pm = p;
                    pp[k] += hh;
                    pm[k] -= hh;
                    const auto fp = value(pp);
                    const auto fm = value(pm);
                    if (!fp || !fm) {
                        ok = false;
                        break;
                    }
                    dir[k] = *fp - *fm;
                }
                const double len = ok ? norm(dir) : 0.0;
                if (!(len > 0.0)) {
                    break;
                }
                const Vec3<double> trial = project(p + (step / len) * dir);
                const auto f = value(trial);
                if (f && *f > best) {
                    best = *f;
                    p = trial;
                } else {
                    step *= 0.5;
                }
            }
            if (which == 0) {
                est.l1 = std::max(est.l1, best);
            } else {
                est.l2 = std::max(est.l2, best);
            }
        }
    }
    return est;
}

/// True when the pitch estimator's root matches the pose: the estimator takes
/// the root below lambda = atan2(2aZ, 2a^2 - 2aX), the other root describes the
/// mirrored front limb (front revolute joint below the base plane).
inline bool pitch_root_matches(const ManipulatorGeometry& g, const FullPose& truth) {
    const double a = g.d1;
    const double lambda = std::atan2(2.0 * a * truth.config.z,
                                     2.0 * a * a - 2.0 * a * truth.parasitic.x);
    return truth.config.beta <= lambda;
}

/// Lemma 2 check: |alpha - alpha_hat| <= L1 (sqrt(2) mu + |e_z|), same for pitch with L2.
struct Lemma2Result {
    double roll_error = 0.0;
    double pitch_error = 0.0;
    double roll_bound = 0.0;
    double pitch_bound = 0.0;

    bool holds() const { return roll_error <= roll_bound && pitch_error <= pitch_bound; }
};

inline Lemma2Result lemma2_check(const FullPose& truth, double alpha_hat, double beta_hat,
                                 double z_hat, double l1, double l2) {
    const double mu = std::max(std::abs(truth.parasitic.x), std::abs(truth.parasitic.y));
    const double reach = std::sqrt(2.0) * mu + std::abs(truth.config.z - z_hat);
    return {std::abs(truth.config.alpha - alpha_hat), std::abs(truth.config.beta - beta_hat),
            l1 * reach, l2 * reach};
}

/// Largest horizontal parasitic offset sqrt(X^2 + Y^2) on a grid over the box.
inline double parasitic_radius(const ManipulatorGeometry& g, const LipschitzRegion& box,
                               int resolution = 40) {
    double rho = 0.0;
    for (int i = 0; i <= resolution; ++i) {
        for (int j = 0; j <= resolution; ++j) {
            for (int k = 0; k <= resolution; ++k) {
                const WorkspaceConfig c{
                    box.z_min + (box.z_max - box.z_min) * i / resolution,
                    box.alpha_min + (box.alpha_max - box.alpha_min) * j / resolution,
                    box.beta_min + (box.beta_max - box.beta_min) * k / resolution};
                const auto p = parasitic_motions(g, c);
                rho = std::max(rho, std::hypot(p.x, p.y));
            }
        }
    }
    return rho;
}

}  // namespace spr3::bounds

#endif  // SPR3_BOUNDS_HPP
