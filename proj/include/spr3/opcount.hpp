#ifndef SPR3_OPCOUNT_HPP
#define SPR3_OPCOUNT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "spr3/fk_gradient.hpp"
#include "spr3/fk_jacobian.hpp"
#include "spr3/geometry.hpp"

namespace spr3::opcount {

struct OpCounts {
    std::uint64_t adds = 0;             // additions and subtractions
    std::uint64_t muls = 0;             // multiplications and divisions
    std::uint64_t transcendentals = 0;  // sin cos asin acos atan atan2 sqrt

    std::uint64_t total() const { return adds + muls + transcendentals; }
    bool operator==(const OpCounts&) const = default;
};

namespace detail {
inline thread_local OpCounts* active = nullptr;
}

/// Routes counts from CountingScalar arithmetic on this thread into `counts`
/// for the lifetime of the session. Sessions nest; the previous target is restored.
class CountingSession {
public:
    CountingSession() : previous_(detail::active) { detail::active = &counts_; }
    ~CountingSession() { detail::active = previous_; }
    CountingSession(const CountingSession&) = delete;
    CountingSession& operator=(const CountingSession&) = delete;

    const OpCounts& counts() const { return counts_; }

private:
    OpCounts counts_;
    OpCounts* previous_;
};

/// double wrapper that tallies its arithmetic. Negation and construction are free.
struct CountingScalar {
    double v = 0.0;

    CountingScalar() = default;
    CountingScalar(double x) : v(x) {}  // NOLINT: implicit so literals mix in

    static void add() {
        if (detail::active) ++detail::active->adds;
    }
    static void mul() {
        if (detail::active) ++detail::active->muls;
    }
    static void trans() {
        if (detail::active) ++detail::active->transcendentals;
    }

    friend double value_of(const CountingScalar& x) { return x.v; }

    friend CountingScalar operator+(const CountingScalar& a, const CountingScalar& b) {
        add();
        return a.v + b.v;
    }
    friend CountingScalar operator-(const CountingScalar& a, const CountingScalar& b) {
        add();
        return a.v - b.v;
    }
    friend CountingScalar operator*(const CountingScalar& a, const CountingScalar& b) {
        mul();
        return a.v * b.v;
    }
    friend CountingScalar operator/(const CountingScalar& a, const CountingScalar& b) {
        mul();
        return a.v / b.v;
    }
    friend CountingScalar operator-(const CountingScalar& a) { return -a.v; }

    friend CountingScalar sin(const CountingScalar& x) {
        trans();
        return std::sin(x.v);
    }
    friend CountingScalar cos(const CountingScalar& x) {
        trans();
        return std::cos(x.v);
    }
    friend CountingScalar asin(const CountingScalar& x) {
        trans();
        return std::asin(x.v);
    }
    friend CountingScalar acos(const CountingScalar& x) {
        trans();
        return std::acos(x.v);
    }
    friend CountingScalar atan(const CountingScalar& x) {
        trans();
        return std::atan(x.v);
    }
    friend CountingScalar atan2(const CountingScalar& y, const CountingScalar& x) {
        trans();
        return std::atan2(y.v, x.v);
    }
    friend CountingScalar sqrt(const CountingScalar& x) {
        trans();
        return std::sqrt(x.v);
    }
};

using CS = CountingScalar;

enum class Target { GradientIteration, JbStep, ExactIk, SimplifiedIk, Parasitic };

inline const char* to_string(Target t) {
    switch (t) {
        case Target::GradientIteration: return "gradient_iteration";
        case Target::JbStep: return "jb_step";
        case Target::ExactIk: return "exact_ik";
        case Target::SimplifiedIk: return "simplified_ik";
        case Target::Parasitic: return "parasitic";
    }
    return "unknown";
}

inline const std::vector<Target>& all_targets() {
    static const std::vector<Target> t{Target::GradientIteration, Target::JbStep,
                                       Target::ExactIk, Target::SimplifiedIk,
                                       Target::Parasitic};
    return t;
}

/// Representative mid-workspace pose used when none is given.
inline WorkspaceConfig representative_pose() {
    return {50.0, deg_to_rad(1.5), deg_to_rad(0.5)};
}

inline BasicWorkspaceConfig<CS> lift(const WorkspaceConfig& c) { return {c.z, c.alpha, c.beta}; }

inline BasicJointLengths<CS> lift(const JointLengths& l) {
    return {{CS(l[0]), CS(l[1]), CS(l[2])}};
}

/// Runs one target at `pose` with counting scalars and returns the tally.
///
/// gradient_iteration: pitch, roll, yaw, R_hat, simplified IK and the heave
///   update at Z_hat = Z - 5 mm against the exact joint lengths of `pose`.
/// jb_step: the finite-difference Jacobian (six exact-IK calls), the 3x3
///   solve and the update, linearised at `pose` toward a sample 10 ms later.
/// simplified_ik: the rotation with zero yaw plus the three limb norms.
inline OpCounts count_ops(Target target, const ManipulatorGeometry& g,
                          const WorkspaceConfig& pose = representative_pose()) {
    const JointLengths theta = inverse_kinematics_exact(g, pose);
    CountingSession session;
    switch (target) {
        case Target::GradientIteration: {
            FkSettings s;
            s.clamp_infeasible = true;
            (void)gradient_step(g, lift(theta), CS(pose.z - 5.0), s);
            break;
        }
        case Target::JbStep: {
            // Measured lengths come from outside the step; compute them uncounted.
            const WorkspaceConfig next{pose.z + 0.1, pose.alpha + 1e-4, pose.beta - 1e-4};
            JointLengths theta_next;
            {
                CountingSession discard;
                theta_next = inverse_kinematics_exact(g, next);
            }
            (void)jb_step(g, lift(theta_next), lift(pose), lift(theta), JbSettings{});
            break;
        }
        case Target::ExactIk:
            (void)inverse_kinematics_exact(g, lift(pose));
            break;
        case Target::SimplifiedIk: {
            const auto r = rotation_matrix(CS(pose.alpha), CS(pose.beta), CS(0.0));
            (void)inverse_kinematics_simplified(g, CS(pose.z), r);
            break;
        }
        case Target::Parasitic:
            (void)parasitic_motions(g, lift(pose));
            break;
    }
    return session.counts();
}

/// Reference counts for the analytic-Jacobian formulation, as published.
struct ReferenceCounts {
    std::uint64_t adds, muls, total;
};
inline constexpr ReferenceCounts kPublishedJb{1953, 11087, 13040};
inline constexpr ReferenceCounts kPublishedGradient{205, 199, 404};

struct OpReport {
    WorkspaceConfig pose;
    std::vector<std::pair<Target, OpCounts>> rows;

    const OpCounts& at(Target t) const {
        for (const auto& r : rows) {
            if (r.first == t) return r.second;
        }
        throw KinematicsError(ErrorCode::InvalidArgument, "target not in report");
    }

    double ratio() const {
        return static_cast<double>(at(Target::JbStep).total()) /
               static_cast<double>(at(Target::GradientIteration).total());
    }
};

inline OpReport make_report(const ManipulatorGeometry& g,
                            const WorkspaceConfig& pose = representative_pose()) {
    OpReport rep;
    rep.pose = pose;
    for (Target t : all_targets()) {
        rep.rows.emplace_back(t, count_ops(t, g, pose));
    }
    return rep;
}

inline nlohmann::ordered_json to_json(const OpReport& rep) {
    nlohmann::ordered_json j;
    j["pose"] = {{"z_mm", rep.pose.z},
                 {"alpha_deg", rad_to_deg(rep.pose.alpha)},
                 {"beta_deg", rad_to_deg(rep.pose.beta)}};
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [t, c] : rep.rows) {
        counts[to_string(t)] = {{"adds", c.adds},
                                {"muls", c.muls},
                                {"transcendentals", c.transcendentals},
                                {"total", c.total()}};
    }
    j["counts"] = counts;
    j["ratio_jb_over_gradient"] = rep.ratio();
    j["published"] = {
        {"jb", {{"adds", kPublishedJb.adds}, {"muls", kPublishedJb.muls},
                {"total", kPublishedJb.total}}},
        {"gradient_iteration", {{"adds", kPublishedGradient.adds},
                                {"muls", kPublishedGradient.muls},
                                {"total", kPublishedGradient.total}}},
        {"ratio", static_cast<double>(kPublishedJb.total) /
                      static_cast<double>(kPublishedGradient.total)}};
    j["jb_note"] = "central-difference Jacobian: 6 exact-IK calls + 3x3 solve";
    return j;
}

inline std::string format_table(const OpReport& rep) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %8s %8s %8s %8s   %s\n", "", "+-", "*/", "transc",
                  "total", "published (+-, */, total)");
    out += line;
    auto row = [&](const char* name, const OpCounts& c, const ReferenceCounts* ref) {
        char refbuf[64] = "";
        if (ref) {
            std::snprintf(refbuf, sizeof refbuf, "%llu, %llu, %llu",
                          static_cast<unsigned long long>(ref->adds),
                          static_cast<unsigned long long>(ref->muls),
                          static_cast<unsigned long long>(ref->total));
        }
        std::snprintf(line, sizeof line, "%-28s %8llu %8llu %8llu %8llu   %s\n", name,
                      static_cast<unsigned long long>(c.adds),
                      static_cast<unsigned long long>(c.muls),
                      static_cast<unsigned long long>(c.transcendentals),
                      static_cast<unsigned long long>(c.total()), refbuf);
        out += line;
    };
    row("JB method (one step)", rep.at(Target::JbStep), &kPublishedJb);
    row("Gradient (one iteration)", rep.at(Target::GradientIteration), &kPublishedGradient);
    row("exact IK", rep.at(Target::ExactIk), nullptr);
    row("simplified IK", rep.at(Target::SimplifiedIk), nullptr);
    row("parasitic motions", rep.at(Target::Parasitic), nullptr);
    std::snprintf(line, sizeof line, "ratio JB / gradient: %.2f (published %.2f)\n", rep.ratio(),
                  static_cast<double>(kPublishedJb.total) / kPublishedGradient.total);
    out += line;
    return out;
}

}  // namespace spr3::opcount

#endif  // SPR3_OPCOUNT_HPP
