// Command-line harness for the 3SPR kinematics library: single-shot IK/FK,
// trajectory tracking, parasitic-ratio map, bound verification and op counts.
//
// Exit codes: 0 ok, 1 check failure or solver error, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spr3/spr3.hpp"

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::vector<double> geometry;
    std::string config_path;
    std::string out;
    std::optional<double> eta;
    std::optional<int> iters;
    std::optional<double> f_pitch;
    std::optional<double> rate;
    std::optional<double> duration;
    std::uint64_t seed = 2024;
    bool trace = false;
};

spr3::RunConfig resolve(const Common& c) {
    spr3::RunConfig cfg;
    if (!c.config_path.empty()) {
        cfg = spr3::load_config(c.config_path);
    }
    if (!c.geometry.empty()) {
        if (c.geometry.size() != 3) {
            throw UsageError("--geometry expects d1,d2,d3");
        }
        cfg.geometry = {c.geometry[0], c.geometry[1], c.geometry[2]};
    }
    if (c.eta) cfg.eta = *c.eta;
    if (c.iters) cfg.iters = *c.iters;
    if (c.f_pitch) cfg.trajectory.f_pitch = *c.f_pitch;
    if (c.rate) cfg.trajectory.sample_rate = *c.rate;
    if (c.duration) cfg.trajectory.duration = *c.duration;
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

int cmd_ik(const Common& c, const std::vector<double>& args) {
    const auto cfg = resolve(c);
    cfg.geometry.validate();
    const spr3::WorkspaceConfig wc{args[0], spr3::deg_to_rad(args[1]), spr3::deg_to_rad(args[2])};
    const auto pose = spr3::full_pose(cfg.geometry, wc);
    const auto l = spr3::inverse_kinematics_exact(cfg.geometry, wc);
    ordered_json j;
    j["l1"] = l[0];
    j["l2"] = l[1];
    j["l3"] = l[2];
    j["X"] = pose.parasitic.x;
    j["Y"] = pose.parasitic.y;
    j["gamma_deg"] = spr3::rad_to_deg(pose.parasitic.gamma);
    write_text(c.out, dump(j));
    return 0;
}

int cmd_fk(const Common& c, const std::vector<double>& args, std::optional<double> z_init) {
    const auto cfg = resolve(c);
    spr3::FkSettings s = cfg.fk_settings();
    s.z_init = z_init;
    const spr3::JointLengths theta{{args[0], args[1], args[2]}};
    const auto sol = spr3::solve_fk(cfg.geometry, theta, s);
    ordered_json j;
    j["Z"] = sol.z_hat;
    j["alpha_deg"] = spr3::rad_to_deg(sol.alpha_hat);
    j["beta_deg"] = spr3::rad_to_deg(sol.beta_hat);
    j["gamma_deg"] = spr3::rad_to_deg(sol.gamma_hat);
    j["iterations"] = sol.trace.size();
    j["z_init"] = sol.z_init;
    j["last_step_mm"] = sol.converged_step_norm;
    if (c.trace) {
        ordered_json tr = ordered_json::array();
        for (const auto& r : sol.trace) {
            tr.push_back({{"k", r.k},
                          {"Z", r.z},
                          {"alpha_deg", spr3::rad_to_deg(r.alpha)},
                          {"beta_deg", spr3::rad_to_deg(r.beta)},
                          {"gamma_deg", spr3::rad_to_deg(r.gamma)},
                          {"cost", r.cost},
                          {"gradient", r.gradient},
                          {"Z_next", r.z_next}});
        }
        j["trace"] = tr;
    }
    write_text(c.out, dump(j));
    return 0;
}

int cmd_trajectory(const Common& c, bool cold_start, const std::string& summary_path) {
    const auto cfg = resolve(c);
    spr3::TrajectoryOptions opt;
    opt.gradient = cfg.fk_settings();
    opt.gradient.clamp_infeasible = true;
    opt.warm_start = !cold_start;
    const auto run = spr3::run_trajectory(cfg.geometry, cfg.trajectory, opt);
    const auto summary = spr3::summarize(run);
    const std::string csv = spr3::to_csv(run);
    ordered_json j = spr3::to_json(cfg.trajectory, summary);
    j["iters"] = cfg.iters;
    j["eta"] = cfg.eta;
    j["warm_start"] = !cold_start;
    if (summary.out_of_box > 0) {
        std::fprintf(stderr, "warning: %zu samples outside the nominal workspace box\n",
                     summary.out_of_box);
    }
    if (c.out.empty() || c.out == "-") {
        write_text("-", csv);
        if (!summary_path.empty()) write_text(summary_path, dump(j));
    } else {
        write_text(c.out, csv);
        write_text(summary_path.empty() ? "-" : summary_path, dump(j));
    }
    return 0;
}

int cmd_parasitic_map(const Common& c, int resolution, int bins, const std::string& summary_path,
                      bool zero_slice) {
    const auto cfg = resolve(c);
    spr3::ParasiticMapSpec spec;
    spec.resolution = resolution;
    spec.bins = bins;
    if (zero_slice) {
        spec.box.alpha_max = 0.0;
        spec.box.beta_max = 0.0;
    }
    const auto map = spr3::parasitic_map(cfg.geometry, spec);
    const ordered_json j = spr3::to_json(map);
    if (c.out.empty() || c.out == "-") {
        write_text("-", spr3::to_csv(map));
        if (!summary_path.empty()) write_text(summary_path, dump(j));
    } else {
        write_text(c.out, spr3::to_csv(map));
        write_text(summary_path.empty() ? "-" : summary_path, dump(j));
    }
    return 0;
}

int cmd_verify(const Common& c, const spr3::verify::SweepCounts& counts, unsigned threads) {
    spr3::RunConfig cfg;
    // Geometry is checked by the sweep preconditions rather than rejected up front.
    if (!c.config_path.empty()) cfg = spr3::load_config(c.config_path);
    if (!c.geometry.empty()) {
        if (c.geometry.size() != 3) throw UsageError("--geometry expects d1,d2,d3");
        cfg.geometry = {c.geometry[0], c.geometry[1], c.geometry[2]};
    }
    spr3::verify::VerifyOptions opt;
    opt.seed = c.seed;
    opt.counts = counts;
    opt.threads = threads;
    if (c.eta) opt.eta = *c.eta;
    if (c.iters) opt.theorem_iters = *c.iters;
    const auto rep = spr3::verify::run(cfg.geometry, opt);
    write_text(c.out, dump(spr3::verify::to_json(rep)));
    if (!rep.passed()) {
        for (const auto& f : rep.precondition_failures) {
            std::fprintf(stderr, "precondition failed: %s\n", f.c_str());
        }
        for (const auto& chk : rep.checks) {
            for (const auto& v : chk.first_violations) {
                std::fprintf(stderr, "%s: sample %zu (Z=%.6f, alpha=%.6f deg, beta=%.6f deg): %s\n",
                             chk.name.c_str(), v.index, v.pose.z, spr3::rad_to_deg(v.pose.alpha),
                             spr3::rad_to_deg(v.pose.beta), v.detail.c_str());
            }
        }
        return 1;
    }
    return 0;
}

int cmd_opcount(const Common& c, const std::vector<double>& pose_args) {
    const auto cfg = resolve(c);
    cfg.geometry.validate();
    spr3::WorkspaceConfig pose = spr3::opcount::representative_pose();
    if (!pose_args.empty()) {
        if (pose_args.size() != 3) throw UsageError("--pose expects Z,alpha_deg,beta_deg");
        pose = {pose_args[0], spr3::deg_to_rad(pose_args[1]), spr3::deg_to_rad(pose_args[2])};
    }
    const auto rep = spr3::opcount::make_report(cfg.geometry, pose);
    std::fputs(spr3::opcount::format_table(rep).c_str(), stdout);
    if (!c.out.empty()) {
        write_text(c.out, dump(spr3::opcount::to_json(rep)));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3SPR manipulator kinematics bench"};
    app.require_subcommand(1);
    app.fallthrough();

    Common c;
    app.add_option("--geometry", c.geometry, "d1,d2,d3 in mm")->delimiter(',');
    app.add_option("--config", c.config_path, "JSON config; flags override it");
    app.add_option("--out", c.out, "output path ('-' for stdout)");
    app.add_option("--eta", c.eta, "gradient step size");
    app.add_option("--iters", c.iters, "gradient iterations per solve");
    app.add_option("--f-pitch", c.f_pitch, "pitch sinusoid frequency, Hz");
    app.add_option("--rate", c.rate, "trajectory sample rate, Hz");
    app.add_option("--duration", c.duration, "trajectory duration, s");
    app.add_option("--seed", c.seed, "random seed");
    app.add_flag("--trace", c.trace, "include the iteration trace");

    std::vector<double> ik_args;
    auto* ik = app.add_subcommand("ik", "exact IK and parasitic motions for Z [mm], alpha, beta [deg]");
    ik->add_option("pose", ik_args, "Z alpha_deg beta_deg")->expected(3)->required();

    std::vector<double> fk_args;
    std::optional<double> z_init;
    auto* fk = app.add_subcommand("fk", "gradient forward kinematics from l1 l2 l3 [mm]");
    fk->add_option("lengths", fk_args, "l1 l2 l3")->expected(3)->required();
    fk->add_option("--z-init", z_init, "initial heave; mean limb length when omitted");

    bool cold_start = false;
    std::string traj_summary;
    auto* traj = app.add_subcommand("trajectory", "track the test trajectory with both methods");
    traj->add_flag("--cold-start", cold_start, "restart the gradient method from the mean limb length");
    traj->add_option("--summary", traj_summary, "summary JSON path");

    int resolution = 20, bins = 40;
    bool zero_slice = false;
    std::string map_summary;
    auto* pmap = app.add_subcommand("parasitic-map", "X/Z and Y/Z ratio histogram over the workspace");
    pmap->add_option("--resolution", resolution, "grid intervals per axis")->check(CLI::PositiveNumber);
    pmap->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
    pmap->add_option("--summary", map_summary, "summary JSON path");
    pmap->add_flag("--zero-orientation", zero_slice, "restrict to the alpha = beta = 0 slice");

    spr3::verify::SweepCounts counts;
    std::optional<std::size_t> all_samples;
    unsigned threads = 0;
    auto* vb = app.add_subcommand("verify-bounds", "run the bound-verification sweeps");
    vb->add_option("--samples", all_samples, "set every sweep's sample count");
    vb->add_option("--oracle-samples", counts.oracle);
    vb->add_option("--lemma-samples", counts.lemma);
    vb->add_option("--gradient-samples", counts.gradient);
    vb->add_option("--expansion-samples", counts.expansion);
    vb->add_option("--theorem-samples", counts.theorem);
    vb->add_option("--lipschitz-samples", counts.lipschitz);
    vb->add_option("--threads", threads, "worker threads (0 = hardware)");

    std::vector<double> pose_args;
    auto* oc = app.add_subcommand("opcount", "elementary-operation counts, JB step vs gradient iteration");
    oc->add_option("--pose", pose_args, "Z,alpha_deg,beta_deg")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (ik->parsed()) return cmd_ik(c, ik_args);
        if (fk->parsed()) return cmd_fk(c, fk_args, z_init);
        if (traj->parsed()) return cmd_trajectory(c, cold_start, traj_summary);
        if (pmap->parsed()) return cmd_parasitic_map(c, resolution, bins, map_summary, zero_slice);
        if (vb->parsed()) {
            if (all_samples) counts = spr3::verify::SweepCounts::all(*all_samples);
            return cmd_verify(c, counts, threads);
        }
        if (oc->parsed()) return cmd_opcount(c, pose_args);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const spr3::KinematicsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == spr3::ErrorCode::InvalidArgument ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
