#ifndef SPR3_CONFIG_HPP
#define SPR3_CONFIG_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spr3/errors.hpp"
#include "spr3/fk_gradient.hpp"
#include "spr3/geometry.hpp"
#include "spr3/trajectory.hpp"

namespace spr3 {

/// Settings read from a JSON file:
///   {"geometry": {"d1", "d2", "d3"},
///    "solver": {"eta", "iters", "include_gamma_hat"},
///    "trajectory": {"duration", "rate", "f_pitch"}}
/// Every key is optional. Command-line flags are applied afterwards and win.
struct RunConfig {
    ManipulatorGeometry geometry = ManipulatorGeometry::reference();
    double eta = 0.08;
    int iters = 6;
    bool include_gamma_hat = true;
    TrajectorySpec trajectory;

    FkSettings fk_settings() const {
        FkSettings s;
        s.eta = eta;
        s.max_iters = iters;
        s.include_gamma_hat = include_gamma_hat;
        return s;
    }
};

inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
    auto get = [](const nlohmann::json& obj, const char* key, auto& dst) {
        if (obj.contains(key)) {
            dst = obj.at(key).get<std::decay_t<decltype(dst)>>();
        }
    };
    try {
        if (j.contains("geometry")) {
            const auto& g = j.at("geometry");
            get(g, "d1", cfg.geometry.d1);
            get(g, "d2", cfg.geometry.d2);
            get(g, "d3", cfg.geometry.d3);
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            get(s, "eta", cfg.eta);
            get(s, "iters", cfg.iters);
            get(s, "include_gamma_hat", cfg.include_gamma_hat);
        }
        if (j.contains("trajectory")) {
            const auto& t = j.at("trajectory");
            get(t, "duration", cfg.trajectory.duration);
            get(t, "rate", cfg.trajectory.sample_rate);
            get(t, "f_pitch", cfg.trajectory.f_pitch);
        }
    } catch (const nlohmann::json::exception& e) {
        throw KinematicsError(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
    }
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw KinematicsError(ErrorCode::InvalidArgument, "cannot open config " + path);
    }
    RunConfig cfg;
    try {
        apply_json(cfg, nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw KinematicsError(ErrorCode::InvalidArgument, "config " + path + ": " + e.what());
    }
    return cfg;
}

}  // namespace spr3

#endif  // SPR3_CONFIG_HPP
