#ifndef SPR3_PARASITIC_MAP_HPP
#define SPR3_PARASITIC_MAP_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "spr3/errors.hpp"
#include "spr3/geometry.hpp"

namespace spr3 {

struct ParasiticMapSpec {
    WorkspaceBox box;
    int resolution = 20;  // intervals per axis; Z = 0 is excluded
    int bins = 40;

    void validate() const {
        if (resolution < 1) {
            throw KinematicsError(ErrorCode::InvalidArgument, "resolution must be >= 1");
        }
        if (bins < 1) {
            throw KinematicsError(ErrorCode::InvalidArgument, "bins must be >= 1");
        }
        if (!(box.z_max > 0.0) || box.z_min > box.z_max || box.alpha_max < 0.0 ||
            box.beta_max < 0.0) {
            throw KinematicsError(ErrorCode::InvalidArgument, "invalid workspace box");
        }
    }
};

struct RatioStats {
    double max_abs = 0.0;
    double p99_abs = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<std::size_t> histogram;  // uniform bins over [min, max]
};

struct ParasiticMap {
    ParasiticMapSpec spec;
    std::size_t points = 0;
    RatioStats x_over_z;
    RatioStats y_over_z;
};

namespace detail {

inline RatioStats ratio_stats(std::vector<double> v, int bins) {
    RatioStats s;
    s.histogram.assign(static_cast<std::size_t>(bins), 0);
    if (v.empty()) {
        return s;
    }
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    const double width = (s.max - s.min) / bins;
    for (double r : v) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = std::min(static_cast<std::size_t>((r - s.min) / width),
                         static_cast<std::size_t>(bins - 1));
        }
        ++s.histogram[b];
    }
    for (double& r : v) {
        r = std::abs(r);
    }
    std::sort(v.begin(), v.end());
    s.max_abs = v.back();
    // Nearest-rank percentile.
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(v.size())));
    s.p99_abs = v[std::max<std::size_t>(rank, 1) - 1];
    return s;
}

}  // namespace detail

/// Parasitic-to-heave ratios X/Z and Y/Z on a regular grid over the workspace box.
inline ParasiticMap parasitic_map(const ManipulatorGeometry& g, const ParasiticMapSpec& spec) {
    g.validate();
    spec.validate();
    const int r = spec.resolution;
    std::vector<double> xs, ys;
    for (int i = 0; i <= r; ++i) {
        const double z = spec.box.z_min + (spec.box.z_max - spec.box.z_min) * i / r;
        if (!(z > 0.0)) {
            continue;
        }
        for (int j = 0; j <= r; ++j) {
            const double alpha = spec.box.alpha_max * (2.0 * j / r - 1.0);
            for (int k = 0; k <= r; ++k) {
                const double beta = spec.box.beta_max * (2.0 * k / r - 1.0);
                const ParasiticMotion p = parasitic_motions(g, WorkspaceConfig{z, alpha, beta});
                xs.push_back(p.x / z);
                ys.push_back(p.y / z);
            }
        }
    }
    ParasiticMap m;
    m.spec = spec;
    m.points = xs.size();
    m.x_over_z = detail::ratio_stats(std::move(xs), spec.bins);
    m.y_over_z = detail::ratio_stats(std::move(ys), spec.bins);
    return m;
}

/// Histogram CSV: one row per bin with both ratio series side by side.
inline std::string to_csv(const ParasiticMap& m) {
    std::string out = "bin,x_over_z_lo,x_over_z_hi,x_count,y_over_z_lo,y_over_z_hi,y_count\n";
    const int bins = m.spec.bins;
    const double wx = (m.x_over_z.max - m.x_over_z.min) / bins;
    const double wy = (m.y_over_z.max - m.y_over_z.min) / bins;
    char buf[256];
    for (int b = 0; b < bins; ++b) {
        std::snprintf(buf, sizeof buf, "%d,%.9e,%.9e,%zu,%.9e,%.9e,%zu\n", b,
                      m.x_over_z.min + b * wx, m.x_over_z.min + (b + 1) * wx,
                      m.x_over_z.histogram[static_cast<std::size_t>(b)],
                      m.y_over_z.min + b * wy, m.y_over_z.min + (b + 1) * wy,
                      m.y_over_z.histogram[static_cast<std::size_t>(b)]);
        out += buf;
    }
    return out;
}

inline nlohmann::ordered_json to_json(const ParasiticMap& m) {
    auto stats = [](const RatioStats& s) {
        return nlohmann::ordered_json{
            {"max_abs", s.max_abs}, {"p99_abs", s.p99_abs}, {"min", s.min}, {"max", s.max}};
    };
    return {{"resolution", m.spec.resolution},
            {"points", m.points},
            {"x_over_z", stats(m.x_over_z)},
            {"y_over_z", stats(m.y_over_z)}};
}

}  // namespace spr3

#endif  // SPR3_PARASITIC_MAP_HPP
