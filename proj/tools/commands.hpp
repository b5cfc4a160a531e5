#pragma once

#include <cstdint>
#include <string>

namespace qcl::cli {

enum ExitCode { kOk = 0, kMismatch = 2, kExtinction = 3, kUsage = 64 };

struct Common {
    std::string out = "qcl_out";
    bool svg = false;
    double mass = 1.0;
    double hbar = 1.0;
};

struct RectangleConfig {
    double left = 0.0;
    double right = 1.0;
    double t = 1.0;
    std::string window = "1e2:1e4";
    std::size_t ppd = 400;
    std::size_t curve_ppd = 50;
};

struct PolygonConfig {
    std::string shape = "ramp";
    std::string samples;
    double a = 1.0;
    std::size_t n_segments = 32;
    std::uint64_t seed = 0;
    bool vanishing = false;
    double dt = 1e-3;
    std::string window = "1e2:1e4";
    std::size_t ppd = 200;
    std::size_t compare_points = 5;
    double tol = 1e-10;
};

struct ZenoConfig {
    double a = 1.0;
    double horizon = 0.5;
    double taper_width = -1.0;  ///< negative: a / 8
    std::string mode = "both";
    double dt = 0.0;  ///< 0: run the ladder
    std::size_t ladder_min = 8;
    std::size_t ladder_max = 256;
    double padding = 64.0;
    double cells_per_a = 2048.0;
};

struct PotentialConfig {
    std::string potential = "gaussian";
    double amplitude = 1.0;
    std::string convention = "conventional";
    std::string shape = "ramp";
    double a = 1.0;
    std::size_t n_segments = 8;
    std::uint64_t seed = 0;
    double dt = 0.1;
    std::string window = "1e2:1e4";
    std::size_t ppd = 100;
    double tol = 1e-10;
};

struct FresnelConfig {
    double x_max = 1e4;
    std::size_t per_decade = 4;
};

struct MomentsConfig {
    std::string source = "position";
    std::string shape = "rectangle";
    double a = 1.0;
    std::size_t n_segments = 32;
    std::uint64_t seed = 0;
    double dt = 0.1;
    double delta = 0.0;    ///< 0: automatic
    double b_max = 1e4;
    double decades = 0.0;  ///< 0: 3 for position, 2 for momentum
    std::size_t cutoffs_per_decade = 8;
    std::string speed_cutoffs = "1e2,1e3";
    double speed_threshold = 0.0;  ///< 0: no comparison
};

int cmd_rectangle(const Common& c, const RectangleConfig& cfg);
int cmd_polygon(const Common& c, const PolygonConfig& cfg);
int cmd_zeno(const Common& c, const ZenoConfig& cfg);
int cmd_potential(const Common& c, const PotentialConfig& cfg);
int cmd_fresnel_check(const Common& c, const FresnelConfig& cfg);
int cmd_moments(const Common& c, const MomentsConfig& cfg);

}  // namespace qcl::cli
