#pragma once
// Run configuration: one JSON document with a flat section per module.

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "toalab/classical.hpp"
#include "toalab/kernel.hpp"
#include "toalab/spectral.hpp"

namespace toalab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericsConfig {
    double box_lo = -12.0;
    double box_hi = 1.5;
    double grid_h = 0.005;
    int grid_n = 0;  // overrides grid_h when > 0
    int gregory_order = 4;
    int quad_order = 10;
    double tolerance = 1e-9;
    int r_max = 4;
    CutSide branch = CutSide::below;
    Frame frame = Frame::launch;  // frame of the expectation integrals

    Box box() const { return {box_lo, box_hi}; }
    int n() const;
};

struct TauGridConfig {
    double start = 0.0, stop = 0.5;
    int count = 2001;
    bool set = false;
    std::vector<double> grid() const;
};

struct EvolveConfig {
    std::vector<double> times;
    double pad = 8.0;
    double grid_h = 0.01;
    bool quadrature = false;  // also run the propagator quadrature at sample points
};

struct SpectrumConfig {
    std::vector<double> eigenfunctions;  // export eigenfunctions nearest to these taus
    bool classify = true;
    double window = 0.05;  // unitary-arrival window half-width
    int time_points = 40;
    int classify_count = 20;  // smallest |tau| eigenvectors to tag
};

struct SweepConfig {
    std::vector<double> mu, ratio, v0, sigma2, q0;
    bool distributions = true;
    bool set = false;  // section present; missing axes take the base values
};

struct RunConfig {
    std::string experiment;
    PhysicalParams params;
    WavepacketSpec state;
    NumericsConfig numerics;
    TauGridConfig tau_grid;
    EvolveConfig evolve;
    SpectrumConfig spectrum;
    SweepConfig sweep;
    int threads = 1;
};

// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
void validate(const RunConfig& c);

}  // namespace toalab
