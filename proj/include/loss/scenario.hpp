#pragma once

#include "loss/config.hpp"
#include "loss/physics.hpp"
#include "loss/pml.hpp"
#include "loss/solver.hpp"

#include <array>
#include <string>
#include <vector>

namespace loss {

enum class Model { acoustic2d, elastic3d };

/// Gaussian initial pressure amplitude * exp(-a |x - center|^2) (2-D only).
struct InitialPulse {
    bool enabled = false;
    double amplitude = 1.0;
    double a = 5.0;
    std::array<double, 3> center{0, 0, 0};
};

struct Scenario {
    Model model = Model::acoustic2d;
    std::string units = "m,s";
    std::array<int, 3> intervals{64, 0, 64}; // physical domain; y = 0 in 2-D
    std::array<double, 3> lo{-5, 0, -5}, hi{5, 0, 5};
    std::array<int, 3> patches{1, 1, 1};
    int n_nb = 20;
    MaterialModel material;
    SourceModel source;
    InitialPulse initial;
    bool pml_enabled = false;
    PmlParams pml;
    UpdateMode update = UpdateMode::pml_aware;
    double dt = 1e-4;
    double t_end = 0.0;
    std::vector<double> output_times;
    std::vector<std::string> output_fields{"v3"};
    double oracle_extent = 0.0; // 0: same as the domain
    int oracle_n = 64;
    int nan_check_every = 10;

    int dim() const { return model == Model::acoustic2d ? 2 : 3; }
    bool axis_used(int a) const { return !(model == Model::acoustic2d && a == 1); }
    double spacing(int a) const { return (hi[a] - lo[a]) / intervals[a]; }
    std::vector<std::string> field_names() const;
};

const std::vector<KeySpec>& scenario_schema();

Config parse_scenario_config(const std::string& text, const std::string& source = "config");
Config load_scenario_config(const std::string& path);
Scenario scenario_from_config(const Config& c);

} // namespace loss
