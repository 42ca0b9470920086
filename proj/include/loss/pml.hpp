#pragma once

#include "loss/array3.hpp"
#include "loss/layout.hpp"
#include "loss/spline.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <vector>

namespace loss {

struct PmlParams {
    int cells = 50;      // layer thickness in grid cells
    double r = 1e-6;     // theoretical reflection coefficient
    double k_max = 1.0;
    double f0 = 1.0;     // alpha_max = pi * f0
    double m = 1.0;      // exponent of the k law
    double p_exp = 1.0;  // exponent of the alpha law
};

/// d, k, alpha over the knots of one axis.
struct AxisProfile {
    int n = 0;      // intervals
    int cells = 0;  // 0 means no layer on this axis
    double d0 = 0.0;
    double alpha_max = 0.0;
    std::vector<double> d, k, alpha;

    bool in_layer(int i) const { return cells > 0 && (i <= cells || i >= n - cells); }
};

struct PmlProfile {
    PmlParams params;
    std::array<AxisProfile, 3> axis; // unused axes have cells = 0
};

AxisProfile build_axis_profile(const Grid1D& grid, const PmlParams& params, double c_pmax);
/// Layer on x (axis 0) and z (axis 2) of a 2-D grid.
PmlProfile build_profile(const Grid1D& gx, const Grid1D& gz, const PmlParams& params, double c_pmax);
/// Profile with layer bookkeeping but d = 0, k = 1, alpha = 0 everywhere.
PmlProfile zeroed_profile(const PmlProfile& like);

void write_profile(std::ostream& os, const AxisProfile& p);

double exp_euler_memory_update(double psi, double g, double d, double k, double alpha, double dt);

/// Time integral of (g/k + psi) over one exact-flow step; the limit form away from layers.
inline double flow_increment(double g, double psi_old, double psi_new, double d, double k, double alpha, double dt)
{
    const double den = d + alpha * k;
    if (den == 0.0)
        return dt * (1.0 / k) * g;
    return dt * (alpha / den) * g - (k / den) * (psi_new - psi_old);
}

double exact_flow_velocity_update(double v, double psi_old, double psi_new, double g, double rho, double d, double k,
                                  double alpha, double dt);

inline double plain_velocity_update(double v, double g, double rho, double dt) { return v - dt * g / rho; }

/// Memory variables of one patch for one axis, stored only on layer knots.
struct MemorySlab {
    int axis = 0;
    int begin = 0, end = 0; // local index range along axis, end exclusive
    Array3 psi, phi;
};

/// Memory fields for every patch. slab_index[q][a][i] gives the slab holding local index i
/// along axis a of patch q, or -1.
struct PmlState {
    std::vector<std::vector<MemorySlab>> slabs;
    std::vector<std::array<std::vector<int>, 3>> slab_index;

    std::size_t stored_values() const;
};

PmlState make_pml_state(const PatchLayout3D& layout, const PmlProfile& profile);

} // namespace loss
