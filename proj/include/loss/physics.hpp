#pragma once

#include "loss/array3.hpp"
#include "loss/derivative.hpp"
#include "loss/layout.hpp"

#include <array>
#include <vector>

namespace loss {

/// Knot coordinates: coordinate of global knot i along axis a is min[a] + i*h[a].
struct Axes {
    std::array<double, 3> min{0, 0, 0};
    std::array<double, 3> h{1, 1, 1};
    std::array<int, 3> knots{1, 1, 1};

    double coord(int a, int i) const { return min[a] + i * h[a]; }
};

struct MaterialBox {
    std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
    double rho = 1, cp = 1, cs = 0;
};

/// Background medium plus axis-aligned boxes; later boxes win. Boxes are closed sets.
struct MaterialModel {
    double rho = 1, cp = 1, cs = 0;
    std::vector<MaterialBox> boxes;

    struct Props {
        double rho, cp, cs;
    };
    Props at(double x, double y, double z) const;
    double max_cp() const;
    void validate(bool elastic) const;
};

/// Ricker wavelet source with Gaussian spatial amplitude exp(-|x - x0|^2).
struct SourceModel {
    bool enabled = false;
    std::array<double, 3> center{0, 0, 0};
    double fp = 1.0;
    double delay = 0.0;
    std::array<bool, 3> targets{false, false, true}; // v1, v2, v3

    double amplitude(double x, double y, double z) const;
};

double ricker(double t, double fp, double delay);

std::array<double, 6> stress_from_strain(const std::array<double, 6>& eps, double rho, double cp, double cs);

/// Material sampled on a patched layout: density, rho*cp^2, rho*(cp^2 - 2cs^2), rho*cs^2.
struct MaterialFields {
    PatchedField rho, mp, lam, ms;
};

MaterialFields sample_material(const MaterialModel& m, const PatchLayout3D& layout, const Axes& axes);
PatchedField sample_source(const SourceModel& s, const PatchLayout3D& layout, const Axes& axes);

struct Wavefield2D {
    PatchedField v1, v3, sigma;
};

/// Strain components in the order 11, 22, 33, 12, 13, 23.
struct Wavefield3D {
    std::array<PatchedField, 3> v;
    std::array<PatchedField, 6> e;
};

/// {d sigma/dx, d sigma/dz, d v1/dx, d v3/dz}
std::array<PatchedField, 4> acoustic2d_gradients(const Wavefield2D& f, DerivativeProvider& d);

/// Strain rates in the order 11, 22, 33, 12, 13, 23. `tmp` is scratch.
void elastic3d_strain_rates(const std::array<PatchedField, 3>& v, DerivativeProvider& d,
                            std::array<PatchedField, 6>& rates, PatchedField& tmp);

/// Stress fields from strains in the order 11, 22, 33, 12, 13, 23.
void elastic3d_stress(const std::array<PatchedField, 6>& e, const MaterialFields& mat, std::array<PatchedField, 6>& s);
/// Same for patch `q` only; `s` must already be shaped like `e`.
void elastic3d_stress_patch(const std::array<PatchedField, 6>& e, const MaterialFields& mat,
                            std::array<PatchedField, 6>& s, std::size_t q);

/// Velocity rates (div sigma + A*ricker)/rho. `stress` and `tmp` are scratch.
void elastic3d_momentum_rates(const std::array<PatchedField, 6>& e, const MaterialFields& mat,
                              const PatchedField* amplitude, double wavelet, const std::array<bool, 3>& targets,
                              DerivativeProvider& d, std::array<PatchedField, 3>& rates,
                              std::array<PatchedField, 6>& stress, PatchedField& tmp);

} // namespace loss
