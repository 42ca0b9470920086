#pragma once

#include "loss/derivative.hpp"
#include "loss/executor.hpp"
#include "loss/layout.hpp"
#include "loss/physics.hpp"
#include "loss/pml.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace loss {

struct TimeGrid {
    double dt = 0.0;
    double t_end = 0.0;
    int n_steps = 0;

    /// Requires t_end / dt to be integral (to 1e-9 relative).
    static TimeGrid make(double dt, double t_end);
    /// Step index of an output instant; it must fall on the grid.
    int step_of(double t) const;
};

enum class UpdateMode { pml_aware, plain };

/// 2-D acoustic velocity-stress system on fields shaped (nx, 1, nz).
class AcousticSolver2D {
public:
    /// `pml` may be null (no layers). In plain mode the profile is ignored.
    AcousticSolver2D(const PatchLayout3D& layout, const Axes& axes, const MaterialModel& material,
                     DerivativeProvider& deriv, Executor& exec, const PmlProfile* pml, UpdateMode mode);

    Wavefield2D& fields() { return f_; }
    const Wavefield2D& fields() const { return f_; }
    const MaterialFields& material() const { return mat_; }
    const PmlState& pml_state() const { return state_; }
    double time() const { return t_; }
    void set_time(double t) { t_ = t; }

    /// A(dt/2) B(dt) A(dt/2)
    void step(double dt);
    void substep_a(double tau);
    void substep_b(double tau);

    /// Largest c * dt / h over the grid.
    double courant(double dt) const;

private:
    const PatchLayout3D& layout_;
    Axes axes_;
    DerivativeProvider& d_;
    Executor& exec_;
    std::optional<PmlProfile> pml_;
    UpdateMode mode_;
    MaterialFields mat_;
    Wavefield2D f_;
    PmlState state_;
    PatchedField g1_, g3_;
    double t_ = 0.0;
    double cmax_ = 0.0;
};

/// 3-D elastic velocity-strain system with nine stored fields and natural end closures.
class ElasticSolver3D {
public:
    ElasticSolver3D(const PatchLayout3D& layout, const Axes& axes, const MaterialModel& material,
                    const SourceModel& source, DerivativeProvider& deriv, Executor& exec);

    Wavefield3D& fields() { return f_; }
    const Wavefield3D& fields() const { return f_; }
    double time() const { return t_; }

    void step(double dt);
    void substep_a(double tau, double t_start);
    void substep_b(double tau);
    double courant(double dt) const;

private:
    const PatchLayout3D& layout_;
    Axes axes_;
    DerivativeProvider& d_;
    Executor& exec_;
    SourceModel source_;
    MaterialFields mat_;
    std::optional<PatchedField> amp_;
    Wavefield3D f_;
    std::array<PatchedField, 6> stress_;
    double t_ = 0.0;
    double cmax_ = 0.0;
};

/// Throws a numeric error naming the step when any value is not finite.
void check_finite(const PatchedField& f, const std::string& name, int step);

} // namespace loss
