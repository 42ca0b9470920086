#pragma once

#include "loss/derivative.hpp"
#include "loss/executor.hpp"
#include "loss/layout.hpp"
#include "loss/scenario.hpp"
#include "loss/snapshot.hpp"
#include "loss/solver.hpp"
#include "loss/spectral.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace loss {

/// Worker count: LOSS_WORKERS if set, else min(patch count, hardware threads); 1 when deterministic.
int default_workers(const Scenario& s, bool deterministic);

/// A LOSS run of one scenario. 2-D grids are padded by the absorbing layer when pml is enabled;
/// snapshots always cover the physical domain only.
class Simulation {
public:
    Simulation(const Scenario& s, int workers);

    const Scenario& scenario() const { return s_; }
    const PatchLayout3D& layout() const { return *layout_; }
    const Axes& axes() const { return axes_; }
    int step_index() const { return step_; }
    double time() const;

    void advance(int steps);
    Snapshot snapshot(const std::string& field) const;
    /// Global (padded) array of a field.
    Array3 global_field(const std::string& field) const;

    std::uint64_t messages() const;
    /// Scalars one full time step must exchange according to the exchange plan.
    std::uint64_t messages_per_step() const;
    const std::vector<std::string>& warnings() const { return warnings_; }

    AcousticSolver2D* acoustic() { return ac_.get(); }
    ElasticSolver3D* elastic() { return el_.get(); }
    const std::optional<PmlProfile>& profile() const { return profile_; }

private:
    const PatchedField& field(const std::string& name) const;

    Scenario s_;
    std::unique_ptr<Executor> exec_;
    std::unique_ptr<PatchLayout3D> layout_;
    Axes axes_;
    std::array<int, 3> offset_{0, 0, 0};
    std::optional<PmlProfile> profile_;
    std::unique_ptr<SplineDerivative> d_;
    std::unique_ptr<AcousticSolver2D> ac_;
    std::unique_ptr<ElasticSolver3D> el_;
    std::vector<std::string> warnings_;
    int step_ = 0;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;
    std::uint64_t messages = 0;
    int steps = 0;
    double wall_seconds = 0.0;
};

using SnapshotSink = std::function<void(const Snapshot&)>;

/// Run to t_end, emitting every output field at every output instant.
RunResult run_scenario(const Scenario& s, int workers, const SnapshotSink& sink = {});

/// Spectral reference fields at the scenario's output instants, on the periodic oracle grid.
struct ReferenceSeries {
    SpectralGrid grid;
    std::vector<double> times;
    std::vector<std::map<std::string, Array3>> fields;
};

SpectralGrid reference_grid(const Scenario& s);
ReferenceSeries run_reference(const Scenario& s);
/// The reference field at instant k, evaluated at the physical knots of `target`.
Snapshot reference_snapshot(const ReferenceSeries& r, std::size_t k, const std::string& field, const Scenario& target);
std::vector<Snapshot> reference_run(const Scenario& s);

} // namespace loss
