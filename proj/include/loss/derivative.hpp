#pragma once

#include "loss/array3.hpp"
#include "loss/executor.hpp"
#include "loss/layout.hpp"
#include "loss/patched_spline.hpp"
#include "loss/spline.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace loss {

struct DerivativeTask {
    const PatchedField* in;
    int axis;
};

/// Directional derivatives of patched fields. A batch runs in two phases: start(tasks), then
/// post(q) once per patch when its inputs are ready, then (after every patch has posted)
/// solve(q, t, out) for any patch and task.
class DerivativeProvider {
public:
    virtual ~DerivativeProvider() = default;

    virtual void start(std::span<const DerivativeTask> tasks) = 0;
    virtual void post(int q) = 0;
    virtual void solve(int q, int task, Array3& out) = 0;
    virtual int patch_count() const = 0;
    /// Patches whose post must precede solve on patch q (q itself included).
    virtual const std::vector<std::vector<int>>& needs() const = 0;

    /// One derivative through the batch protocol.
    virtual void differentiate(const PatchedField& in, int axis, PatchedField& out);
};

/// Patched-spline derivative with PMBC junction exchange through a Mailbox.
class SplineDerivative : public DerivativeProvider {
public:
    SplineDerivative(const PatchLayout3D& layout, std::array<double, 3> h, Executor& exec);

    void start(std::span<const DerivativeTask> tasks) override;
    void post(int q) override;
    void solve(int q, int task, Array3& out) override;
    int patch_count() const override { return layout_.patch_count(); }
    const std::vector<std::vector<int>>& needs() const override { return needs_; }
    void differentiate(const PatchedField& in, int axis, PatchedField& out) override;

    std::uint64_t scalars_sent() const { return mailbox_.scalars_sent(); }
    std::uint64_t passes() const { return passes_; }
    Mailbox& mailbox() { return mailbox_; }
    const ExchangePlan& plan() const { return plan_; }
    const PmbcStencil& stencil(int axis) const { return *ops_[axis].stencil; }

private:
    struct AxisOps {
        double h = 0.0;
        std::optional<NaturalSplineSolver> global;
        std::optional<LocalSplineSystem> local;
        std::optional<PmbcStencil> stencil;
    };

    void send_halves(int t, int q);
    void solve_global(const Array3& a, Array3& out, int axis);
    void solve_patch(int t, int q, Array3& out);

    const PatchLayout3D& layout_;
    Executor& exec_;
    ExchangePlan plan_;
    Mailbox mailbox_;
    std::array<AxisOps, 3> ops_;
    std::vector<DerivativeTask> tasks_;
    std::vector<std::vector<int>> needs_;
    std::uint64_t passes_ = 0;
};

/// start(tasks), then per patch prepare(q) + post(q), then consume(q) once the patch's
/// neighbourhood has posted. prepare may be empty.
void run_batch(Executor& ex, DerivativeProvider& d, std::span<const DerivativeTask> tasks,
               const std::function<void(int)>& prepare, const std::function<void(int)>& consume);

/// Run `kernel(in, stride, lanes, out, out_stride, first_line)` over all lines of `a` along
/// `axis` in blocks of up to `block` lanes. Lines are numbered o*inner + s.
template <class Kernel>
void for_line_blocks(const double* in, double* out, AxisView v, int block, Kernel&& kernel);

} // namespace loss

#include "loss/derivative_impl.hpp"
