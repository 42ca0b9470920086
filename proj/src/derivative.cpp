#include "loss/derivative.hpp"

#include "loss/error.hpp"

namespace loss {

namespace {
constexpr int kBlock = 64;

// r[line] = c0 * row(k0) + sum_j w[j] * row(k1 + step * j), per line along the view's axis
void weighted_rows(const double* d, const AxisView& v, double c0, int k0, const double* w, int nw, int k1, int step,
                   double* r)
{
    if (v.inner == 1) {
        for (std::size_t o = 0; o < v.outer; ++o) {
            const double* line = d + o * v.along;
            double acc = c0 * line[k0];
            for (int j = 0; j < nw; ++j)
                acc += w[j] * line[k1 + step * j];
            r[o] = acc;
        }
        return;
    }
    for (std::size_t o = 0; o < v.outer; ++o) {
        double* ro = r + o * v.inner;
        const double* base = d + o * v.along * v.inner;
        const double* row = base + static_cast<std::size_t>(k0) * v.inner;
        for (std::size_t s = 0; s < v.inner; ++s)
            ro[s] = c0 * row[s];
        for (int j = 0; j < nw; ++j) {
            const double wj = w[j];
            const double* rj = base + static_cast<std::size_t>(k1 + step * j) * v.inner;
            for (std::size_t s = 0; s < v.inner; ++s)
                ro[s] += wj * rj[s];
        }
    }
}

void shape_like(Array3& out, const Array3& in)
{
    if (out.dims() != in.dims())
        out = Array3(in.dims());
}
} // namespace

void run_batch(Executor& ex, DerivativeProvider& d, std::span<const DerivativeTask> tasks,
               const std::function<void(int)>& prepare, const std::function<void(int)>& consume)
{
    d.start(tasks);
    run_staged(
        ex, d.patch_count(),
        [&](int q) {
            if (prepare)
                prepare(q);
            d.post(q);
        },
        consume, d.needs());
}

void DerivativeProvider::differentiate(const PatchedField& in, int axis, PatchedField& out)
{
    const DerivativeTask t{&in, axis};
    start({&t, 1});
    const int np = patch_count();
    out.patches.resize(in.patches.size());
    for (int q = 0; q < np; ++q)
        post(q);
    for (int q = 0; q < np; ++q)
        solve(q, 0, out.patches[static_cast<std::size_t>(q)]);
}

SplineDerivative::SplineDerivative(const PatchLayout3D& layout, std::array<double, 3> h, Executor& exec)
    : layout_(layout), exec_(exec), plan_(layout), mailbox_(plan_)
{
    require(layout.is_spline(), ErrorCode::layout, "spline derivative needs a spline layout");
    for (int a = 0; a < 3; ++a) {
        ops_[a].h = h[a];
        if (!layout.axis_active(a))
            continue;
        const PatchLayout1D& ax = layout.axis(a);
        if (ax.p() == 1) {
            ops_[a].global.emplace(ax.n(), h[a]);
        } else {
            const Grid1D g(0.0, ax.n() * h[a], ax.n());
            ops_[a].stencil.emplace(build_pmbc_stencils(g, ax));
            ops_[a].local.emplace(ax.m(), h[a]);
        }
    }
    needs_.resize(static_cast<std::size_t>(layout.patch_count()));
    for (int q = 0; q < layout.patch_count(); ++q) {
        auto& n = needs_[static_cast<std::size_t>(q)];
        n.push_back(q);
        for (int a = 0; a < 3; ++a)
            if (ops_[a].stencil)
                for (int side : {-1, 1})
                    if (const int r = layout.neighbor(q, a, side); r >= 0)
                        n.push_back(r);
    }
}

void SplineDerivative::start(std::span<const DerivativeTask> tasks)
{
    std::vector<int> axes;
    for (const auto& t : tasks) {
        require(t.axis >= 0 && t.axis < 3 && layout_.axis_active(t.axis), ErrorCode::dimension,
                "derivative along a degenerate axis");
        require(t.in->patches.size() == static_cast<std::size_t>(layout_.patch_count()), ErrorCode::dimension,
                "field does not match layout");
        axes.push_back(t.axis);
    }
    tasks_.assign(tasks.begin(), tasks.end());
    mailbox_.begin_batch(axes);
    passes_ += tasks_.size();
}

void SplineDerivative::post(int q)
{
    for (std::size_t t = 0; t < tasks_.size(); ++t)
        if (ops_[tasks_[t].axis].stencil)
            send_halves(static_cast<int>(t), q);
}

void SplineDerivative::solve(int q, int t, Array3& out)
{
    const DerivativeTask& task = tasks_[static_cast<std::size_t>(t)];
    const Array3& a = task.in->patches[static_cast<std::size_t>(q)];
    shape_like(out, a);
    if (ops_[task.axis].global)
        solve_global(a, out, task.axis);
    else
        solve_patch(t, q, out);
}

void SplineDerivative::differentiate(const PatchedField& in, int axis, PatchedField& out)
{
    const DerivativeTask t{&in, axis};
    out.patches.resize(in.patches.size());
    run_batch(exec_, *this, {&t, 1}, {}, [&](int q) { solve(q, 0, out.patches[static_cast<std::size_t>(q)]); });
}

void SplineDerivative::solve_global(const Array3& a, Array3& o, int axis)
{
    const AxisOps& ops = ops_[axis];
    const AxisView v = axis_view(a.dims(), axis);
    auto& scratch = detail::tls_buffer(0);
    scratch.resize((v.along + 2) * kBlock);
    for_line_blocks(a.data(), o.data(), v, kBlock,
                    [&](const double* src, std::ptrdiff_t st, int lanes, double* dst, std::ptrdiff_t ost, std::size_t) {
                        ops.global->derivative(src, st, lanes, dst, ost, scratch.data());
                    });
}

void SplineDerivative::send_halves(int t, int q)
{
    const int axis = tasks_[static_cast<std::size_t>(t)].axis;
    const Array3& a = tasks_[static_cast<std::size_t>(t)].in->patches[static_cast<std::size_t>(q)];
    const PmbcStencil& st = *ops_[axis].stencil;
    const AxisView v = axis_view(a.dims(), axis);
    const int m = static_cast<int>(v.along) - 1;
    const int n_nb = st.n_nb;
    const int c = layout_.coords(q)[axis];
    const double* d = a.data();

    // this patch's half of the junction slope, written straight into the outgoing slot
    auto half = [&](std::span<double> acc, int l, bool patch_is_left) {
        const auto li = static_cast<std::size_t>(l - 1);
        const int k = patch_is_left ? m : 0;
        const std::vector<double>& cj = patch_is_left ? st.c_minus[li] : st.c_plus[li];
        weighted_rows(d, v, 0.5 * st.c0[li], k, cj.data(), n_nb, patch_is_left ? k - 1 : k + 1,
                      patch_is_left ? -1 : 1, acc.data());
    };

    const int f_low = plan_.face_of(q, axis, -1);
    if (f_low >= 0) {
        half(mailbox_.slot(t, f_low, 1), c, false);
        mailbox_.post(t, f_low, 1);
    }
    const int f_high = plan_.face_of(q, axis, +1);
    if (f_high >= 0) {
        half(mailbox_.slot(t, f_high, 0), c + 1, true);
        mailbox_.post(t, f_high, 0);
    }
}

void SplineDerivative::solve_patch(int t, int q, Array3& out)
{
    const int axis = tasks_[static_cast<std::size_t>(t)].axis;
    const Array3& a = tasks_[static_cast<std::size_t>(t)].in->patches[static_cast<std::size_t>(q)];
    const AxisOps& ops = ops_[axis];
    const PmbcStencil& st = *ops.stencil;
    const AxisView v = axis_view(a.dims(), axis);
    const std::size_t lines = v.outer * v.inner;
    const int m = static_cast<int>(v.along) - 1;
    const double* d = a.data();
    auto& phi_l = detail::tls_buffer(0);
    auto& phi_r = detail::tls_buffer(1);
    phi_l.resize(lines);
    phi_r.resize(lines);

    auto end_closure = [&](std::vector<double>& phi, bool left) {
        const std::vector<double>& cj = left ? st.c_left : st.c_right;
        weighted_rows(d, v, cj[0], left ? 0 : m, cj.data() + 1, st.n_nb, left ? 1 : m - 1, left ? 1 : -1, phi.data());
    };

    const int f_low = plan_.face_of(q, axis, -1);
    const int f_high = plan_.face_of(q, axis, +1);
    if (f_low >= 0) {
        const auto own = mailbox_.slot(t, f_low, 1);
        const auto recv = mailbox_.receive(t, f_low, 0);
        for (std::size_t i = 0; i < lines; ++i)
            phi_l[i] = own[i] + recv[i];
    } else {
        end_closure(phi_l, true);
    }
    if (f_high >= 0) {
        const auto own = mailbox_.slot(t, f_high, 0);
        const auto recv = mailbox_.receive(t, f_high, 1);
        for (std::size_t i = 0; i < lines; ++i)
            phi_r[i] = own[i] + recv[i];
    } else {
        end_closure(phi_r, false);
    }

    // local scratch distinct from the phi buffers
    thread_local std::vector<double> scratch;
    scratch.resize((v.along + 2) * kBlock);
    for_line_blocks(d, out.data(), v, kBlock,
                    [&](const double* src, std::ptrdiff_t stv, int lanes, double* dst, std::ptrdiff_t ost,
                        std::size_t line0) {
                        ops.local->derivative(src, stv, lanes, phi_l.data() + line0, phi_r.data() + line0, dst, ost,
                                              scratch.data());
                    });

    // shared junction knots carry the assembled slope on both sides
    double* o = out.data();
    for (std::size_t oo = 0; oo < v.outer; ++oo) {
        const std::size_t base = oo * v.along * v.inner;
        if (f_low >= 0)
            for (std::size_t s = 0; s < v.inner; ++s)
                o[base + s] = phi_l[oo * v.inner + s];
        if (f_high >= 0)
            for (std::size_t s = 0; s < v.inner; ++s)
                o[base + static_cast<std::size_t>(m) * v.inner + s] = phi_r[oo * v.inner + s];
    }
}

} // namespace loss
