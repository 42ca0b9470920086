#include "loss/solver.hpp"

#include "loss/error.hpp"

#include <algorithm>
#include <cmath>

namespace loss {

TimeGrid TimeGrid::make(double dt, double t_end)
{
    require(dt > 0, ErrorCode::config, "time.dt must be positive");
    require(t_end >= 0, ErrorCode::config, "time.t_end must be >= 0");
    const double r = t_end / dt;
    const double n = std::round(r);
    require(std::fabs(r - n) <= 1e-9 * std::max(1.0, r), ErrorCode::config,
            "time.t_end must be an integer multiple of time.dt");
    return {dt, t_end, static_cast<int>(n)};
}

int TimeGrid::step_of(double t) const
{
    const double r = t / dt;
    const double n = std::round(r);
    require(std::fabs(r - n) <= 1e-9 * std::max(1.0, r), ErrorCode::config,
            "output instant " + std::to_string(t) + " is not a multiple of time.dt");
    require(n >= 0 && n <= n_steps, ErrorCode::config, "output instant " + std::to_string(t) + " outside [0, t_end]");
    return static_cast<int>(n);
}

void check_finite(const PatchedField& f, const std::string& name, int step)
{
    for (const auto& p : f.patches)
        for (double x : p.vec())
            if (!std::isfinite(x))
                fail(ErrorCode::numeric, "non-finite value in " + name + " at step " + std::to_string(step));
}

namespace {

double min_spacing(const Axes& ax, const PatchLayout3D& l)
{
    double h = 1e300;
    for (int a = 0; a < 3; ++a)
        if (l.knots()[a] > 1)
            h = std::min(h, ax.h[a]);
    return h;
}

} // namespace

AcousticSolver2D::AcousticSolver2D(const PatchLayout3D& layout, const Axes& axes, const MaterialModel& material,
                                   DerivativeProvider& deriv, Executor& exec, const PmlProfile* pml, UpdateMode mode)
    : layout_(layout), axes_(axes), d_(deriv), exec_(exec), mode_(mode)
{
    require(layout.knots()[1] == 1, ErrorCode::dimension, "2-D solver needs a degenerate y axis");
    material.validate(false);
    mat_ = sample_material(material, layout, axes);
    f_.v1 = layout.make_field();
    f_.v3 = layout.make_field();
    f_.sigma = layout.make_field();
    g1_ = layout.make_field();
    g3_ = layout.make_field();
    if (pml) {
        for (int a : {0, 2})
            require(pml->axis[a].cells == 0 || static_cast<int>(pml->axis[a].d.size()) == layout.knots()[a],
                    ErrorCode::dimension, "pml profile does not match the grid");
        pml_ = *pml;
        if (mode == UpdateMode::pml_aware)
            state_ = make_pml_state(layout, *pml_);
    }
    cmax_ = material.max_cp();
}

double AcousticSolver2D::courant(double dt) const { return cmax_ * dt / min_spacing(axes_, layout_); }

void AcousticSolver2D::step(double dt)
{
    substep_a(0.5 * dt);
    substep_b(dt);
    substep_a(0.5 * dt);
    t_ += dt;
}

namespace {

struct Coeff {
    double d = 0, k = 1, alpha = 0;
};

inline Coeff coeff(const std::optional<PmlProfile>& p, int a, int gi)
{
    if (!p || p->axis[a].cells == 0)
        return {};
    const auto u = static_cast<std::size_t>(gi);
    return {p->axis[a].d[u], p->axis[a].k[u], p->axis[a].alpha[u]};
}

// Exact-flow increment with its memory update; the memory is only touched where the flow is damped.
inline double increment(double g, double* mem, const Coeff& c, double tau)
{
    if (mem && c.d + c.alpha * c.k > 0.0) {
        const double old = *mem;
        const double now = exp_euler_memory_update(old, g, c.d, c.k, c.alpha, tau);
        *mem = now;
        return flow_increment(g, old, now, c.d, c.k, c.alpha, tau);
    }
    return flow_increment(g, 0.0, 0.0, c.d, c.k, c.alpha, tau);
}

} // namespace

void AcousticSolver2D::substep_a(double tau)
{
    const std::array<DerivativeTask, 2> tasks{{{&f_.sigma, 0}, {&f_.sigma, 2}}};
    run_batch(exec_, d_, tasks, {}, [&](int q) {
        const auto uq = static_cast<std::size_t>(q);
        d_.solve(q, 0, g1_.patches[uq]);
        d_.solve(q, 1, g3_.patches[uq]);
        Array3& v1 = f_.v1.patches[uq];
        Array3& v3 = f_.v3.patches[uq];
        const Array3& gx = g1_.patches[uq];
        const Array3& gz = g3_.patches[uq];
        const Array3& rho = mat_.rho.patches[uq];
        const auto dims = v1.dims();
        if (mode_ == UpdateMode::plain) {
            for (std::size_t n = 0; n < v1.size(); ++n) {
                v1[n] = plain_velocity_update(v1[n], gx[n], rho[n], tau);
                v3[n] = plain_velocity_update(v3[n], gz[n], rho[n], tau);
            }
            return;
        }
        const auto o = layout_.origin(q);
        const bool mem = !state_.slabs.empty();
        for (int i = 0; i < dims[0]; ++i) {
            const Coeff cx = coeff(pml_, 0, o[0] + i);
            MemorySlab* sx = nullptr;
            if (mem) {
                const int s = state_.slab_index[uq][0][static_cast<std::size_t>(i)];
                sx = s >= 0 ? &state_.slabs[uq][static_cast<std::size_t>(s)] : nullptr;
            }
            for (int k = 0; k < dims[2]; ++k) {
                const Coeff cz = coeff(pml_, 2, o[2] + k);
                MemorySlab* sz = nullptr;
                if (mem) {
                    const int s = state_.slab_index[uq][2][static_cast<std::size_t>(k)];
                    sz = s >= 0 ? &state_.slabs[uq][static_cast<std::size_t>(s)] : nullptr;
                }
                const std::size_t n = v1.index(i, 0, k);
                double* px = sx ? &sx->psi(i - sx->begin, 0, k) : nullptr;
                double* pz = sz ? &sz->psi(i, 0, k - sz->begin) : nullptr;
                v1[n] = v1[n] - increment(gx[n], px, cx, tau) / rho[n];
                v3[n] = v3[n] - increment(gz[n], pz, cz, tau) / rho[n];
            }
        }
    });
}

void AcousticSolver2D::substep_b(double tau)
{
    const std::array<DerivativeTask, 2> tasks{{{&f_.v1, 0}, {&f_.v3, 2}}};
    run_batch(exec_, d_, tasks, {}, [&](int q) {
        const auto uq = static_cast<std::size_t>(q);
        d_.solve(q, 0, g1_.patches[uq]);
        d_.solve(q, 1, g3_.patches[uq]);
        Array3& s = f_.sigma.patches[uq];
        const Array3& gx = g1_.patches[uq];
        const Array3& gz = g3_.patches[uq];
        const Array3& m = mat_.mp.patches[uq];
        const auto dims = s.dims();
        if (mode_ == UpdateMode::plain) {
            for (std::size_t n = 0; n < s.size(); ++n)
                s[n] = s[n] - m[n] * (tau * gx[n] + tau * gz[n]);
            return;
        }
        const auto o = layout_.origin(q);
        const bool mem = !state_.slabs.empty();
        for (int i = 0; i < dims[0]; ++i) {
            const Coeff cx = coeff(pml_, 0, o[0] + i);
            MemorySlab* sx = nullptr;
            if (mem) {
                const int si = state_.slab_index[uq][0][static_cast<std::size_t>(i)];
                sx = si >= 0 ? &state_.slabs[uq][static_cast<std::size_t>(si)] : nullptr;
            }
            for (int k = 0; k < dims[2]; ++k) {
                const Coeff cz = coeff(pml_, 2, o[2] + k);
                MemorySlab* sz = nullptr;
                if (mem) {
                    const int si = state_.slab_index[uq][2][static_cast<std::size_t>(k)];
                    sz = si >= 0 ? &state_.slabs[uq][static_cast<std::size_t>(si)] : nullptr;
                }
                const std::size_t n = s.index(i, 0, k);
                double* px = sx ? &sx->phi(i - sx->begin, 0, k) : nullptr;
                double* pz = sz ? &sz->phi(i, 0, k - sz->begin) : nullptr;
                const double ix = increment(gx[n], px, cx, tau);
                const double iz = increment(gz[n], pz, cz, tau);
                s[n] = s[n] - m[n] * (ix + iz);
            }
        }
    });
}

ElasticSolver3D::ElasticSolver3D(const PatchLayout3D& layout, const Axes& axes, const MaterialModel& material,
                                 const SourceModel& source, DerivativeProvider& deriv, Executor& exec)
    : layout_(layout), axes_(axes), d_(deriv), exec_(exec), source_(source)
{
    material.validate(true);
    mat_ = sample_material(material, layout, axes);
    if (source.enabled) {
        require(source.fp > 0, ErrorCode::config, "source.fp must be positive");
        amp_ = sample_source(source, layout, axes);
    }
    for (auto& v : f_.v)
        v = layout.make_field();
    for (auto& e : f_.e)
        e = layout.make_field();
    for (auto& x : stress_)
        x = layout.make_field();
    cmax_ = material.max_cp();
}

double ElasticSolver3D::courant(double dt) const { return cmax_ * dt / min_spacing(axes_, layout_); }

void ElasticSolver3D::step(double dt)
{
    substep_a(0.5 * dt, t_);
    substep_b(dt);
    substep_a(0.5 * dt, t_ + 0.5 * dt);
    t_ += dt;
}

void ElasticSolver3D::substep_a(double tau, double t_start)
{
    const double w = amp_ ? ricker(t_start, source_.fp, source_.delay) : 0.0;
    // sigma_ij index in the stored order
    static constexpr int sidx[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
    std::array<DerivativeTask, 9> tasks;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            tasks[static_cast<std::size_t>(3 * i + j)] = {&stress_[static_cast<std::size_t>(sidx[i][j])], j};
    run_batch(
        exec_, d_, tasks, [&](int q) { elastic3d_stress_patch(f_.e, mat_, stress_, static_cast<std::size_t>(q)); },
        [&](int q) {
        const auto uq = static_cast<std::size_t>(q);
        thread_local std::array<Array3, 3> b;
        const double* rho = mat_.rho.patches[uq].data();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j)
                d_.solve(q, 3 * i + j, b[static_cast<std::size_t>(j)]);
            Array3& v = f_.v[static_cast<std::size_t>(i)].patches[uq];
            const double* b0 = b[0].data();
            const double* b1 = b[1].data();
            const double* b2 = b[2].data();
            const bool src = amp_ && source_.targets[static_cast<std::size_t>(i)] && w != 0.0;
            if (src) {
                const double* a = amp_->patches[uq].data();
                for (std::size_t n = 0; n < v.size(); ++n)
                    v[n] += tau * ((b0[n] + b1[n] + b2[n] + a[n] * w) / rho[n]);
            } else {
                for (std::size_t n = 0; n < v.size(); ++n)
                    v[n] += tau * ((b0[n] + b1[n] + b2[n]) / rho[n]);
            }
        }
    });
}

void ElasticSolver3D::substep_b(double tau)
{
    // normal strains, then the shear pairs (i, j) as d_j v_i and d_i v_j
    static constexpr int comp[9][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}};
    std::array<DerivativeTask, 9> tasks;
    for (int t = 0; t < 9; ++t)
        tasks[static_cast<std::size_t>(t)] = {&f_.v[static_cast<std::size_t>(comp[t][0])], comp[t][1]};
    run_batch(exec_, d_, tasks, {}, [&](int q) {
        const auto uq = static_cast<std::size_t>(q);
        thread_local std::array<Array3, 2> b;
        for (int c = 0; c < 3; ++c) {
            d_.solve(q, c, b[0]);
            Array3& e = f_.e[static_cast<std::size_t>(c)].patches[uq];
            const double* r = b[0].data();
            for (std::size_t n = 0; n < e.size(); ++n)
                e[n] += tau * r[n];
        }
        for (int s = 0; s < 3; ++s) {
            d_.solve(q, 3 + 2 * s, b[0]);
            d_.solve(q, 4 + 2 * s, b[1]);
            Array3& e = f_.e[static_cast<std::size_t>(3 + s)].patches[uq];
            const double* ra = b[0].data();
            const double* rb = b[1].data();
            for (std::size_t n = 0; n < e.size(); ++n)
                e[n] += tau * (0.5 * (ra[n] + rb[n]));
        }
    });
}

} // namespace loss
