#include "loss/run.hpp"

#include "loss/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace loss {

int default_workers(const Scenario& s, bool deterministic)
{
    if (deterministic)
        return 1;
    const int patches = s.patches[0] * s.patches[1] * s.patches[2];
    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return workers_from_env(std::max(1, std::min(patches, hw)));
}

namespace {

Array3 initial_pressure(const Scenario& s, const Axes& ax, std::array<int, 3> knots)
{
    Array3 a(knots);
    for (int i = 0; i < knots[0]; ++i)
        for (int k = 0; k < knots[2]; ++k) {
            const double x = ax.coord(0, i) - s.initial.center[0];
            const double z = ax.coord(2, k) - s.initial.center[2];
            a(i, 0, k) = s.initial.amplitude * std::exp(-s.initial.a * (x * x + z * z));
        }
    return a;
}

void copy_global(const PatchLayout3D& l, const Array3& g, PatchedField& f) { f = l.scatter(g); }

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

} // namespace

Simulation::Simulation(const Scenario& s, int workers) : s_(s)
{
    exec_ = std::make_unique<Executor>(workers);
    std::array<int, 3> n = s.intervals;
    for (int a = 0; a < 3; ++a) {
        axes_.h[a] = s.axis_used(a) ? s.spacing(a) : 1.0;
        axes_.min[a] = s.lo[a];
    }
    if (s.model == Model::acoustic2d && s.pml_enabled) {
        for (int a : {0, 2}) {
            offset_[a] = s.pml.cells;
            n[a] += 2 * s.pml.cells;
            axes_.min[a] = s.lo[a] - s.pml.cells * axes_.h[a];
        }
    }
    layout_ = std::make_unique<PatchLayout3D>(n, s.patches, s.n_nb);
    for (int a = 0; a < 3; ++a)
        axes_.knots[a] = layout_->knots()[a];
    d_ = std::make_unique<SplineDerivative>(*layout_, axes_.h, *exec_);

    if (s.model == Model::acoustic2d) {
        if (s.pml_enabled) {
            const Grid1D gx(axes_.min[0], axes_.min[0] + n[0] * axes_.h[0], n[0]);
            const Grid1D gz(axes_.min[2], axes_.min[2] + n[2] * axes_.h[2], n[2]);
            profile_ = build_profile(gx, gz, s.pml, s.material.max_cp());
        }
        ac_ = std::make_unique<AcousticSolver2D>(*layout_, axes_, s.material, *d_, *exec_,
                                                 profile_ ? &*profile_ : nullptr, s.update);
        if (s.initial.enabled)
            copy_global(*layout_, initial_pressure(s, axes_, layout_->knots()), ac_->fields().sigma);
        const double c = ac_->courant(s.dt);
        if (c > 0.5)
            warnings_.push_back("courant number " + fmt(c) + " exceeds 0.5");
    } else {
        el_ = std::make_unique<ElasticSolver3D>(*layout_, axes_, s.material, s.source, *d_, *exec_);
        const double c = el_->courant(s.dt);
        if (c > 0.5)
            warnings_.push_back("courant number " + fmt(c) + " exceeds 0.5");
    }
}

double Simulation::time() const { return ac_ ? ac_->time() : el_->time(); }

void Simulation::advance(int steps)
{
    for (int i = 0; i < steps; ++i) {
        if (ac_)
            ac_->step(s_.dt);
        else
            el_->step(s_.dt);
        ++step_;
        if (step_ % s_.nan_check_every == 0)
            for (const auto& name : s_.field_names())
                check_finite(field(name), name, step_);
    }
}

const PatchedField& Simulation::field(const std::string& name) const
{
    if (ac_) {
        const auto& f = ac_->fields();
        if (name == "v1")
            return f.v1;
        if (name == "v3")
            return f.v3;
        if (name == "sigma")
            return f.sigma;
    } else {
        const auto& f = el_->fields();
        const auto names = s_.field_names();
        const auto it = std::find(names.begin(), names.end(), name);
        if (it != names.end()) {
            const auto i = static_cast<std::size_t>(it - names.begin());
            return i < 3 ? f.v[i] : f.e[i - 3];
        }
    }
    fail(ErrorCode::config, "unknown field '" + name + "'");
}

Array3 Simulation::global_field(const std::string& name) const { return layout_->gather(field(name)); }

Snapshot Simulation::snapshot(const std::string& name) const
{
    const Array3 g = global_field(name);
    Snapshot sn;
    sn.name = name;
    sn.time = time();
    std::array<int, 3> cnt{1, 1, 1};
    for (int a = 0; a < 3; ++a) {
        if (!s_.axis_used(a))
            continue;
        cnt[a] = s_.intervals[a] + 1;
        sn.dims.push_back(static_cast<std::uint64_t>(cnt[a]));
        sn.min.push_back(s_.lo[a]);
        sn.max.push_back(s_.hi[a]);
    }
    sn.data.reserve(sn.size());
    for (int i = 0; i < cnt[0]; ++i)
        for (int j = 0; j < cnt[1]; ++j)
            for (int k = 0; k < cnt[2]; ++k)
                sn.data.push_back(g(i + offset_[0], j + offset_[1], k + offset_[2]));
    return sn;
}

std::uint64_t Simulation::messages() const { return d_->scalars_sent(); }

std::uint64_t Simulation::messages_per_step() const
{
    const ExchangePlan& p = d_->plan();
    // passes per axis per step: 2-D 3 (A, B, A); 3-D 9 (3 in each momentum half, 3 in the strain step)
    const std::uint64_t per_axis = ac_ ? 3 : 9;
    std::uint64_t total = 0;
    for (int a = 0; a < 3; ++a)
        if (s_.axis_used(a))
            total += per_axis * p.scalars_per_pass(a);
    return total;
}

RunResult run_scenario(const Scenario& s, int workers, const SnapshotSink& sink)
{
    const auto t0 = std::chrono::steady_clock::now();
    Simulation sim(s, workers);
    const TimeGrid tg = TimeGrid::make(s.dt, s.t_end);
    std::vector<std::pair<int, double>> outs;
    for (double t : s.output_times)
        outs.push_back({tg.step_of(t), t});
    std::sort(outs.begin(), outs.end());
    RunResult r;
    r.warnings = sim.warnings();
    auto emit = [&]() {
        for (const auto& f : s.output_fields) {
            Snapshot sn = sim.snapshot(f);
            if (sink)
                sink(sn);
            r.snapshots.push_back(std::move(sn));
        }
    };
    std::size_t next = 0;
    while (next < outs.size() && outs[next].first == 0) {
        emit();
        ++next;
    }
    while (next < outs.size()) {
        sim.advance(outs[next].first - sim.step_index());
        while (next < outs.size() && outs[next].first == sim.step_index()) {
            emit();
            ++next;
        }
    }
    sim.advance(tg.n_steps - sim.step_index());
    r.messages = sim.messages();
    r.steps = sim.step_index();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

SpectralGrid reference_grid(const Scenario& s)
{
    SpectralGrid g;
    for (int a = 0; a < 3; ++a) {
        if (!s.axis_used(a)) {
            g.n[a] = 1;
            g.length[a] = 1.0;
            g.x_min[a] = 0.0;
            continue;
        }
        const double width = s.hi[a] - s.lo[a];
        const double ext = s.oracle_extent > 0 ? s.oracle_extent : width;
        require(ext >= width, ErrorCode::config, "oracle.extent must cover the domain");
        require(is_power_of_two(s.oracle_n), ErrorCode::config, "oracle.n must be a power of two");
        g.n[a] = s.oracle_n;
        g.length[a] = ext;
        g.x_min[a] = 0.5 * (s.lo[a] + s.hi[a]) - 0.5 * ext;
    }
    return g;
}

ReferenceSeries run_reference(const Scenario& s)
{
    ReferenceSeries r;
    r.grid = reference_grid(s);
    // an enlarged run must end before anything wraps around into the physical domain
    for (int a = 0; a < 3; ++a) {
        if (!s.axis_used(a))
            continue;
        const double margin = r.grid.length[a] - (s.hi[a] - s.lo[a]);
        if (margin > 0 && s.material.max_cp() * s.t_end >= margin)
            fail(ErrorCode::horizon, "reference horizon exceeded on axis " + std::to_string(a) + ": c_max*T = " +
                                         fmt(s.material.max_cp() * s.t_end) + " >= extension margin " + fmt(margin));
    }
    Axes ax;
    for (int a = 0; a < 3; ++a) {
        ax.min[a] = r.grid.x_min[a];
        ax.h[a] = r.grid.spacing(a);
        ax.knots[a] = r.grid.n[a];
    }
    const PatchLayout3D layout = PatchLayout3D::single(r.grid.n);
    SpectralDerivative d(r.grid);
    Executor ex(1);
    const TimeGrid tg = TimeGrid::make(s.dt, s.t_end);
    std::vector<std::pair<int, double>> outs;
    for (double t : s.output_times)
        outs.push_back({tg.step_of(t), t});
    std::sort(outs.begin(), outs.end());

    std::unique_ptr<AcousticSolver2D> ac;
    std::unique_ptr<ElasticSolver3D> el;
    if (s.model == Model::acoustic2d) {
        ac = std::make_unique<AcousticSolver2D>(layout, ax, s.material, d, ex, nullptr, UpdateMode::plain);
        if (s.initial.enabled)
            ac->fields().sigma.patches[0] = initial_pressure(s, ax, r.grid.n);
    } else {
        el = std::make_unique<ElasticSolver3D>(layout, ax, s.material, s.source, d, ex);
    }
    auto capture = [&](double t) {
        r.times.push_back(t);
        std::map<std::string, Array3> m;
        for (const auto& f : s.output_fields) {
            if (ac) {
                const auto& w = ac->fields();
                m[f] = (f == "v1" ? w.v1 : f == "v3" ? w.v3 : w.sigma).patches[0];
            } else {
                const auto names = s.field_names();
                const auto i = static_cast<std::size_t>(std::find(names.begin(), names.end(), f) - names.begin());
                m[f] = (i < 3 ? el->fields().v[i] : el->fields().e[i - 3]).patches[0];
            }
        }
        r.fields.push_back(std::move(m));
    };
    int step = 0;
    for (const auto& [k, t] : outs) {
        for (; step < k; ++step) {
            if (ac)
                ac->step(s.dt);
            else
                el->step(s.dt);
            if ((step + 1) % s.nan_check_every == 0) {
                if (ac)
                    check_finite(ac->fields().v3, "v3", step + 1);
                else
                    check_finite(el->fields().v[2], "v3", step + 1);
            }
        }
        capture(t);
    }
    return r;
}

Snapshot reference_snapshot(const ReferenceSeries& r, std::size_t k, const std::string& field, const Scenario& target)
{
    require(k < r.times.size(), ErrorCode::config, "reference instant out of range");
    const auto it = r.fields[k].find(field);
    require(it != r.fields[k].end(), ErrorCode::config, "reference has no field '" + field + "'");
    std::array<std::vector<double>, 3> xs;
    Snapshot sn;
    sn.name = field;
    sn.time = r.times[k];
    for (int a = 0; a < 3; ++a) {
        if (!target.axis_used(a))
            continue;
        const int n = target.intervals[a];
        const double h = target.spacing(a);
        for (int i = 0; i <= n; ++i)
            xs[a].push_back(target.lo[a] + i * h);
        sn.dims.push_back(static_cast<std::uint64_t>(n + 1));
        sn.min.push_back(target.lo[a]);
        sn.max.push_back(target.hi[a]);
    }
    sn.data = trig_resample(it->second, r.grid, xs).vec();
    return sn;
}

std::vector<Snapshot> reference_run(const Scenario& s)
{
    const ReferenceSeries r = run_reference(s);
    std::vector<Snapshot> out;
    for (std::size_t k = 0; k < r.times.size(); ++k)
        for (const auto& f : s.output_fields)
            out.push_back(reference_snapshot(r, k, f, s));
    return out;
}

} // namespace loss
