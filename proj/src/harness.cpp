#include "loss/harness.hpp"

#include "loss/config.hpp"
#include "loss/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace loss {

Metrics compute_metrics(const Snapshot& num, const Snapshot& ref)
{
    num.validate();
    ref.validate();
    require(num.dims == ref.dims, ErrorCode::dimension,
            "compare: dimension mismatch between '" + num.name + "' and '" + ref.name + "'");
    for (std::size_t a = 0; a < num.dims.size(); ++a) {
        const double tol = 1e-12 * std::max(1.0, std::fabs(ref.max[a] - ref.min[a]));
        require(std::fabs(num.min[a] - ref.min[a]) <= tol && std::fabs(num.max[a] - ref.max[a]) <= tol,
                ErrorCode::dimension, "compare: extents differ on axis " + std::to_string(a));
    }
    Metrics m;
    double sum = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        m.norm = std::max(m.norm, std::fabs(ref.data[i]));
        const double d = num.data[i] - ref.data[i];
        sum += d * d;
        dmax = std::max(dmax, std::fabs(d));
    }
    require(m.norm > 0.0, ErrorCode::numeric, "compare: reference is identically zero, relative error undefined");
    m.e2 = std::sqrt(sum) / m.norm;
    m.einf = dmax / m.norm;
    return m;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err)
{
    require(h.size() == err.size() && h.size() >= 2, ErrorCode::usage, "order fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        require(h[i] > 0 && err[i] > 0, ErrorCode::numeric, "order fit needs positive spacings and errors");
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// errors this small are rounding, not truncation
constexpr double kFloor = 1e-12;

Scenario at_resolution(const Scenario& base, int n)
{
    Scenario s = base;
    for (int a = 0; a < 3; ++a)
        if (s.axis_used(a))
            s.intervals[a] = n;
    s.output_fields = {};
    return s;
}

std::vector<Metrics> compare_series(const Scenario& s, const ReferenceSeries& ref, const std::string& field,
                                    int workers, double* seconds)
{
    Scenario run = s;
    run.output_fields = {field};
    const RunResult r = run_scenario(run, workers);
    if (seconds)
        *seconds = r.wall_seconds;
    std::vector<Metrics> out;
    for (std::size_t k = 0; k < ref.times.size(); ++k) {
        // run_scenario emits in time order, matching the reference
        const Snapshot want = reference_snapshot(ref, k, field, s);
        out.push_back(compute_metrics(r.snapshots[k], want));
    }
    return out;
}

std::string instants(const std::vector<double>& t)
{
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i)
        s += (i ? "," : "") + format_real(t[i]);
    return s;
}

std::string sci(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << v;
    return os.str();
}

std::vector<double> sorted_times(const Scenario& s)
{
    std::vector<double> t = s.output_times;
    std::sort(t.begin(), t.end());
    return t;
}

} // namespace

SweepResult convergence_sweep(const Scenario& base, const std::vector<int>& grids, const std::string& field,
                              int workers)
{
    require(!grids.empty(), ErrorCode::usage, "sweep needs at least one grid");
    Scenario rs = base;
    rs.output_fields = {field};
    rs.output_times = sorted_times(base);
    const ReferenceSeries ref = run_reference(rs);
    SweepResult out;
    out.field = field;
    out.units = base.units;
    out.times = ref.times;
    for (int n : grids) {
        Scenario s = at_resolution(rs, n);
        SweepRow row;
        row.n = n;
        row.h = s.spacing(0);
        row.at = compare_series(s, ref, field, workers, &row.seconds);
        out.rows.push_back(std::move(row));
    }
    if (out.rows.size() < 2 || out.times.empty()) {
        out.note = "order fit skipped: need two grids and one instant";
        return out;
    }
    std::vector<double> h, e, ew;
    bool floor = true;
    const double dim = base.dim();
    for (const auto& r : out.rows) {
        h.push_back(r.h);
        e.push_back(r.at.back().e2);
        ew.push_back(r.at.back().e2 * std::pow(r.h, 0.5 * dim));
        floor = floor && r.at.back().e2 < kFloor;
    }
    bool any_floor = false;
    for (double x : e)
        any_floor = any_floor || x < kFloor;
    if (floor || any_floor) {
        out.note = "order fit skipped: errors at the rounding floor";
        return out;
    }
    out.order = fit_order(h, e);
    out.weighted_order = fit_order(h, ew);
    return out;
}

void write_sweep_table(std::ostream& os, const SweepResult& r)
{
    os << "# field " << r.field << "; units " << r.units << "; instants (s) " << instants(r.times) << '\n';
    os << "N,h";
    for (double t : r.times)
        os << ",e2@" << format_real(t) << ",einf@" << format_real(t) << ",log2ratio@" << format_real(t);
    os << ",seconds\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const SweepRow& row = r.rows[i];
        os << row.n << ',' << format_real(row.h);
        for (std::size_t k = 0; k < r.times.size(); ++k) {
            os << ',' << sci(row.at[k].e2) << ',' << sci(row.at[k].einf) << ',';
            // doubling ratio against the next finer grid
            if (i + 1 < r.rows.size() && r.rows[i + 1].at[k].e2 > 0 && row.at[k].e2 > 0)
                os << format_real(std::round(1e4 * std::log2(row.at[k].e2 / r.rows[i + 1].at[k].e2)) / 1e4);
        }
        os << ',' << format_real(std::round(row.seconds * 1e3) / 1e3) << '\n';
    }
    if (r.order)
        os << "# fitted order (e2 at " << format_real(r.times.back()) << " s): " << format_real(std::round(*r.order * 1e4) / 1e4)
           << '\n';
    if (r.weighted_order)
        os << "# fitted order (e2 * h^(dim/2), area-weighted): " << format_real(std::round(*r.weighted_order * 1e4) / 1e4)
           << '\n';
    if (!r.note.empty())
        os << "# " << r.note << '\n';
}

PmlKnob parse_pml_knob(const std::string& name)
{
    if (name == "L" || name == "cells")
        return PmlKnob::cells;
    if (name == "R" || name == "r")
        return PmlKnob::r;
    if (name == "k_max" || name == "kmax")
        return PmlKnob::k_max;
    fail(ErrorCode::usage, "unknown pml parameter '" + name + "' (expected L, R or k_max)");
}

StudyResult pml_study(const Scenario& base, PmlKnob knob, const std::vector<double>& values, const std::string& field,
                      int workers)
{
    require(base.model == Model::acoustic2d && base.pml_enabled, ErrorCode::config,
            "pml study needs a 2-D scenario with pml.enabled = true");
    require(!values.empty(), ErrorCode::usage, "pml study needs at least one value");
    Scenario rs = base;
    rs.output_fields = {field};
    rs.output_times = sorted_times(base);
    const ReferenceSeries ref = run_reference(rs);
    StudyResult out;
    out.knob = knob;
    out.field = field;
    out.units = base.units;
    out.times = ref.times;
    out.values = values;
    for (double v : values) {
        Scenario s = rs;
        switch (knob) {
        case PmlKnob::cells:
            require(v == std::floor(v) && v >= 1, ErrorCode::usage, "L values must be positive integers");
            s.pml.cells = static_cast<int>(v);
            break;
        case PmlKnob::r:
            s.pml.r = v;
            break;
        case PmlKnob::k_max:
            s.pml.k_max = v;
            break;
        }
        out.at.push_back(compare_series(s, ref, field, workers, nullptr));
    }
    return out;
}

void write_study_table(std::ostream& os, const StudyResult& r)
{
    const char* name = r.knob == PmlKnob::cells ? "L" : r.knob == PmlKnob::r ? "R" : "k_max";
    os << "# field " << r.field << "; units " << r.units << "; instants (s) " << instants(r.times) << '\n';
    os << name;
    for (double t : r.times)
        os << ",e2@" << format_real(t) << ",einf@" << format_real(t);
    os << '\n';
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        os << format_real(r.values[i]);
        for (const auto& m : r.at[i])
            os << ',' << sci(m.e2) << ',' << sci(m.einf);
        os << '\n';
    }
}

LineSpec parse_line_spec(const std::string& text, std::size_t ndim)
{
    const auto colon = text.find(':');
    require(colon != std::string::npos && colon > 0, ErrorCode::usage,
            "line spec '" + text + "' must look like axis:c1,c2 (e.g. z:0,0)");
    const std::string ax = text.substr(0, colon);
    LineSpec l;
    const std::string letters = ndim == 2 ? "xz" : "xyz";
    if (ax.size() == 1 && letters.find(ax[0]) != std::string::npos)
        l.axis = static_cast<int>(letters.find(ax[0]));
    else if (ax.size() == 1 && ax[0] >= '0' && ax[0] < static_cast<char>('0' + ndim))
        l.axis = ax[0] - '0';
    else
        fail(ErrorCode::usage, "line spec axis '" + ax + "' is not one of " + letters);
    std::vector<double> others;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == item.size() && !item.empty(), ErrorCode::usage, "line spec coordinate '" + item + "' is not a number");
        others.push_back(v);
    }
    require(others.size() + 1 == ndim, ErrorCode::usage,
            "line spec needs " + std::to_string(ndim - 1) + " coordinates for a " + std::to_string(ndim) + "-D field");
    l.point.assign(ndim, 0.0);
    std::size_t k = 0;
    for (std::size_t a = 0; a < ndim; ++a)
        if (static_cast<int>(a) != l.axis)
            l.point[a] = others[k++];
    return l;
}

Trace trace_extract(const std::vector<Snapshot>& series, const LineSpec& line)
{
    require(!series.empty(), ErrorCode::usage, "trace needs at least one snapshot");
    const Snapshot& first = series.front();
    const std::size_t nd = first.dims.size();
    require(line.point.size() == nd && line.axis >= 0 && static_cast<std::size_t>(line.axis) < nd, ErrorCode::usage,
            "line spec does not match the snapshot dimension");
    Trace t;
    t.field = first.name;
    t.axis = line.axis;
    std::vector<std::uint64_t> fixed(nd, 0);
    for (std::size_t a = 0; a < nd; ++a) {
        if (static_cast<int>(a) == line.axis)
            continue;
        const double lo = first.min[a], hi = first.max[a];
        const double x = line.point[a];
        const double h = first.dims[a] > 1 ? (hi - lo) / static_cast<double>(first.dims[a] - 1) : 0.0;
        require(x >= lo - 1e-9 * std::max(1.0, h) && x <= hi + 1e-9 * std::max(1.0, h), ErrorCode::domain,
                "trace line at coordinate " + format_real(x) + " lies outside [" + format_real(lo) + ", " +
                    format_real(hi) + "] on axis " + std::to_string(a));
        fixed[a] = h > 0 ? static_cast<std::uint64_t>(std::llround((x - lo) / h)) : 0;
    }
    const auto ax = static_cast<std::size_t>(line.axis);
    for (std::uint64_t i = 0; i < first.dims[ax]; ++i)
        t.coords.push_back(first.coord(ax, i));
    for (const Snapshot& s : series) {
        s.validate();
        require(s.dims == first.dims && s.name == first.name, ErrorCode::dimension,
                "trace: snapshots in a series must share field and shape");
        std::vector<double> row;
        for (std::uint64_t i = 0; i < s.dims[ax]; ++i) {
            std::size_t idx = 0;
            for (std::size_t a = 0; a < nd; ++a)
                idx = idx * s.dims[a] + (a == ax ? i : fixed[a]);
            row.push_back(s.data[idx]);
        }
        t.times.push_back(s.time);
        t.values.push_back(std::move(row));
    }
    return t;
}

void write_trace_csv(std::ostream& os, const Trace& t)
{
    os << "time,coord," << t.field << '\n';
    for (std::size_t k = 0; k < t.times.size(); ++k)
        for (std::size_t i = 0; i < t.coords.size(); ++i)
            os << format_real(t.times[k]) << ',' << format_real(t.coords[i]) << ',' << format_real(t.values[k][i]) << '\n';
}

} // namespace loss
