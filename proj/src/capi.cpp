#include "loss/loss.h"

#include "loss/config.hpp"
#include "loss/error.hpp"
#include "loss/harness.hpp"
#include "loss/run.hpp"
#include "loss/scenario.hpp"
#include "loss/snapshot.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>

struct loss_scenario {
    loss::Config config;
    loss::Scenario scenario;
};

struct loss_simulation {
    std::unique_ptr<loss::Simulation> sim;
    loss::TimeGrid grid;
    int workers = 1;
};

struct loss_snapshot {
    loss::Snapshot snap;
};

namespace {

thread_local std::string g_error;

template <class F>
int guarded(F&& f)
{
    try {
        f();
        g_error.clear();
        return LOSS_OK;
    } catch (const loss::Error& e) {
        g_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return LOSS_E_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        return LOSS_E_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    loss::require(p != nullptr, loss::ErrorCode::usage, std::string(what) + " must not be null");
}

char* dup(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int pick_workers(const loss::Scenario& s, int workers)
{
    return workers > 0 ? workers : loss::default_workers(s, false);
}

std::string snap_file(const std::string& dir, const std::string& field, int index)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%04d.snap", index);
    return (std::filesystem::path(dir) / (field + buf)).string();
}

void make_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    loss::require(!ec, loss::ErrorCode::io, "cannot create directory '" + dir + "': " + ec.message());
}

} // namespace

extern "C" {

const char* loss_version(void) { return "1.0.0"; }

const char* loss_status_name(int status)
{
    if (status == LOSS_OK)
        return "ok";
    return loss::error_class_name(static_cast<loss::ErrorCode>(status));
}

const char* loss_last_error(void) { return g_error.c_str(); }

void loss_free_string(char* s) { std::free(s); }

int loss_scenario_load(const char* path, loss_scenario** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto h = std::make_unique<loss_scenario>();
        h->config = loss::load_scenario_config(path);
        h->scenario = loss::scenario_from_config(h->config);
        *out = h.release();
    });
}

int loss_scenario_parse(const char* text, const char* source_name, loss_scenario** out)
{
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        auto h = std::make_unique<loss_scenario>();
        h->config = loss::parse_scenario_config(text, source_name ? source_name : "config");
        h->scenario = loss::scenario_from_config(h->config);
        *out = h.release();
    });
}

int loss_scenario_set(loss_scenario* s, const char* key, const char* value)
{
    return guarded([&] {
        need(s, "scenario");
        need(key, "key");
        need(value, "value");
        loss::Config c = s->config;
        try {
            c.set(key, value);
        } catch (const loss::Error& e) {
            loss::fail(e.code(), std::string("override ") + key + ": " + e.what());
        }
        loss::Scenario next = loss::scenario_from_config(c);
        s->config = std::move(c);
        s->scenario = std::move(next);
    });
}

int loss_scenario_set_many(loss_scenario* s, const char* const* assignments, int n)
{
    return guarded([&] {
        need(s, "scenario");
        loss::require(n == 0 || assignments != nullptr, loss::ErrorCode::usage, "assignments must not be null");
        loss::Config c = s->config;
        for (int i = 0; i < n; ++i) {
            need(assignments[i], "assignment");
            const std::string kv = assignments[i];
            const auto eq = kv.find('=');
            loss::require(eq != std::string::npos, loss::ErrorCode::usage, "override '" + kv + "' is not key=value");
            const std::string key = kv.substr(0, eq);
            try {
                c.set(key, kv.substr(eq + 1));
            } catch (const loss::Error& e) {
                loss::fail(e.code(), "override " + key + ": " + e.what());
            }
        }
        loss::Scenario next = loss::scenario_from_config(c);
        s->config = std::move(c);
        s->scenario = std::move(next);
    });
}

int loss_scenario_dump(const loss_scenario* s, char** out)
{
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        *out = dup(s->config.dump());
    });
}

int loss_scenario_default_workers(const loss_scenario* s, int deterministic)
{
    if (!s)
        return 1;
    return loss::default_workers(s->scenario, deterministic != 0);
}

void loss_scenario_free(loss_scenario* s) { delete s; }

int loss_simulation_create(const loss_scenario* s, int workers, loss_simulation** out)
{
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        auto h = std::make_unique<loss_simulation>();
        h->workers = pick_workers(s->scenario, workers);
        h->grid = loss::TimeGrid::make(s->scenario.dt, s->scenario.t_end);
        h->sim = std::make_unique<loss::Simulation>(s->scenario, h->workers);
        *out = h.release();
    });
}

int loss_simulation_advance(loss_simulation* sim, int steps)
{
    return guarded([&] {
        need(sim, "simulation");
        loss::require(steps >= 0, loss::ErrorCode::usage, "step count must be >= 0");
        sim->sim->advance(steps);
    });
}

int loss_simulation_info(const loss_simulation* sim, loss_sim_info* out)
{
    return guarded([&] {
        need(sim, "simulation");
        need(out, "out");
        out->step = sim->sim->step_index();
        out->n_steps = sim->grid.n_steps;
        out->time = sim->sim->time();
        out->dt = sim->grid.dt;
        out->messages = sim->sim->messages();
        out->messages_per_step = sim->sim->messages_per_step();
        out->workers = sim->workers;
    });
}

int loss_simulation_snapshot(const loss_simulation* sim, const char* field, loss_snapshot** out)
{
    return guarded([&] {
        need(sim, "simulation");
        need(field, "field");
        need(out, "out");
        auto h = std::make_unique<loss_snapshot>();
        h->snap = sim->sim->snapshot(field);
        *out = h.release();
    });
}

int loss_simulation_warnings(const loss_simulation* sim, char** out)
{
    return guarded([&] {
        need(sim, "simulation");
        need(out, "out");
        std::string text;
        for (const auto& w : sim->sim->warnings())
            text += w + '\n';
        *out = dup(text);
    });
}

void loss_simulation_free(loss_simulation* sim) { delete sim; }

int loss_run(const loss_scenario* s, int workers, const char* out_dir, char** report)
{
    return guarded([&] {
        need(s, "scenario");
        need(out_dir, "output directory");
        make_dir(out_dir);
        std::map<std::string, int> seen;
        std::ostringstream files;
        const int w = pick_workers(s->scenario, workers);
        const loss::RunResult r = loss::run_scenario(s->scenario, w, [&](const loss::Snapshot& sn) {
            const std::string path = snap_file(out_dir, sn.name, seen[sn.name]++);
            loss::write_snapshot(path, sn);
            files << path << '\n';
        });
        if (report) {
            std::ostringstream os;
            os << "steps = " << r.steps << '\n'
               << "workers = " << w << '\n'
               << "messages = " << r.messages << '\n'
               << "seconds = " << loss::format_real(r.wall_seconds) << '\n';
            for (const auto& wmsg : r.warnings)
                os << "warning = " << wmsg << '\n';
            std::istringstream fs(files.str());
            for (std::string line; std::getline(fs, line);)
                os << "file = " << line << '\n';
            *report = dup(os.str());
        }
    });
}

int loss_oracle(const loss_scenario* s, const char* out_dir, char** report)
{
    return guarded([&] {
        need(s, "scenario");
        need(out_dir, "output directory");
        make_dir(out_dir);
        const std::vector<loss::Snapshot> snaps = loss::reference_run(s->scenario);
        std::map<std::string, int> seen;
        std::ostringstream os;
        const loss::SpectralGrid g = loss::reference_grid(s->scenario);
        os << "oracle_n = " << s->scenario.oracle_n << '\n';
        os << "oracle_extent = " << loss::format_real(g.length[0]) << '\n';
        for (const auto& sn : snaps) {
            const std::string path = snap_file(out_dir, sn.name, seen[sn.name]++);
            loss::write_snapshot(path, sn);
            os << "file = " << path << '\n';
        }
        if (report)
            *report = dup(os.str());
    });
}

int loss_snapshot_read(const char* path, loss_snapshot** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto h = std::make_unique<loss_snapshot>();
        h->snap = loss::read_snapshot(std::string(path));
        *out = h.release();
    });
}

int loss_snapshot_write(const loss_snapshot* snap, const char* path)
{
    return guarded([&] {
        need(snap, "snapshot");
        need(path, "path");
        loss::write_snapshot(std::string(path), snap->snap);
    });
}

int loss_snapshot_create(const char* name, int ndim, const uint64_t* dims, const double* min, const double* max,
                         double time, const double* data, loss_snapshot** out)
{
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        loss::require(ndim >= 1 && ndim <= 3, loss::ErrorCode::dimension, "snapshot needs 1 to 3 dimensions");
        need(dims, "dims");
        need(min, "min");
        need(max, "max");
        auto h = std::make_unique<loss_snapshot>();
        h->snap.name = name;
        h->snap.time = time;
        h->snap.dims.assign(dims, dims + ndim);
        h->snap.min.assign(min, min + ndim);
        h->snap.max.assign(max, max + ndim);
        const std::size_t n = h->snap.size();
        loss::require(n == 0 || data != nullptr, loss::ErrorCode::usage, "data must not be null");
        h->snap.data.assign(data, data + n);
        h->snap.validate();
        *out = h.release();
    });
}

int loss_snapshot_ndim(const loss_snapshot* snap) { return snap ? static_cast<int>(snap->snap.dims.size()) : 0; }

uint64_t loss_snapshot_dim(const loss_snapshot* snap, int axis)
{
    if (!snap || axis < 0 || static_cast<std::size_t>(axis) >= snap->snap.dims.size())
        return 0;
    return snap->snap.dims[static_cast<std::size_t>(axis)];
}

double loss_snapshot_time(const loss_snapshot* snap) { return snap ? snap->snap.time : 0.0; }

const char* loss_snapshot_name(const loss_snapshot* snap) { return snap ? snap->snap.name.c_str() : ""; }

const double* loss_snapshot_data(const loss_snapshot* snap, size_t* count)
{
    if (count)
        *count = snap ? snap->snap.data.size() : 0;
    return snap ? snap->snap.data.data() : nullptr;
}

void loss_snapshot_free(loss_snapshot* snap) { delete snap; }

int loss_compare(const loss_snapshot* num, const loss_snapshot* ref, loss_metrics* out)
{
    return guarded([&] {
        need(num, "num");
        need(ref, "ref");
        need(out, "out");
        const loss::Metrics m = loss::compute_metrics(num->snap, ref->snap);
        out->e2 = m.e2;
        out->einf = m.einf;
        out->norm = m.norm;
    });
}

int loss_sweep(const loss_scenario* s, const int* grids, int n_grids, const char* field, int workers, char** table)
{
    return guarded([&] {
        need(s, "scenario");
        need(grids, "grids");
        need(table, "table");
        loss::require(n_grids > 0, loss::ErrorCode::usage, "sweep needs at least one grid");
        const std::string f = field ? field : s->scenario.output_fields.front();
        const auto r = loss::convergence_sweep(s->scenario, std::vector<int>(grids, grids + n_grids), f,
                                               pick_workers(s->scenario, workers));
        std::ostringstream os;
        loss::write_sweep_table(os, r);
        *table = dup(os.str());
    });
}

int loss_pml_study(const loss_scenario* s, const char* knob, const double* values, int n_values, const char* field,
                   int workers, char** table)
{
    return guarded([&] {
        need(s, "scenario");
        need(knob, "knob");
        need(values, "values");
        need(table, "table");
        loss::require(n_values > 0, loss::ErrorCode::usage, "pml study needs at least one value");
        const std::string f = field ? field : s->scenario.output_fields.front();
        const auto r = loss::pml_study(s->scenario, loss::parse_pml_knob(knob),
                                       std::vector<double>(values, values + n_values), f,
                                       pick_workers(s->scenario, workers));
        std::ostringstream os;
        loss::write_study_table(os, r);
        *table = dup(os.str());
    });
}

int loss_trace(const char* const* paths, int n_paths, const char* line, char** csv)
{
    return guarded([&] {
        need(paths, "paths");
        need(line, "line");
        need(csv, "csv");
        loss::require(n_paths > 0, loss::ErrorCode::usage, "trace needs at least one snapshot");
        std::vector<loss::Snapshot> series;
        for (int i = 0; i < n_paths; ++i) {
            need(paths[i], "path");
            series.push_back(loss::read_snapshot(std::string(paths[i])));
        }
        std::stable_sort(series.begin(), series.end(),
                         [](const loss::Snapshot& a, const loss::Snapshot& b) { return a.time < b.time; });
        const loss::LineSpec spec = loss::parse_line_spec(line, series.front().dims.size());
        std::ostringstream os;
        loss::write_trace_csv(os, loss::trace_extract(series, spec));
        *csv = dup(os.str());
    });
}

} // extern "C"
