// Command-line front end. Talks to the library only through loss.h.
#include "loss/loss.h"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Failure {
    int status;
    std::string message;
};

void check(int status)
{
    if (status != LOSS_OK)
        throw Failure{status, loss_last_error()};
}

// owns a string handed out by the library
struct Text {
    char* p = nullptr;
    ~Text() { loss_free_string(p); }
    std::string str() const { return p ? p : ""; }
};

struct ScenarioHandle {
    loss_scenario* h = nullptr;
    ~ScenarioHandle() { loss_scenario_free(h); }
};

struct SnapHandle {
    loss_snapshot* h = nullptr;
    ~SnapHandle() { loss_snapshot_free(h); }
};

struct Common {
    std::vector<std::string> overrides;
    int workers = 0;
    bool deterministic = false;
};

void load(ScenarioHandle& s, const std::string& path, const Common& c)
{
    check(loss_scenario_load(path.c_str(), &s.h));
    std::vector<const char*> kv;
    for (const auto& o : c.overrides)
        kv.push_back(o.c_str());
    check(loss_scenario_set_many(s.h, kv.data(), static_cast<int>(kv.size())));
}

int workers_for(const ScenarioHandle& s, const Common& c)
{
    if (c.deterministic)
        return 1;
    return c.workers > 0 ? c.workers : loss_scenario_default_workers(s.h, 0);
}

void emit(const std::string& text, const std::string& out)
{
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text))
        throw Failure{LOSS_E_IO, "cannot write '" + out + "'"};
}

std::vector<std::string> expand_series(const std::vector<std::string>& args, const std::string& field)
{
    namespace fs = std::filesystem;
    std::vector<std::string> out;
    for (const auto& a : args) {
        std::error_code ec;
        if (!fs::is_directory(a, ec)) {
            out.push_back(a);
            continue;
        }
        std::vector<std::string> found;
        for (const auto& e : fs::directory_iterator(a, ec)) {
            const std::string name = e.path().filename().string();
            if (e.path().extension() != ".snap")
                continue;
            if (!field.empty() && name.rfind(field + "_", 0) != 0)
                continue;
            found.push_back(e.path().string());
        }
        if (ec)
            throw Failure{LOSS_E_IO, "cannot list '" + a + "': " + ec.message()};
        std::sort(found.begin(), found.end());
        out.insert(out.end(), found.begin(), found.end());
    }
    if (out.empty())
        throw Failure{LOSS_E_USAGE, "trace: no snapshot files found"};
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Local spline wave simulator"};
    app.require_subcommand(1);
    Common c;
    app.add_flag("--deterministic", c.deterministic, "Single worker, bitwise reproducible");
    app.add_option("--workers", c.workers, "Worker threads (default: LOSS_WORKERS or patch count)")
        ->check(CLI::PositiveNumber);

    auto add_set = [&](CLI::App* sub) {
        sub->add_option("--set", c.overrides, "Override a config key (key=value), repeatable");
    };

    std::string config, run_dir = "out", oracle_dir = "oracle", out, field, a, b, vary, line;
    std::vector<int> grids;
    std::vector<double> values;
    std::vector<std::string> series;

    auto* run = app.add_subcommand("run", "Run a scenario and write snapshots");
    run->add_option("config", config, "Scenario file")->required();
    run->add_option("-o,--out", run_dir, "Output directory")->capture_default_str();
    add_set(run);

    auto* oracle = app.add_subcommand("oracle", "Write spectral reference snapshots");
    oracle->add_option("config", config, "Scenario file")->required();
    oracle->add_option("-o,--out", oracle_dir, "Output directory")->capture_default_str();
    add_set(oracle);

    auto* compare = app.add_subcommand("compare", "Relative errors of a snapshot against a reference");
    compare->add_option("num", a, "Snapshot")->required();
    compare->add_option("ref", b, "Reference snapshot")->required();

    auto* sweep = app.add_subcommand("sweep", "Convergence table over grid sizes");
    sweep->add_option("config", config, "Scenario file")->required();
    sweep->add_option("--grids", grids, "Intervals per axis, comma separated")->required()->delimiter(',');
    sweep->add_option("--field", field, "Compared field (default: first output field)");
    sweep->add_option("-o,--out", out, "Table file (default: stdout)");
    add_set(sweep);

    auto* study = app.add_subcommand("pml-study", "Error table over one absorbing-layer parameter");
    study->add_option("config", config, "Scenario file")->required();
    study->add_option("--vary", vary, "L, R or k_max")->required()->check(CLI::IsMember({"L", "R", "k_max"}));
    study->add_option("--values", values, "Parameter values, comma separated")->required()->delimiter(',');
    study->add_option("--field", field, "Compared field (default: first output field)");
    study->add_option("-o,--out", out, "Table file (default: stdout)");
    add_set(study);

    auto* trace = app.add_subcommand("trace", "Values along a line for a snapshot series");
    trace->add_option("series", series, "Snapshot files or directories")->required();
    trace->add_option("--line", line, "Axis and fixed coordinates, e.g. z:0,0")->required();
    trace->add_option("--field", field, "Only files named <field>_* when reading directories");
    trace->add_option("-o,--out", out, "CSV file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "loss_cli: error[" << loss_status_name(LOSS_E_USAGE) << "]: " << e.what() << '\n';
        return LOSS_E_USAGE;
    }

    try {
        if (*run) {
            ScenarioHandle s;
            load(s, config, c);
            Text report;
            check(loss_run(s.h, workers_for(s, c), run_dir.c_str(), &report.p));
            std::cout << report.str();
        } else if (*oracle) {
            ScenarioHandle s;
            load(s, config, c);
            Text report;
            check(loss_oracle(s.h, oracle_dir.c_str(), &report.p));
            std::cout << report.str();
        } else if (*compare) {
            SnapHandle x, y;
            check(loss_snapshot_read(a.c_str(), &x.h));
            check(loss_snapshot_read(b.c_str(), &y.h));
            loss_metrics m{};
            check(loss_compare(x.h, y.h, &m));
            std::printf("field = %s\ntime = %.17g\ne2 = %.6e\neinf = %.6e\nnorm = %.6e\n", loss_snapshot_name(y.h),
                        loss_snapshot_time(y.h), m.e2, m.einf, m.norm);
        } else if (*sweep) {
            ScenarioHandle s;
            load(s, config, c);
            Text table;
            check(loss_sweep(s.h, grids.data(), static_cast<int>(grids.size()), field.empty() ? nullptr : field.c_str(),
                             workers_for(s, c), &table.p));
            emit(table.str(), out);
        } else if (*study) {
            ScenarioHandle s;
            load(s, config, c);
            Text table;
            check(loss_pml_study(s.h, vary.c_str(), values.data(), static_cast<int>(values.size()),
                                 field.empty() ? nullptr : field.c_str(), workers_for(s, c), &table.p));
            emit(table.str(), out);
        } else if (*trace) {
            const auto files = expand_series(series, field);
            std::vector<const char*> ptrs;
            for (const auto& f : files)
                ptrs.push_back(f.c_str());
            Text csv;
            check(loss_trace(ptrs.data(), static_cast<int>(ptrs.size()), line.c_str(), &csv.p));
            emit(csv.str(), out);
        }
    } catch (const Failure& f) {
        std::cerr << "loss_cli: error[" << loss_status_name(f.status) << "]: " << f.message << '\n';
        return f.status;
    }
    return 0;
}
