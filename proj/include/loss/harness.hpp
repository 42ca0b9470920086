#pragma once

#include "loss/run.hpp"
#include "loss/scenario.hpp"
#include "loss/snapshot.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace loss {

struct Metrics {
    double e2 = 0.0;   // sqrt(sum |num - ref|^2) / max|ref|
    double einf = 0.0; // max |num - ref| / max|ref|
    double norm = 0.0; // max|ref|
};

/// Snapshots must share dims and extents. An all-zero reference is an error.
Metrics compute_metrics(const Snapshot& num, const Snapshot& ref);

/// Least-squares slope of log(err) against log(h); positive when errors shrink with h.
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

struct SweepRow {
    int n = 0;
    double h = 0.0;
    std::vector<Metrics> at; // one per instant
    double seconds = 0.0;
};

struct SweepResult {
    std::string field, units;
    std::vector<double> times;
    std::vector<SweepRow> rows;
    std::optional<double> order;          // from e2 at the last instant
    std::optional<double> weighted_order; // from e2 * h^(dim/2) at the last instant
    std::string note;
};

/// Run the scenario at each grid size (intervals per used axis) and compare with one reference run.
SweepResult convergence_sweep(const Scenario& base, const std::vector<int>& grids, const std::string& field,
                              int workers);
void write_sweep_table(std::ostream& os, const SweepResult& r);

enum class PmlKnob { cells, r, k_max };

struct StudyResult {
    PmlKnob knob;
    std::string field, units;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<std::vector<Metrics>> at; // [value][instant]
};

StudyResult pml_study(const Scenario& base, PmlKnob knob, const std::vector<double>& values, const std::string& field,
                      int workers);
void write_study_table(std::ostream& os, const StudyResult& r);
PmlKnob parse_pml_knob(const std::string& name);

/// Axis-aligned line through `point` along `axis`; the other coordinates snap to the nearest knot.
struct LineSpec {
    int axis = 0;
    std::vector<double> point; // one coordinate per snapshot axis; the entry for `axis` is ignored
};

/// "z:0,0" style spec: axis letter (x, y, z or an index), then the coordinates of the other axes.
LineSpec parse_line_spec(const std::string& text, std::size_t ndim);

struct Trace {
    std::string field;
    int axis = 0;
    std::vector<double> coords;
    std::vector<double> times;
    std::vector<std::vector<double>> values; // [instant][knot along the line]
};

Trace trace_extract(const std::vector<Snapshot>& series, const LineSpec& line);
void write_trace_csv(std::ostream& os, const Trace& t);

} // namespace loss
