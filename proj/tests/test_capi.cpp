// Exercises the shared library through the public C header only.
#include "doctest.h"

#include "loss/loss.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

namespace {

const char* kScenario = "model = acoustic2d\n"
                        "[grid]\nnx = 48\nnz = 48\n"
                        "[decomposition]\npx = 2\npz = 2\n"
                        "[material]\nrho = 1\ncp = 50\n"
                        "[initial]\nenabled = true\n"
                        "[time]\ndt = 1e-4\nt_end = 0.002\n"
                        "[output]\ntimes = 0, 0.002\nfields = v3, sigma\n";

std::string take(char* s)
{
    std::string out = s ? s : "";
    loss_free_string(s);
    return out;
}

std::filesystem::path scratch(const char* name)
{
    auto p = std::filesystem::temp_directory_path() / ("loss_capi_" + std::to_string(::getpid()) + "_" + name);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("status names and last error")
{
    CHECK(std::string(loss_status_name(LOSS_OK)) == "ok");
    CHECK(std::string(loss_status_name(LOSS_E_CONFIG)) == "config");
    CHECK(std::string(loss_status_name(LOSS_E_HORIZON)) == "horizon");
    loss_scenario* s = nullptr;
    CHECK(loss_scenario_load("/nonexistent/x.conf", &s) == LOSS_E_IO);
    CHECK(s == nullptr);
    CHECK(std::string(loss_last_error()).find("/nonexistent/x.conf") != std::string::npos);
    CHECK(loss_scenario_parse("model = acoustic2d\ngrid.nx = seven\n", "inline", &s) == LOSS_E_CONFIG);
    CHECK(std::string(loss_last_error()).rfind("inline:2:", 0) == 0);
    CHECK(loss_scenario_parse(nullptr, nullptr, &s) == LOSS_E_USAGE);
    CHECK(std::strlen(loss_version()) > 0);
}

TEST_CASE("scenario overrides are atomic and dump round trips")
{
    loss_scenario* s = nullptr;
    REQUIRE(loss_scenario_parse(kScenario, "inline", &s) == LOSS_OK);
    CHECK(std::string(loss_last_error()).empty());

    // shrinking t_end alone invalidates the output instants
    CHECK(loss_scenario_set(s, "time.t_end", "0.001") == LOSS_E_CONFIG);
    const char* both[] = {"time.t_end=0.001", "output.times=0.001"};
    CHECK(loss_scenario_set_many(s, both, 2) == LOSS_OK);
    const char* bad[] = {"time.t_end=0.0005", "nonsense"};
    CHECK(loss_scenario_set_many(s, bad, 2) == LOSS_E_USAGE);

    char* text = nullptr;
    REQUIRE(loss_scenario_dump(s, &text) == LOSS_OK);
    const std::string dumped = take(text);
    CHECK(dumped.find("time.t_end = 0.001\n") != std::string::npos);
    loss_scenario* again = nullptr;
    REQUIRE(loss_scenario_parse(dumped.c_str(), "dump", &again) == LOSS_OK);
    REQUIRE(loss_scenario_dump(again, &text) == LOSS_OK);
    CHECK(take(text) == dumped);
    CHECK(loss_scenario_default_workers(again, 1) == 1);
    loss_scenario_free(again);
    loss_scenario_free(s);
}

TEST_CASE("stepping counts messages by the plan")
{
    loss_scenario* s = nullptr;
    REQUIRE(loss_scenario_parse(kScenario, "inline", &s) == LOSS_OK);
    loss_simulation* sim = nullptr;
    REQUIRE(loss_simulation_create(s, 2, &sim) == LOSS_OK);
    loss_sim_info info{};
    REQUIRE(loss_simulation_info(sim, &info) == LOSS_OK);
    CHECK(info.n_steps == 20);
    CHECK(info.workers == 2);
    CHECK(info.messages == 0);
    // 2x2 patches: per axis two faces of 25 lines (the shared knot sits in both patches), a scalar
    // each way; each axis is differentiated in both halves of A and once in B
    CHECK(info.messages_per_step == 3u * 2u * (2u * 2u * 25u));
    REQUIRE(loss_simulation_advance(sim, 5) == LOSS_OK);
    REQUIRE(loss_simulation_info(sim, &info) == LOSS_OK);
    CHECK(info.step == 5);
    CHECK(info.time == doctest::Approx(5e-4).epsilon(1e-12));
    CHECK(info.messages == 5 * info.messages_per_step);
    CHECK(loss_simulation_advance(sim, -1) == LOSS_E_USAGE);

    loss_snapshot* snap = nullptr;
    REQUIRE(loss_simulation_snapshot(sim, "sigma", &snap) == LOSS_OK);
    CHECK(loss_snapshot_ndim(snap) == 2);
    CHECK(loss_snapshot_dim(snap, 0) == 49);
    CHECK(loss_snapshot_dim(snap, 2) == 0);
    size_t n = 0;
    const double* d = loss_snapshot_data(snap, &n);
    CHECK(n == 49u * 49u);
    CHECK(std::isfinite(d[0]));
    loss_snapshot_free(snap);
    CHECK(loss_simulation_snapshot(sim, "e11", &snap) != LOSS_OK);

    char* w = nullptr;
    REQUIRE(loss_simulation_warnings(sim, &w) == LOSS_OK);
    take(w);
    loss_simulation_free(sim);
    loss_scenario_free(s);
}

TEST_CASE("snapshot files, compare and trace")
{
    const auto dir = scratch("snap");
    std::filesystem::create_directories(dir);
    const uint64_t dims[2] = {3, 5};
    const double lo[2] = {0, -1}, hi[2] = {1, 1};
    std::vector<double> v(15);
    for (int i = 0; i < 15; ++i)
        v[static_cast<std::size_t>(i)] = 1.0 + (i % 5 == 2 ? 1.0 : 0.0);
    loss_snapshot* a = nullptr;
    REQUIRE(loss_snapshot_create("v3", 2, dims, lo, hi, 0.5, v.data(), &a) == LOSS_OK);
    const std::string pa = (dir / "a.snap").string();
    REQUIRE(loss_snapshot_write(a, pa.c_str()) == LOSS_OK);
    loss_snapshot* b = nullptr;
    REQUIRE(loss_snapshot_read(pa.c_str(), &b) == LOSS_OK);
    CHECK(loss_snapshot_time(b) == 0.5);
    CHECK(std::string(loss_snapshot_name(b)) == "v3");
    size_t n = 0;
    CHECK(std::memcmp(loss_snapshot_data(b, &n), v.data(), 15 * sizeof(double)) == 0);

    loss_metrics m{};
    REQUIRE(loss_compare(a, b, &m) == LOSS_OK);
    CHECK(m.e2 == 0.0);
    CHECK(m.einf == 0.0);
    CHECK(m.norm == 2.0);

    const uint64_t other[2] = {3, 4};
    loss_snapshot* c = nullptr;
    REQUIRE(loss_snapshot_create("v3", 2, other, lo, hi, 0.5, v.data(), &c) == LOSS_OK);
    CHECK(loss_compare(a, c, &m) == LOSS_E_DIMENSION);
    CHECK(loss_snapshot_create("v3", 4, dims, lo, hi, 0.0, v.data(), &c) == LOSS_E_DIMENSION);

    const char* files[] = {pa.c_str()};
    char* csv = nullptr;
    REQUIRE(loss_trace(files, 1, "z:0.5", &csv) == LOSS_OK);
    const std::string text = take(csv);
    CHECK(text.rfind("time,coord,v3\n0.5,-1,1\n0.5,-0.5,1\n0.5,0,2\n", 0) == 0);
    CHECK(loss_trace(files, 1, "z:3", &csv) == LOSS_E_DOMAIN);
    CHECK(loss_snapshot_read((dir / "missing.snap").string().c_str(), &c) == LOSS_E_IO);

    loss_snapshot_free(a);
    loss_snapshot_free(b);
    loss_snapshot_free(c);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run writes one file per field and instant")
{
    const auto dir = scratch("run");
    loss_scenario* s = nullptr;
    REQUIRE(loss_scenario_parse(kScenario, "inline", &s) == LOSS_OK);
    char* report = nullptr;
    REQUIRE(loss_run(s, 1, dir.string().c_str(), &report) == LOSS_OK);
    const std::string r = take(report);
    CHECK(r.find("steps = 20\n") != std::string::npos);
    for (const char* f : {"v3_0000.snap", "v3_0001.snap", "sigma_0000.snap", "sigma_0001.snap"})
        CHECK(std::filesystem::exists(dir / f));

    loss_snapshot* p0 = nullptr;
    REQUIRE(loss_snapshot_read((dir / "sigma_0000.snap").string().c_str(), &p0) == LOSS_OK);
    size_t n = 0;
    const double* d = loss_snapshot_data(p0, &n);
    // centre knot of the initial pulse
    CHECK(d[24 * 49 + 24] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(loss_snapshot_time(p0) == 0.0);
    loss_snapshot_free(p0);

    // same scenario, same bits
    const auto dir2 = scratch("run2");
    REQUIRE(loss_run(s, 2, dir2.string().c_str(), nullptr) == LOSS_OK);
    loss_snapshot *x = nullptr, *y = nullptr;
    REQUIRE(loss_snapshot_read((dir / "v3_0001.snap").string().c_str(), &x) == LOSS_OK);
    REQUIRE(loss_snapshot_read((dir2 / "v3_0001.snap").string().c_str(), &y) == LOSS_OK);
    size_t nx = 0, ny = 0;
    const double* dx = loss_snapshot_data(x, &nx);
    const double* dy = loss_snapshot_data(y, &ny);
    REQUIRE(nx == ny);
    CHECK(std::memcmp(dx, dy, nx * sizeof(double)) == 0);
    loss_snapshot_free(x);
    loss_snapshot_free(y);

    REQUIRE(loss_scenario_set(s, "oracle.extent", "10.5") == LOSS_OK);
    CHECK(loss_oracle(s, dir.string().c_str(), nullptr) == LOSS_OK);
    REQUIRE(loss_scenario_set(s, "oracle.extent", "10.01") == LOSS_OK);
    CHECK(loss_oracle(s, dir.string().c_str(), nullptr) == LOSS_E_HORIZON);

    loss_scenario_free(s);
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}
