#include "doctest.h"
#include "oracles.hpp"

#include "loss/error.hpp"
#include "loss/pml.hpp"
#include "loss/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace loss;

namespace {

PmlParams params(int cells, double r = 1e-6, double k_max = 1.0, double f0 = 1.0)
{
    PmlParams p;
    p.cells = cells;
    p.r = r;
    p.k_max = k_max;
    p.f0 = f0;
    return p;
}

struct Setup2D {
    int n;
    PatchLayout3D layout;
    Axes axes;
    MaterialModel mat;
    Executor exec{1};
    SplineDerivative deriv;

    Setup2D(int n_, int p)
        : n(n_), layout({n_, 0, n_}, {p, 1, p}, 20), axes(make_axes(n_)), deriv(layout, axes.h, exec)
    {
        mat.rho = 1.3;
        mat.cp = 50;
    }

    static Axes make_axes(int n)
    {
        Axes a;
        a.min = {-5, 0, -5};
        a.h = {10.0 / n, 1.0, 10.0 / n};
        a.knots = {n + 1, 1, n + 1};
        return a;
    }

    Grid1D grid() const { return Grid1D(-5, 5, n); }

    void pulse(AcousticSolver2D& s) const
    {
        Array3 g(layout.knots());
        for (int i = 0; i <= n; ++i)
            for (int k = 0; k <= n; ++k) {
                const double x = axes.coord(0, i), z = axes.coord(2, k);
                g(i, 0, k) = std::exp(-5 * ((x - 0.3) * (x - 0.3) + z * z));
            }
        s.fields().sigma = layout.scatter(g);
    }
};

} // namespace

TEST_CASE("damping scale for the reference 2-D setup")
{
    const Grid1D g(-5, 5, 512);
    const AxisProfile p = build_axis_profile(g, params(50), 50.0);
    const double expect = -3 * 50 * std::log(1e-6) / (2 * 50 * (10.0 / 512));
    CHECK(p.d0 == doctest::Approx(expect).epsilon(1e-14));
    // the quoted figure is rounded; the formula gives 1061.03
    CHECK(p.d0 == doctest::Approx(1.0614e3).epsilon(1e-3));
    CHECK(p.alpha_max == doctest::Approx(std::numbers::pi));
}

TEST_CASE("profile laws hold at every knot")
{
    const Grid1D g(0, 3, 120);
    PmlParams pp = params(17, 1e-3, 4.0, 2.5);
    const AxisProfile p = build_axis_profile(g, pp, 7.0);
    const double lphys = 17 * g.h();
    const double d0 = -3 * 7.0 * std::log(1e-3) / (2 * lphys);
    const double amax = std::numbers::pi * 2.5;
    for (int i = 0; i <= 120; ++i) {
        const auto u = static_cast<std::size_t>(i);
        double depth = 0;
        if (i <= 17)
            depth = (17 - i) * g.h();
        else if (i >= 120 - 17)
            depth = (i - (120 - 17)) * g.h();
        const bool layer = i <= 17 || i >= 103;
        if (!layer) {
            CHECK(p.d[u] == 0.0);
            CHECK(p.k[u] == 1.0);
            CHECK(p.alpha[u] == 0.0);
            continue;
        }
        const double s = depth / lphys;
        CHECK(p.d[u] == doctest::Approx(d0 * s * s).epsilon(1e-14));
        CHECK(p.k[u] == doctest::Approx(1 + 3.0 * s).epsilon(1e-14));
        CHECK(p.alpha[u] == doctest::Approx(amax * (1 - s)).epsilon(1e-14).scale(amax));
    }
    // inner edges and outer edges
    CHECK(p.d[17] == 0.0);
    CHECK(p.k[17] == 1.0);
    CHECK(p.alpha[17] == doctest::Approx(amax));
    CHECK(p.d[0] == doctest::Approx(d0));
    CHECK(p.k[0] == doctest::Approx(4.0));
    CHECK(p.alpha[0] == 0.0);
    CHECK(p.d[120] == doctest::Approx(d0));
    for (int i = 1; i <= 17; ++i) {
        const auto u = static_cast<std::size_t>(i);
        CHECK(p.d[u] <= p.d[u - 1]);
        CHECK(p.k[u] <= p.k[u - 1]);
        CHECK(p.alpha[u] >= p.alpha[u - 1]);
    }
}

TEST_CASE("profile parameter errors")
{
    const Grid1D g(0, 1, 40);
    CHECK_THROWS_AS(build_axis_profile(g, params(21), 1.0), Error);
    CHECK_NOTHROW(build_axis_profile(g, params(20), 1.0));
    CHECK_THROWS_AS(build_axis_profile(g, params(0), 1.0), Error);
    CHECK_THROWS_AS(build_axis_profile(g, params(5, 1.0), 1.0), Error);
    CHECK_THROWS_AS(build_axis_profile(g, params(5, 1e-6, 0.5), 1.0), Error);
    CHECK_THROWS_AS(build_axis_profile(g, params(5, 1e-6, 1.0, 0.0), 1.0), Error);
    try {
        build_axis_profile(g, params(21), 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
        CHECK(std::string(e.what()).find("wider than half") != std::string::npos);
    }
}

TEST_CASE("memory update examples")
{
    CHECK(exp_euler_memory_update(1, 1, 1, 1, 1, 0.1) == doctest::Approx(0.72810).epsilon(1e-5));
    CHECK(exp_euler_memory_update(2.5, 0, 3, 2, 0.5, 0.07) == doctest::Approx(2.5 * std::exp(-2.0 * 0.07)));
    // small step: -(d/k^2) dt g to first order
    const double dt = 1e-7;
    CHECK(exp_euler_memory_update(0, 2, 3, 1.5, 0.4, dt) == doctest::Approx(-(3 / 2.25) * dt * 2).epsilon(1e-6));
    CHECK_THROWS_AS(exp_euler_memory_update(1, 1, 0, 1, 0, 0.1), Error);
}

TEST_CASE("memory flow never grows without forcing")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 2000; ++t) {
        const double d = 1e4 * u(rng) * u(rng);
        const double k = 1 + 9 * u(rng);
        const double alpha = 10 * u(rng);
        if (d + alpha * k == 0)
            continue;
        const double dt = std::pow(10.0, -6 + 6 * u(rng));
        const double psi = 2 * u(rng) - 1;
        CHECK(std::fabs(exp_euler_memory_update(psi, 0, d, k, alpha, dt)) <= std::fabs(psi));
    }
}

TEST_CASE("exact flow velocity update examples")
{
    const double pn = exp_euler_memory_update(1, 0, 1, 1, 1, 0.1);
    CHECK(pn == doctest::Approx(std::exp(-0.2)));
    CHECK(exact_flow_velocity_update(0, 1, pn, 0, 1, 1, 1, 1, 0.1) == doctest::Approx(-0.09063).epsilon(1e-4));
    CHECK(exact_flow_velocity_update(0.7, 0, 0, 2.0, 1.5, 0, 1, 0, 0.01) == 0.7 - 0.01 * 2.0 / 1.5);
    CHECK(exact_flow_velocity_update(0.7, 0, 0, 0.0, 1.5, 3, 2, 1, 0.01) == 0.7);
}

TEST_CASE("single-knot exact flow matches a dense ODE integration")
{
    // v' = -(g/k + psi)/rho, psi' = -(d/k + alpha) psi - (d/k^2) g with g frozen
    struct Case {
        double d, k, alpha, rho, g, v0, p0, dt;
    };
    const Case cases[] = {
        {1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.1},
        {1061.4, 1.0, 3.14, 1.0, -2.0, 0.3, 0.05, 1e-4},
        {250.0, 6.0, 0.0, 2.2, 0.7, -1.0, 0.0, 5e-3},
        {0.0, 3.0, 2.0, 1.7, 1.2, 0.1, -0.4, 0.05},
    };
    for (const auto& c : cases) {
        auto f = [&](const std::vector<double>& y) {
            return std::vector<double>{-(c.g / c.k + y[1]) / c.rho, -(c.d / c.k + c.alpha) * y[1] - c.d / (c.k * c.k) * c.g};
        };
        const auto y = oracle::rk4(f, {c.v0, c.p0}, c.dt, 1000);
        const double pn = exp_euler_memory_update(c.p0, c.g, c.d, c.k, c.alpha, c.dt);
        const double vn = exact_flow_velocity_update(c.v0, c.p0, pn, c.g, c.rho, c.d, c.k, c.alpha, c.dt);
        CHECK(pn == doctest::Approx(y[1]).epsilon(1e-10).scale(1));
        CHECK(vn == doctest::Approx(y[0]).epsilon(1e-10).scale(1));
    }
}

TEST_CASE("memory lives only on layer knots")
{
    const int n = 64;
    const PatchLayout3D l({n, 0, n}, {4, 1, 2}, 10);
    const Grid1D g(0, 1, n);
    const PmlProfile prof = build_profile(g, g, params(12), 1.0);
    const PmlState st = make_pml_state(l, prof);
    std::size_t layer_knots = 0;
    for (int q = 0; q < l.patch_count(); ++q) {
        const auto o = l.origin(q);
        const auto d = l.dims(q);
        const auto uq = static_cast<std::size_t>(q);
        for (int a : {0, 2}) {
            int count = 0;
            for (int i = 0; i < d[a]; ++i) {
                const bool in = (o[a] + i) <= 12 || (o[a] + i) >= n - 12;
                const int s = st.slab_index[uq][a][static_cast<std::size_t>(i)];
                CHECK((s >= 0) == in);
                if (s >= 0) {
                    const MemorySlab& sl = st.slabs[uq][static_cast<std::size_t>(s)];
                    CHECK(sl.axis == a);
                    CHECK(i >= sl.begin);
                    CHECK(i < sl.end);
                }
                count += in;
            }
            layer_knots += static_cast<std::size_t>(count) * static_cast<std::size_t>(d[2 - a]);
        }
        CHECK(st.slab_index[uq][1].size() == 1);
        CHECK(st.slab_index[uq][1][0] == -1);
    }
    CHECK(st.stored_values() == 2 * layer_knots);
    CHECK(st.stored_values() < 2 * 2 * static_cast<std::size_t>(l.patch_count()) * 17 * 33);
}

TEST_CASE("profile dump lists every knot")
{
    const Grid1D g(0, 1, 20);
    std::ostringstream os;
    write_profile(os, build_axis_profile(g, params(5), 1.0));
    std::istringstream is(os.str());
    std::string line;
    int rows = 0;
    std::getline(is, line);
    CHECK(line[0] == '#');
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 21);
}

TEST_CASE("zeroed layers step bitwise like the plain update")
{
    Setup2D s(48, 2);
    const PmlProfile prof = zeroed_profile(build_profile(s.grid(), s.grid(), params(10), s.mat.cp));
    AcousticSolver2D aware(s.layout, s.axes, s.mat, s.deriv, s.exec, &prof, UpdateMode::pml_aware);
    AcousticSolver2D plain(s.layout, s.axes, s.mat, s.deriv, s.exec, nullptr, UpdateMode::plain);
    s.pulse(aware);
    s.pulse(plain);
    for (int i = 0; i < 100; ++i) {
        aware.step(1e-4);
        plain.step(1e-4);
    }
    CHECK(s.layout.gather(aware.fields().sigma).vec() == s.layout.gather(plain.fields().sigma).vec());
    CHECK(s.layout.gather(aware.fields().v1).vec() == s.layout.gather(plain.fields().v1).vec());
    CHECK(s.layout.gather(aware.fields().v3).vec() == s.layout.gather(plain.fields().v3).vec());
    double peak = 0;
    for (double x : s.layout.gather(plain.fields().v1).vec())
        peak = std::max(peak, std::fabs(x));
    CHECK(peak > 1e-3);
}

TEST_CASE("velocity sub-step without layers is the limit form")
{
    Setup2D s(48, 2);
    AcousticSolver2D sol(s.layout, s.axes, s.mat, s.deriv, s.exec, nullptr, UpdateMode::pml_aware);
    s.pulse(sol);
    PatchedField gx, gz;
    s.deriv.differentiate(sol.fields().sigma, 0, gx);
    s.deriv.differentiate(sol.fields().sigma, 2, gz);
    const double tau = 3e-4;
    sol.substep_a(tau);
    const Array3 v1 = s.layout.gather(sol.fields().v1);
    const Array3 v3 = s.layout.gather(sol.fields().v3);
    const Array3 ex = s.layout.gather(gx), ez = s.layout.gather(gz);
    for (std::size_t n = 0; n < v1.size(); ++n) {
        CHECK(v1[n] == 0.0 - tau * ex[n] / 1.3);
        CHECK(v3[n] == 0.0 - tau * ez[n] / 1.3);
    }
}

TEST_CASE("constant pressure leaves velocities still inside layers")
{
    Setup2D s(40, 1);
    const PmlProfile prof = build_profile(s.grid(), s.grid(), params(8), s.mat.cp);
    AcousticSolver2D sol(s.layout, s.axes, s.mat, s.deriv, s.exec, &prof, UpdateMode::pml_aware);
    sol.fields().sigma = s.layout.make_field(2.0);
    for (int i = 0; i < 5; ++i)
        sol.substep_a(1e-4);
    for (double x : s.layout.gather(sol.fields().v1).vec())
        CHECK(std::fabs(x) < 1e-12);
}

TEST_CASE("layers absorb an outgoing pulse")
{
    Setup2D s(48, 2);
    const PmlProfile prof = build_profile(s.grid(), s.grid(), params(12), s.mat.cp);
    AcousticSolver2D damped(s.layout, s.axes, s.mat, s.deriv, s.exec, &prof, UpdateMode::pml_aware);
    AcousticSolver2D bare(s.layout, s.axes, s.mat, s.deriv, s.exec, nullptr, UpdateMode::pml_aware);
    s.pulse(damped);
    s.pulse(bare);
    // 0.3 s at 50 m/s carries the pulse well through the 10 m box
    for (int i = 0; i < 1500; ++i) {
        damped.step(2e-4);
        bare.step(2e-4);
    }
    auto energy = [&](const AcousticSolver2D& a) {
        double e = 0;
        for (double x : s.layout.gather(a.fields().sigma).vec())
            e += x * x;
        return e;
    };
    CHECK(energy(damped) < 1e-2 * energy(bare));
}
