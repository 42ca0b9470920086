#include "doctest.h"
#include "oracles.hpp"

#include "loss/error.hpp"
#include "loss/physics.hpp"
#include "loss/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace loss;

namespace {

Axes cube_axes(int n, double lo, double hi)
{
    Axes a;
    const double h = (hi - lo) / n;
    a.min = {lo, lo, lo};
    a.h = {h, h, h};
    a.knots = {n + 1, n + 1, n + 1};
    return a;
}

template <class F>
PatchedField fill(const PatchLayout3D& l, const Axes& ax, F f)
{
    Array3 g(l.knots());
    for (int i = 0; i < g.dims()[0]; ++i)
        for (int j = 0; j < g.dims()[1]; ++j)
            for (int k = 0; k < g.dims()[2]; ++k)
                g(i, j, k) = f(ax.coord(0, i), ax.coord(1, j), ax.coord(2, k));
    return l.scatter(g);
}

double max_abs(const Array3& a)
{
    double m = 0;
    for (double x : a.vec())
        m = std::max(m, std::fabs(x));
    return m;
}

MaterialModel crust()
{
    MaterialModel m;
    m.rho = 2.2;
    m.cp = 2.614;
    m.cs = 0.802;
    return m;
}

} // namespace

TEST_CASE("ricker wavelet values")
{
    CHECK(ricker(0.3, 7.0, 0.3) == 1.0);
    const double fp = 2.5, dr = 0.1;
    const double t = dr + 1.0 / (std::numbers::pi * fp);
    CHECK(ricker(t, fp, dr) == doctest::Approx(-0.367879).epsilon(1e-6));
    CHECK(ricker(dr - 1.0 / (std::numbers::pi * fp), fp, dr) == doctest::Approx(-std::exp(-1.0)));
    CHECK(std::fabs(ricker(50.0, fp, dr)) < 1e-300);
    CHECK(std::fabs(ricker(-50.0, fp, dr)) < 1e-300);
}

TEST_CASE("stress from strain examples")
{
    const double rho = 2.5, cp = 5.228, cs = 1.604;
    for (double x : stress_from_strain({0, 0, 0, 0, 0, 0}, rho, cp, cs))
        CHECK(x == 0.0);
    const auto s = stress_from_strain({1, 1, 1, 0, 0, 0}, rho, cp, cs);
    for (int i = 0; i < 3; ++i)
        CHECK(s[static_cast<std::size_t>(i)] == doctest::Approx(rho * (3 * cp * cp - 4 * cs * cs)));
    const auto sh = stress_from_strain({0, 0, 0, 0.3, 0, 0}, rho, cp, cs);
    CHECK(sh[3] == doctest::Approx(2 * rho * cs * cs * 0.3));
    CHECK(sh[0] == 0.0);
    CHECK(sh[1] == 0.0);
    CHECK(sh[2] == 0.0);
    CHECK(sh[4] == 0.0);
    CHECK(sh[5] == 0.0);
}

TEST_CASE("stress matches the constitutive matrix")
{
    // 6x6 isotropic stiffness acting on engineering shear 2*eps_ij
    const double rho = 1.7, cp = 3.0, cs = 1.2;
    const double lam = rho * (cp * cp - 2 * cs * cs), mu = rho * cs * cs;
    oracle::Matrix c(6, std::vector<double>(6, 0.0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = lam + (i == j ? 2 * mu : 0);
    for (int i = 3; i < 6; ++i)
        c[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = mu;
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto e = oracle::random_vector(6, rng);
        std::array<double, 6> ea{};
        std::copy(e.begin(), e.end(), ea.begin());
        const auto s = stress_from_strain(ea, rho, cp, cs);
        for (int i = 0; i < 6; ++i) {
            double ref = 0;
            for (int j = 0; j < 6; ++j)
                ref += c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(j)] *
                       (j >= 3 ? 2.0 : 1.0);
            CHECK(s[static_cast<std::size_t>(i)] == doctest::Approx(ref).epsilon(1e-13).scale(1));
        }
    }
}

TEST_CASE("stress is linear and isotropic")
{
    std::mt19937_64 rng(5);
    const double rho = 2.2, cp = 2.614, cs = 0.802;
    for (int t = 0; t < 100; ++t) {
        const auto x = oracle::random_vector(6, rng), y = oracle::random_vector(6, rng);
        const double a = 1.7, b = -0.6;
        std::array<double, 6> ex{}, ey{}, ez{};
        for (std::size_t i = 0; i < 6; ++i) {
            ex[i] = x[i];
            ey[i] = y[i];
            ez[i] = a * x[i] + b * y[i];
        }
        const auto sx = stress_from_strain(ex, rho, cp, cs), sy = stress_from_strain(ey, rho, cp, cs);
        const auto sz = stress_from_strain(ez, rho, cp, cs);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(sz[i] == doctest::Approx(a * sx[i] + b * sy[i]).epsilon(1e-14).scale(10));

        // relabel 1->2->3->1: new 22 = old 11, new 33 = old 22, new 11 = old 33, new 23 = old 12,
        // new 13 (=31) = old 23, new 12 = old 13
        const std::array<double, 6> ep{ex[2], ex[0], ex[1], ex[4], ex[5], ex[3]};
        const auto sp = stress_from_strain(ep, rho, cp, cs);
        const std::array<double, 6> expect{sx[2], sx[0], sx[1], sx[4], sx[5], sx[3]};
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(sp[i] == doctest::Approx(expect[i]).epsilon(1e-14).scale(10));
    }
}

TEST_CASE("material boxes are closed and later boxes win")
{
    MaterialModel m = crust();
    MaterialBox lower;
    lower.lo = {-40, -40, -40};
    lower.hi = {40, 40, 0};
    lower.rho = 2.5;
    lower.cp = 5.228;
    lower.cs = 1.604;
    m.boxes.push_back(lower);
    CHECK(m.at(0, 0, 0).cp == 5.228);
    CHECK(m.at(0, 0, 1e-12).cp == 2.614);
    CHECK(m.at(40, -40, -40).rho == 2.5);
    CHECK(m.at(41, 0, -1).rho == 2.2);
    MaterialBox inner = lower;
    inner.lo = {-1, -1, -1};
    inner.hi = {1, 1, 1};
    inner.cp = 9;
    inner.cs = 1;
    m.boxes.push_back(inner);
    CHECK(m.at(0, 0, -0.5).cp == 9);
    CHECK(m.max_cp() == 9);
    CHECK_NOTHROW(m.validate(true));
    m.boxes.back().cs = 9;
    CHECK_THROWS_AS(m.validate(true), Error);
    CHECK_NOTHROW(m.validate(false));
    m.rho = 0;
    CHECK_THROWS_AS(m.validate(false), Error);
}

TEST_CASE("sampled material moduli")
{
    const PatchLayout3D l({8, 8, 8}, {1, 1, 1}, 4);
    const Axes ax = cube_axes(8, -4, 4);
    MaterialModel m = crust();
    const MaterialFields f = sample_material(m, l, ax);
    const Array3 mp = l.gather(f.mp), lam = l.gather(f.lam), ms = l.gather(f.ms);
    CHECK(mp[0] == doctest::Approx(2.2 * 2.614 * 2.614));
    CHECK(lam[7] == doctest::Approx(2.2 * (2.614 * 2.614 - 2 * 0.802 * 0.802)));
    CHECK(ms[100] == doctest::Approx(2.2 * 0.802 * 0.802));
    SourceModel s;
    s.center = {1, -1, 2};
    CHECK(s.amplitude(1, -1, 2) == 1.0);
    CHECK(s.amplitude(2, -1, 2) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("2-D gradients are the provider's directional derivatives")
{
    const int n = 40;
    const PatchLayout3D l({n, 0, n}, {2, 1, 1}, 12);
    Axes ax;
    ax.min = {-5, 0, -5};
    ax.h = {10.0 / n, 1, 10.0 / n};
    ax.knots = {n + 1, 1, n + 1};
    Executor ex(1);
    SplineDerivative d(l, ax.h, ex);
    Wavefield2D w;
    w.sigma = fill(l, ax, [](double x, double, double z) { return std::sin(x) * std::cos(0.5 * z); });
    w.v1 = fill(l, ax, [](double x, double, double z) { return x * z; });
    w.v3 = fill(l, ax, [](double x, double, double z) { return std::exp(-0.1 * (x * x + z * z)); });
    const auto g = acoustic2d_gradients(w, d);
    PatchedField r;
    d.differentiate(w.sigma, 0, r);
    CHECK(l.gather(g[0]).vec() == l.gather(r).vec());
    d.differentiate(w.sigma, 2, r);
    CHECK(l.gather(g[1]).vec() == l.gather(r).vec());
    d.differentiate(w.v1, 0, r);
    CHECK(l.gather(g[2]).vec() == l.gather(r).vec());
    d.differentiate(w.v3, 2, r);
    CHECK(l.gather(g[3]).vec() == l.gather(r).vec());

    // hand-coded pressure update with the same gradients
    MaterialModel m;
    m.rho = 1.0;
    m.cp = 50;
    AcousticSolver2D sol(l, ax, m, d, ex, nullptr, UpdateMode::plain);
    sol.fields() = w;
    const double tau = 1e-4;
    sol.substep_b(tau);
    const Array3 s0 = l.gather(w.sigma), gx = l.gather(g[2]), gz = l.gather(g[3]);
    const Array3 s1 = l.gather(sol.fields().sigma);
    const double mp = 1.0 * 50 * 50;
    for (std::size_t k = 0; k < s0.size(); ++k)
        CHECK(s1[k] == s0[k] - mp * (tau * gx[k] + tau * gz[k]));

    // sin(x) slope at fourth order
    const Array3 sx = l.gather(g[0]);
    double err = 0;
    for (int i = 0; i <= n; ++i)
        for (int k = 0; k <= n; ++k)
            err = std::max(err, std::fabs(sx(i, 0, k) - std::cos(ax.coord(0, i)) * std::cos(0.5 * ax.coord(2, k))));
    CHECK(err < 0.1);
    // the two ends see natural closures; check the interior tightly
    double inner = 0;
    for (int i = 10; i <= n - 10; ++i)
        inner = std::max(inner, std::fabs(sx(i, 0, n / 2) - std::cos(ax.coord(0, i))));
    CHECK(inner < 1e-4);
}

TEST_CASE("strain rates of simple velocity fields")
{
    // the truncated junction stencil reproduces polynomials only up to its tail, ~1e-11 at n_nb = 20
    const int n = 48;
    const PatchLayout3D l({n, n, n}, {2, 2, 1}, 20);
    const Axes ax = cube_axes(n, -3, 3);
    Executor ex(2);
    SplineDerivative d(l, ax.h, ex);
    std::array<PatchedField, 6> r;
    PatchedField tmp;

    std::array<PatchedField, 3> rigid{l.make_field(0.4), l.make_field(-1.0), l.make_field(2.0)};
    elastic3d_strain_rates(rigid, d, r, tmp);
    for (const auto& x : r)
        CHECK(max_abs(l.gather(x)) < 1e-9);

    const double a = 0.75;
    std::array<PatchedField, 3> shear{fill(l, ax, [&](double, double y, double) { return a * y; }), l.make_field(),
                                      l.make_field()};
    elastic3d_strain_rates(shear, d, r, tmp);
    for (int c : {0, 1, 2, 4, 5})
        CHECK(max_abs(l.gather(r[static_cast<std::size_t>(c)])) < 1e-9);
    for (double x : l.gather(r[3]).vec())
        CHECK(x == doctest::Approx(a / 2).epsilon(1e-9));
}

TEST_CASE("momentum rates for a manufactured stress")
{
    auto max_err = [](int n) {
        const PatchLayout3D l({n, 4, 4}, {1, 1, 1}, 4);
        Axes ax;
        const double two_pi = 2 * std::numbers::pi;
        ax.min = {0, 0, 0};
        ax.h = {two_pi / n, 0.25, 0.25};
        ax.knots = {n + 1, 5, 5};
        MaterialModel m = crust();
        const MaterialFields mf = sample_material(m, l, ax);
        // strains whose stress is (sin x, 0, 0, 0, 0, 0)
        const double mp = 2.2 * 2.614 * 2.614, lam = 2.2 * (2.614 * 2.614 - 2 * 0.802 * 0.802);
        const auto unit = oracle::dense_solve({{mp, lam, lam}, {lam, mp, lam}, {lam, lam, mp}}, {1, 0, 0});
        std::array<PatchedField, 6> e;
        for (std::size_t c = 0; c < 3; ++c)
            e[c] = fill(l, ax, [&](double x, double, double) { return unit[c] * std::sin(x); });
        for (std::size_t c = 3; c < 6; ++c)
            e[c] = l.make_field();
        Executor ex(1);
        SplineDerivative d(l, ax.h, ex);
        std::array<PatchedField, 3> rates;
        std::array<PatchedField, 6> stress;
        PatchedField tmp;
        elastic3d_momentum_rates(e, mf, nullptr, 0.0, {true, true, true}, d, rates, stress, tmp);
        const Array3 r1 = l.gather(rates[0]);
        double err = 0;
        for (int i = 0; i <= n; ++i)
            err = std::max(err, std::fabs(r1(i, 2, 2) - std::cos(ax.coord(0, i)) / 2.2));
        CHECK(max_abs(l.gather(rates[1])) < 1e-10);
        CHECK(max_abs(l.gather(rates[2])) < 1e-10);
        return err;
    };
    const double e32 = max_err(32), e64 = max_err(64);
    CHECK(e64 < 1e-5);
    CHECK(std::log2(e32 / e64) > 3.5);
}

TEST_CASE("uniform stress leaves only the source")
{
    const int n = 16;
    const PatchLayout3D l({n, n, n}, {1, 1, 1}, 4);
    const Axes ax = cube_axes(n, -2, 2);
    const MaterialFields mf = sample_material(crust(), l, ax);
    std::array<PatchedField, 6> e;
    for (std::size_t c = 0; c < 6; ++c)
        e[c] = l.make_field(0.01 * static_cast<double>(c + 1));
    SourceModel src;
    src.center = {0.5, 0, 0};
    const PatchedField amp = sample_source(src, l, ax);
    Executor ex(1);
    SplineDerivative d(l, ax.h, ex);
    std::array<PatchedField, 3> rates;
    std::array<PatchedField, 6> stress;
    PatchedField tmp;
    const double w = -0.3;
    elastic3d_momentum_rates(e, mf, &amp, w, {false, false, true}, d, rates, stress, tmp);
    const Array3 a = l.gather(amp), r3 = l.gather(rates[2]);
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(r3[k] == doctest::Approx(a[k] * w / 2.2).epsilon(1e-12).scale(1e-3));
    CHECK(max_abs(l.gather(rates[0])) < 1e-13);
}

namespace {

struct Elastic {
    PatchLayout3D layout;
    Axes axes;
    Executor exec;
    SplineDerivative deriv;
    SourceModel src;

    Elastic(int n, int p, int n_nb, int workers)
        : layout({n, n, n}, {p, p, p}, n_nb), axes(cube_axes(n, -40, 40)), exec(workers),
          deriv(layout, axes.h, exec)
    {
        src.enabled = true;
        src.center = {0, 0, 10};
        src.fp = 2.0;
        src.delay = 0.6;
        src.targets = {true, true, true};
    }
};

} // namespace

TEST_CASE("zero fields without a source stay zero")
{
    Elastic s(16, 2, 4, 2);
    s.src.enabled = false;
    ElasticSolver3D sol(s.layout, s.axes, crust(), s.src, s.deriv, s.exec);
    for (int i = 0; i < 10; ++i)
        sol.step(0.05);
    for (const auto& v : sol.fields().v)
        CHECK(max_abs(s.layout.gather(v)) == 0.0);
    for (const auto& e : sol.fields().e)
        CHECK(max_abs(s.layout.gather(e)) == 0.0);
}

TEST_CASE("one step from rest follows the split expansion")
{
    Elastic s(20, 2, 6, 1);
    const MaterialModel mat = crust();
    ElasticSolver3D sol(s.layout, s.axes, mat, s.src, s.deriv, s.exec);
    const double dt = 0.05;
    sol.step(dt);

    // independent expansion with the unfused physics maps
    const MaterialFields mf = sample_material(mat, s.layout, s.axes);
    const PatchedField amp = sample_source(s.src, s.layout, s.axes);
    const Array3 a = s.layout.gather(amp);
    const double w0 = ricker(0.0, s.src.fp, s.src.delay), w1 = ricker(0.5 * dt, s.src.fp, s.src.delay);
    std::array<PatchedField, 3> vh;
    for (auto& v : vh)
        v = s.layout.scatter([&] {
            Array3 g(a.dims());
            for (std::size_t k = 0; k < g.size(); ++k)
                g[k] = 0.5 * dt * (a[k] * w0 / 2.2);
            return g;
        }());
    std::array<PatchedField, 6> er;
    PatchedField tmp;
    elastic3d_strain_rates(vh, s.deriv, er, tmp);
    std::array<PatchedField, 6> e1;
    for (std::size_t c = 0; c < 6; ++c) {
        const Array3 r = s.layout.gather(er[c]);
        Array3 g(r.dims());
        for (std::size_t k = 0; k < g.size(); ++k)
            g[k] = dt * r[k];
        e1[c] = s.layout.scatter(g);
        const Array3 got = s.layout.gather(sol.fields().e[c]);
        const double scale = max_abs(g);
        for (std::size_t k = 0; k < g.size(); ++k)
            CHECK(got[k] == doctest::Approx(g[k]).epsilon(1e-13).scale(scale));
    }
    std::array<PatchedField, 3> vr;
    std::array<PatchedField, 6> st;
    elastic3d_momentum_rates(e1, mf, &amp, w1, s.src.targets, s.deriv, vr, st, tmp);
    for (std::size_t c = 0; c < 3; ++c) {
        const Array3 v0 = s.layout.gather(vh[c]), r = s.layout.gather(vr[c]);
        const Array3 got = s.layout.gather(sol.fields().v[c]);
        const double scale = max_abs(v0);
        CHECK(scale > 0);
        for (std::size_t k = 0; k < got.size(); ++k)
            CHECK(got[k] == doctest::Approx(v0[k] + 0.5 * dt * r[k]).epsilon(1e-13).scale(scale));
    }
}

TEST_CASE("a source on the diagonal keeps v1 and v2 mirrored")
{
    Elastic s(32, 2, 8, 2);
    s.src.center = {0, 0, 10};
    MaterialModel mat = crust();
    MaterialBox lower;
    lower.lo = {-40, -40, -40};
    lower.hi = {40, 40, 0};
    lower.rho = 2.5;
    lower.cp = 5.228;
    lower.cs = 1.604;
    mat.boxes.push_back(lower);
    ElasticSolver3D sol(s.layout, s.axes, mat, s.src, s.deriv, s.exec);
    for (int i = 0; i < 100; ++i)
        sol.step(0.05);
    const Array3 v1 = s.layout.gather(sol.fields().v[0]), v2 = s.layout.gather(sol.fields().v[1]);
    const Array3 e13 = s.layout.gather(sol.fields().e[4]), e23 = s.layout.gather(sol.fields().e[5]);
    const double scale = max_abs(v1);
    CHECK(scale > 1e-6);
    double diff = 0, ediff = 0;
    for (int i = 0; i <= 32; ++i)
        for (int j = 0; j <= 32; ++j)
            for (int k = 0; k <= 32; ++k) {
                diff = std::max(diff, std::fabs(v1(i, j, k) - v2(j, i, k)));
                ediff = std::max(ediff, std::fabs(e13(i, j, k) - e23(j, i, k)));
            }
    CHECK(diff <= 1e-12 * scale);
    CHECK(ediff <= 1e-12 * max_abs(e13));
}

TEST_CASE("fused elastic step matches the physics maps")
{
    Elastic s(24, 2, 6, 3);
    const MaterialModel mat = crust();
    ElasticSolver3D sol(s.layout, s.axes, mat, s.src, s.deriv, s.exec);
    for (int i = 0; i < 3; ++i)
        sol.step(0.05);
    Wavefield3D before = sol.fields();
    const double t = sol.time(), tau = 0.025;
    sol.substep_a(tau, t);
    const MaterialFields mf = sample_material(mat, s.layout, s.axes);
    const PatchedField amp = sample_source(s.src, s.layout, s.axes);
    std::array<PatchedField, 3> vr;
    std::array<PatchedField, 6> st;
    PatchedField tmp;
    elastic3d_momentum_rates(before.e, mf, &amp, ricker(t, s.src.fp, s.src.delay), s.src.targets, s.deriv, vr, st, tmp);
    for (std::size_t c = 0; c < 3; ++c) {
        const Array3 v0 = s.layout.gather(before.v[c]), r = s.layout.gather(vr[c]);
        const Array3 got = s.layout.gather(sol.fields().v[c]);
        for (std::size_t k = 0; k < got.size(); ++k)
            CHECK(got[k] == v0[k] + tau * r[k]);
    }
    before = sol.fields();
    sol.substep_b(tau);
    std::array<PatchedField, 6> er;
    elastic3d_strain_rates(before.v, s.deriv, er, tmp);
    for (std::size_t c = 0; c < 6; ++c) {
        const Array3 e0 = s.layout.gather(before.e[c]), r = s.layout.gather(er[c]);
        const Array3 got = s.layout.gather(sol.fields().e[c]);
        for (std::size_t k = 0; k < got.size(); ++k)
            CHECK(got[k] == e0[k] + tau * r[k]);
    }
}
