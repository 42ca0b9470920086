#include "doctest.h"
#include "oracles.hpp"

#include "loss/error.hpp"
#include "loss/fft.hpp"
#include "loss/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace loss;

TEST_CASE("fft round trip and a naive DFT oracle")
{
    std::mt19937_64 rng(7);
    for (int n : {2, 8, 64, 512}) {
        const Fft f(n);
        const auto re = oracle::random_vector(static_cast<std::size_t>(n), rng);
        const auto im = oracle::random_vector(static_cast<std::size_t>(n), rng);
        std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            z[static_cast<std::size_t>(j)] = {re[static_cast<std::size_t>(j)], im[static_cast<std::size_t>(j)]};
        const auto orig = z;
        f.forward(z.data());
        if (n <= 64) {
            for (int k = 0; k < n; ++k) {
                std::complex<double> s = 0;
                for (int j = 0; j < n; ++j)
                    s += orig[static_cast<std::size_t>(j)] *
                         std::polar(1.0, -2.0 * std::numbers::pi * j * k / n);
                CHECK(std::abs(s - z[static_cast<std::size_t>(k)]) < 1e-12 * n);
            }
        }
        f.inverse(z.data());
        double err = 0;
        for (int j = 0; j < n; ++j)
            err = std::max(err, std::abs(z[static_cast<std::size_t>(j)] - orig[static_cast<std::size_t>(j)]));
        CHECK(err <= 1e-13);
    }
    CHECK_THROWS_AS(Fft(12), Error);
    CHECK(is_power_of_two(256));
    CHECK_FALSE(is_power_of_two(96));
}

TEST_CASE("sin derivative on [0, 2pi) is cos")
{
    const int n = 64;
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j)
        v[static_cast<std::size_t>(j)] = std::sin(2.0 * std::numbers::pi * j / n);
    const auto d = spectral_derivative_line(v, 2.0 * std::numbers::pi);
    for (int j = 0; j < n; ++j)
        CHECK(std::fabs(d[static_cast<std::size_t>(j)] - std::cos(2.0 * std::numbers::pi * j / n)) < 1e-12);
}

TEST_CASE("constant field has zero derivative")
{
    const std::vector<double> v(32, 3.5);
    for (double x : spectral_derivative_line(v, 4.0))
        CHECK(std::fabs(x) < 1e-14);
}

TEST_CASE("gaussian derivative on a wide periodic domain")
{
    // sd = 0.5 on a 12-wide domain (24 standard deviations)
    const int n = 256;
    const double L = 12.0, x0 = -6.0;
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) {
        const double x = x0 + j * L / n;
        v[static_cast<std::size_t>(j)] = std::exp(-2.0 * x * x);
    }
    const auto d = spectral_derivative_line(v, L);
    double err = 0;
    for (int j = 0; j < n; ++j) {
        const double x = x0 + j * L / n;
        err = std::max(err, std::fabs(d[static_cast<std::size_t>(j)] + 4.0 * x * std::exp(-2.0 * x * x)));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("paired 3-D derivative matches the single-line path on every axis")
{
    SpectralGrid g;
    g.n = {16, 8, 32};
    g.length = {2.0, 3.0, 5.0};
    g.x_min = {-1.0, 0.0, -2.5};
    Array3 f(g.n);
    std::mt19937_64 rng(3);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = oracle::random_vector(1, rng)[0];
    for (int a = 0; a < 3; ++a) {
        const Array3 d = spectral_derivative(f, a, g);
        const AxisView v = axis_view(f.dims(), a);
        double err = 0;
        for (std::size_t o = 0; o < v.outer; ++o)
            for (std::size_t s = 0; s < v.inner; ++s) {
                std::vector<double> line(v.along);
                for (std::size_t i = 0; i < v.along; ++i)
                    line[i] = f[(o * v.along + i) * v.inner + s];
                const auto dl = spectral_derivative_line(line, g.length[a]);
                for (std::size_t i = 0; i < v.along; ++i)
                    err = std::max(err, std::fabs(dl[i] - d[(o * v.along + i) * v.inner + s]));
            }
        CHECK(err < 1e-11);
    }
    CHECK_THROWS_AS(spectral_derivative(Array3({16, 8, 16}), 0, g), Error);
}

TEST_CASE("wavenumbers zero the Nyquist entry")
{
    SpectralGrid g;
    g.n = {8, 1, 1};
    g.length = {2.0 * std::numbers::pi, 1, 1};
    const auto k = g.wavenumbers(0);
    const std::vector<double> expect{0, 1, 2, 3, 0, -3, -2, -1};
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(k[j] == doctest::Approx(expect[j]));
}

TEST_CASE("trigonometric resampling is exact for band-limited data")
{
    SpectralGrid g;
    g.n = {16, 1, 32};
    g.length = {4.0, 1.0, 6.0};
    g.x_min = {-2.0, 0.0, -3.0};
    auto fn = [](double x, double z) {
        return std::cos(2.0 * std::numbers::pi * x / 4.0) * std::sin(2.0 * std::numbers::pi * 3 * z / 6.0) + 0.25;
    };
    Array3 f(g.n);
    for (int i = 0; i < 16; ++i)
        for (int k = 0; k < 32; ++k)
            f(i, 0, k) = fn(g.coord(0, i), g.coord(2, k));
    std::array<std::vector<double>, 3> t;
    for (int i = 0; i <= 10; ++i)
        t[0].push_back(-1.7 + 0.3 * i);
    for (int k = 0; k <= 12; ++k)
        t[2].push_back(-3.0 + 0.5 * k); // includes grid nodes
    const Array3 r = trig_resample(f, g, t);
    CHECK(r.dims() == std::array<int, 3>{11, 1, 13});
    double err = 0;
    for (int i = 0; i <= 10; ++i)
        for (int k = 0; k <= 12; ++k)
            err = std::max(err, std::fabs(r(i, 0, k) - fn(t[0][static_cast<std::size_t>(i)], t[2][static_cast<std::size_t>(k)])));
    CHECK(err < 1e-12);

    // at grid nodes the interpolant returns the samples themselves
    std::array<std::vector<double>, 3> nodes;
    for (int i = 0; i < 16; ++i)
        nodes[0].push_back(g.coord(0, i));
    for (int k = 0; k < 32; ++k)
        nodes[2].push_back(g.coord(2, k));
    const Array3 same = trig_resample(f, g, nodes);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::fabs(same[i] - f[i]) < 1e-13);
}
