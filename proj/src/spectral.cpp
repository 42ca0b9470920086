#include "loss/spectral.hpp"

#include "loss/error.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace loss {

std::vector<double> SpectralGrid::wavenumbers(int a) const
{
    const int m = n[a];
    std::vector<double> k(static_cast<std::size_t>(m), 0.0);
    const double base = 2.0 * std::numbers::pi / length[a];
    for (int j = 0; j < m; ++j) {
        if (2 * j < m)
            k[static_cast<std::size_t>(j)] = base * j;
        else if (2 * j > m)
            k[static_cast<std::size_t>(j)] = base * (j - m);
    }
    return k;
}

namespace {

const Fft& fft_for(int n)
{
    thread_local std::map<int, std::unique_ptr<Fft>> cache;
    auto& f = cache[n];
    if (!f)
        f = std::make_unique<Fft>(n);
    return *f;
}

void apply_ik(std::complex<double>* z, const std::vector<double>& k)
{
    for (std::size_t j = 0; j < k.size(); ++j)
        z[j] = std::complex<double>(-k[j] * z[j].imag(), k[j] * z[j].real());
}

} // namespace

std::vector<double> spectral_derivative_line(std::span<const double> v, double length)
{
    const int n = static_cast<int>(v.size());
    SpectralGrid g;
    g.n = {n, 1, 1};
    g.length = {length, 1, 1};
    const Fft& f = fft_for(n);
    std::vector<std::complex<double>> z(v.begin(), v.end());
    f.forward(z.data());
    apply_ik(z.data(), g.wavenumbers(0));
    f.inverse(z.data());
    double scale = 0.0, resid = 0.0;
    std::vector<double> out(v.size());
    for (int j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(j)] = z[static_cast<std::size_t>(j)].real();
        scale = std::max(scale, std::fabs(z[static_cast<std::size_t>(j)].real()));
        resid = std::max(resid, std::fabs(z[static_cast<std::size_t>(j)].imag()));
    }
    if (resid > 1e-12 * std::max(1.0, scale))
        fail(ErrorCode::numeric, "spectral derivative left an imaginary residue");
    return out;
}

void spectral_derivative_into(const Array3& field, int axis, const SpectralGrid& grid, Array3& out)
{
    require(field.dims() == grid.n, ErrorCode::dimension, "spectral derivative: field shape does not match grid");
    require(grid.n[axis] > 1, ErrorCode::dimension, "spectral derivative along an unused axis");
    if (out.dims() != field.dims())
        out = Array3(field.dims());
    const AxisView v = axis_view(field.dims(), axis);
    const int n = grid.n[axis];
    const Fft& f = fft_for(n);
    const std::vector<double> k = grid.wavenumbers(axis);
    std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
    const std::size_t lines = v.outer * v.inner;
    auto addr = [&](std::size_t line) { return (line / v.inner) * v.along * v.inner + line % v.inner; };
    const double* in = field.data();
    double* o = out.data();
    for (std::size_t l = 0; l < lines; l += 2) {
        const bool pair = l + 1 < lines;
        const std::size_t a0 = addr(l);
        const std::size_t a1 = pair ? addr(l + 1) : 0;
        for (std::size_t i = 0; i < v.along; ++i)
            z[i] = {in[a0 + i * v.inner], pair ? in[a1 + i * v.inner] : 0.0};
        f.forward(z.data());
        apply_ik(z.data(), k);
        f.inverse(z.data());
        for (std::size_t i = 0; i < v.along; ++i) {
            o[a0 + i * v.inner] = z[i].real();
            if (pair)
                o[a1 + i * v.inner] = z[i].imag();
        }
    }
}

Array3 spectral_derivative(const Array3& field, int axis, const SpectralGrid& grid)
{
    Array3 out(field.dims());
    spectral_derivative_into(field, axis, grid, out);
    return out;
}

void SpectralDerivative::start(std::span<const DerivativeTask> tasks)
{
    for (const auto& t : tasks)
        require(t.in->patches.size() == 1, ErrorCode::layout, "spectral derivative works on a single patch");
    tasks_.assign(tasks.begin(), tasks.end());
}

void SpectralDerivative::solve(int q, int task, Array3& out)
{
    (void)q;
    const DerivativeTask& t = tasks_[static_cast<std::size_t>(task)];
    const Array3& a = t.in->patches[0];
    if (out.dims() != a.dims())
        out = Array3(a.dims());
    spectral_derivative_into(a, t.axis, grid_, out);
}

void SpectralDerivative::differentiate(const PatchedField& in, int axis, PatchedField& out)
{
    require(in.patches.size() == 1, ErrorCode::layout, "spectral derivative works on a single patch");
    if (out.patches.size() != 1)
        out.patches.assign(1, Array3(in.patches[0].dims()));
    spectral_derivative_into(in.patches[0], axis, grid_, out.patches[0]);
}

namespace {

// Weights of the periodic trigonometric interpolant (Nyquist term as a cosine).
std::vector<double> trig_weights(const SpectralGrid& g, int a, const std::vector<double>& xs)
{
    const int n = g.n[a];
    const double L = g.length[a];
    std::vector<double> w(xs.size() * static_cast<std::size_t>(n));
    for (std::size_t t = 0; t < xs.size(); ++t) {
        for (int j = 0; j < n; ++j) {
            const double theta = 2.0 * std::numbers::pi * (xs[t] - g.coord(a, j)) / L;
            const double sh = std::sin(0.5 * theta);
            double dir;
            if (std::fabs(sh) < 1e-13)
                dir = (n - 1) * std::cos(0.5 * (n - 1) * theta) / std::cos(0.5 * theta);
            else
                dir = std::sin(0.5 * (n - 1) * theta) / sh;
            w[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = (dir + std::cos(0.5 * n * theta)) / n;
        }
    }
    return w;
}

} // namespace

Array3 trig_resample(const Array3& field, const SpectralGrid& grid, const std::array<std::vector<double>, 3>& targets)
{
    require(field.dims() == grid.n, ErrorCode::dimension, "resample: field shape does not match grid");
    Array3 cur = field;
    for (int a = 0; a < 3; ++a) {
        if (grid.n[a] == 1) {
            require(targets[a].size() <= 1, ErrorCode::dimension, "resample: unused axis takes one target");
            continue;
        }
        const auto& xs = targets[a];
        require(!xs.empty(), ErrorCode::dimension, "resample: no targets");
        const auto w = trig_weights(grid, a, xs);
        auto d = cur.dims();
        const AxisView v = axis_view(d, a);
        d[a] = static_cast<int>(xs.size());
        Array3 next(d);
        const std::size_t nt = xs.size();
        for (std::size_t o = 0; o < v.outer; ++o) {
            const double* src = cur.data() + o * v.along * v.inner;
            double* dst = next.data() + o * nt * v.inner;
            for (std::size_t t = 0; t < nt; ++t) {
                double* row = dst + t * v.inner;
                const double* wt = w.data() + t * v.along;
                for (std::size_t j = 0; j < v.along; ++j) {
                    const double c = wt[j];
                    const double* sr = src + j * v.inner;
                    for (std::size_t s = 0; s < v.inner; ++s)
                        row[s] += c * sr[s];
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace loss
