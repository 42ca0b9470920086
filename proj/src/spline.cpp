#include "loss/spline.hpp"

#include "loss/error.hpp"

#include <cmath>
#include <string>

namespace loss {

Grid1D::Grid1D(double x_min, double x_max, int n) : x_min_(x_min), x_max_(x_max), n_(n), h_(0.0)
{
    require(n >= 4, ErrorCode::domain, "grid needs at least 4 intervals, got " + std::to_string(n));
    require(x_max > x_min, ErrorCode::domain, "grid extent must be positive");
    h_ = (x_max - x_min) / n;
}

bool operator==(const Grid1D& a, const Grid1D& b)
{
    return a.x_min() == b.x_min() && a.x_max() == b.x_max() && a.n() == b.n();
}

SplineCoefficients::SplineCoefficients(const Grid1D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    require(values_.size() == static_cast<std::size_t>(grid.n() + 3), ErrorCode::dimension,
            "coefficient array must have n + 3 entries");
}

double eval_basis(int i, double x, const Grid1D& grid)
{
    const double t = (x - grid.knot(i)) / grid.h();
    const double a = std::fabs(t);
    if (a >= 2.0)
        return 0.0;
    if (a <= 1.0)
        return 2.0 / 3.0 - t * t + 0.5 * a * a * a;
    const double r = 2.0 - a;
    return r * r * r / 6.0;
}

double eval_basis_derivative(int i, double x, const Grid1D& grid)
{
    const double t = (x - grid.knot(i)) / grid.h();
    const double a = std::fabs(t);
    if (a >= 2.0)
        return 0.0;
    double dt;
    if (a <= 1.0) {
        dt = -2.0 * t + 1.5 * t * a;
    } else {
        const double r = 2.0 - a;
        dt = (t > 0 ? -0.5 : 0.5) * r * r;
    }
    return dt / grid.h();
}

NaturalSplineSolver::NaturalSplineSolver(int n, double h) : n_(n), h_(h), inv_2h_(1.0 / (2.0 * h)), inv_(n + 1, 0.0)
{
    require(n >= 4, ErrorCode::domain, "natural spline needs n >= 4");
    // Interior rows (1,4,1) on unknowns 1..n-1, ends fixed by v~_0 = v_0, v~_n = v_n.
    double prev = 0.0;
    for (int i = 1; i < n; ++i) {
        const double piv = 4.0 - prev;
        inv_[i] = 1.0 / piv;
        prev = inv_[i];
    }
}

void NaturalSplineSolver::coefficients(const double* v, std::ptrdiff_t stride, int lanes, double* coef) const
{
    const int n = n_;
    auto row = [&](int i) { return coef + static_cast<std::ptrdiff_t>(i + 1) * lanes; };
    auto sample = [&](int i) { return v + static_cast<std::ptrdiff_t>(i) * stride; };

    double* c0 = row(0);
    double* cn = row(n);
    const double* v0 = sample(0);
    const double* vn = sample(n);
    for (int q = 0; q < lanes; ++q) {
        c0[q] = v0[q];
        cn[q] = vn[q];
    }
    // forward elimination, w stored in place
    {
        double* w = row(1);
        const double* s = sample(1);
        const double inv = inv_[1];
        for (int q = 0; q < lanes; ++q)
            w[q] = (6.0 * s[q] - v0[q]) * inv;
    }
    for (int i = 2; i < n; ++i) {
        double* w = row(i);
        const double* wp = row(i - 1);
        const double* s = sample(i);
        const double inv = inv_[i];
        if (i == n - 1) {
            for (int q = 0; q < lanes; ++q)
                w[q] = ((6.0 * s[q] - vn[q]) - wp[q]) * inv;
        } else {
            for (int q = 0; q < lanes; ++q)
                w[q] = (6.0 * s[q] - wp[q]) * inv;
        }
    }
    for (int i = n - 2; i >= 1; --i) {
        double* c = row(i);
        const double* cnext = row(i + 1);
        const double f = inv_[i];
        for (int q = 0; q < lanes; ++q)
            c[q] -= f * cnext[q];
    }
    double* cm = row(-1);
    const double* c1 = row(1);
    double* cn1 = row(n + 1);
    const double* cnm = row(n - 1);
    for (int q = 0; q < lanes; ++q) {
        cm[q] = 2.0 * c0[q] - c1[q];
        cn1[q] = 2.0 * cn[q] - cnm[q];
    }
}

void NaturalSplineSolver::derivative(const double* v, std::ptrdiff_t stride, int lanes, double* out,
                                     std::ptrdiff_t out_stride, double* scratch) const
{
    coefficients(v, stride, lanes, scratch);
    const double s = inv_2h_;
    for (int i = 0; i <= n_; ++i) {
        const double* lo = scratch + static_cast<std::ptrdiff_t>(i) * lanes;
        const double* hi = scratch + static_cast<std::ptrdiff_t>(i + 2) * lanes;
        double* o = out + static_cast<std::ptrdiff_t>(i) * out_stride;
        for (int q = 0; q < lanes; ++q)
            o[q] = (hi[q] - lo[q]) * s;
    }
}

SplineCoefficients fit_global(std::span<const double> samples, const Grid1D& grid)
{
    require(samples.size() == static_cast<std::size_t>(grid.n() + 1), ErrorCode::dimension,
            "fit_global: expected " + std::to_string(grid.n() + 1) + " samples, got " +
                std::to_string(samples.size()));
    NaturalSplineSolver solver(grid.n(), grid.h());
    std::vector<double> c(static_cast<std::size_t>(grid.n() + 3));
    solver.coefficients(samples.data(), 1, 1, c.data());
    return SplineCoefficients(grid, std::move(c));
}

std::vector<double> derivative_at_knots(const SplineCoefficients& coeffs)
{
    const Grid1D& g = coeffs.grid();
    const double s = 1.0 / (2.0 * g.h());
    std::vector<double> out(static_cast<std::size_t>(g.n() + 1));
    for (int i = 0; i <= g.n(); ++i)
        out[static_cast<std::size_t>(i)] = (coeffs(i + 1) - coeffs(i - 1)) * s;
    return out;
}

double eval_spline(const SplineCoefficients& coeffs, double x)
{
    const Grid1D& g = coeffs.grid();
    const double tol = 1e-12 * (g.x_max() - g.x_min());
    if (!(x >= g.x_min() - tol && x <= g.x_max() + tol))
        fail(ErrorCode::domain, "eval_spline: x outside [x_min, x_max]");
    int k = static_cast<int>(std::floor((x - g.x_min()) / g.h()));
    if (k < 0)
        k = 0;
    if (k > g.n() - 1)
        k = g.n() - 1;
    double sum = 0.0;
    for (int j = k - 1; j <= k + 2; ++j)
        sum += coeffs(j) * eval_basis(j, x, g);
    return sum;
}

} // namespace loss
