#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace loss {

/// Uniform grid on [x_min, x_max] with n intervals (n+1 knots).
class Grid1D {
public:
    Grid1D(double x_min, double x_max, int n);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    int n() const { return n_; }
    double h() const { return h_; }
    double knot(int i) const { return x_min_ + i * h_; }

private:
    double x_min_;
    double x_max_;
    int n_;
    double h_;
};

bool operator==(const Grid1D& a, const Grid1D& b);

/// Coefficients v~_{-1} .. v~_{n+1}. Storage is 0-based: values()[i + 1] holds v~_i.
class SplineCoefficients {
public:
    SplineCoefficients(const Grid1D& grid, std::vector<double> values);

    const Grid1D& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator()(int i) const { return values_[static_cast<std::size_t>(i + 1)]; }
    std::size_t size() const { return values_.size(); }

private:
    Grid1D grid_;
    std::vector<double> values_;
};

double eval_basis(int i, double x, const Grid1D& grid);
double eval_basis_derivative(int i, double x, const Grid1D& grid);

SplineCoefficients fit_global(std::span<const double> samples, const Grid1D& grid);
std::vector<double> derivative_at_knots(const SplineCoefficients& coeffs);
double eval_spline(const SplineCoefficients& coeffs, double x);

/// Precomputed sweep factors for the natural-closure fit on n intervals.
/// Works on `lanes` independent lines at once: sample i of lane q sits at
/// v[i * stride + q]; coefficient rows are packed as coef[(i + 1) * lanes + q].
class NaturalSplineSolver {
public:
    NaturalSplineSolver(int n, double h);

    int n() const { return n_; }
    double h() const { return h_; }

    void coefficients(const double* v, std::ptrdiff_t stride, int lanes, double* coef) const;

    // scratch needs (n + 3) * lanes doubles
    void derivative(const double* v, std::ptrdiff_t stride, int lanes, double* out,
                    std::ptrdiff_t out_stride, double* scratch) const;

private:
    int n_;
    double h_;
    double inv_2h_;
    std::vector<double> inv_; // 1 / pivot for interior rows 1..n-1
};

} // namespace loss
