#pragma once

#include "loss/spline.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace loss {

/// Split of n intervals into p patches of m intervals. Patch q (0-based) covers
/// knots [q*m, (q+1)*m]; junction l (1..p-1) is knot l*m and is stored by both
/// neighbours.
class PatchLayout1D {
public:
    PatchLayout1D(int n, int p, int n_nb);

    int n() const { return n_; }
    int p() const { return p_; }
    int m() const { return m_; }
    int n_nb() const { return n_nb_; }
    int junction(int l) const { return l * m_; }
    int patch_begin(int q) const { return q * m_; }

private:
    int n_, p_, m_, n_nb_;
};

/// Rows of the inverse of the natural-closure matrix (paper-scaled end rows).
/// Row and column index i is stored at position i + 1.
std::map<int, std::vector<double>> compute_inverse_rows(const Grid1D& grid, std::span<const int> rows);

/// The (n+3)x(n+3) natural-closure matrix in band form (kl = ku = 2).
class BandedLu;
BandedLu natural_system_matrix(const Grid1D& grid);

/// Junction and end-closure slope stencils. Values are scaled by 1/h.
struct PmbcStencil {
    double h = 0.0;
    int n_nb = 0;
    int p = 1;
    int m = 0;
    std::vector<double> c0;                    // index l-1, l = 1..p-1
    std::vector<std::vector<double>> c_minus;  // [l-1][j-1], j = 1..n_nb
    std::vector<std::vector<double>> c_plus;   // [l-1][j-1]
    std::vector<double> c_left;                // j = 0..n_nb
    std::vector<double> c_right;               // j = 0..n_nb

    void write_table(std::ostream& os) const;
};

PmbcStencil build_pmbc_stencils(const Grid1D& grid, const PatchLayout1D& layout);

enum class JunctionSide { left, right };

/// Half of the junction slope contributed by one patch. `samples` is the patch-local
/// line (m+1 values). A patch on the left of junction l owns local index m.
double junction_partial_sum(std::span<const double> samples, const PmbcStencil& stencil, JunctionSide side, int l);

double left_end_slope(std::span<const double> samples, const PmbcStencil& stencil);
double right_end_slope(std::span<const double> samples, const PmbcStencil& stencil);

/// Hermite-closed local system on m intervals with its explicit LU factors.
class LocalSplineSystem {
public:
    LocalSplineSystem(int m, double h);

    int m() const { return m_; }
    double h() const { return h_; }
    // l(i) for i = 1..m+1, d(i) for i = 1..m+2
    double l(int i) const { return l_[static_cast<std::size_t>(i)]; }
    double d(int i) const { return d_[static_cast<std::size_t>(i)]; }

    /// Batched solve. Layout as NaturalSplineSolver; phi_l / phi_r hold one value per lane.
    void coefficients(const double* v, std::ptrdiff_t stride, int lanes, const double* phi_l,
                      const double* phi_r, double* coef) const;
    // scratch needs (m + 3) * lanes doubles
    void derivative(const double* v, std::ptrdiff_t stride, int lanes, const double* phi_l,
                    const double* phi_r, double* out, std::ptrdiff_t out_stride, double* scratch) const;

private:
    int m_;
    double h_;
    double inv_2h_;
    std::vector<double> l_, d_, inv_d_;
};

/// Patch-local coefficients (m + 3 values) on a patch-local grid [0, m*h].
SplineCoefficients fit_local(std::span<const double> samples, double phi_l, double phi_r,
                             const LocalSplineSystem& system);

std::vector<double> patched_derivative_line(std::span<const double> samples, const Grid1D& grid,
                                            const PatchLayout1D& layout, const PmbcStencil& stencil);

/// Patched reconstruction of all global coefficients (shared knots taken from the left patch).
std::vector<double> patched_coefficients_line(std::span<const double> samples, const Grid1D& grid,
                                              const PatchLayout1D& layout, const PmbcStencil& stencil);

} // namespace loss
