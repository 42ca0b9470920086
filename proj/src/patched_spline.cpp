#include "loss/patched_spline.hpp"

#include "loss/banded.hpp"
#include "loss/error.hpp"

#include <cmath>
#include <iomanip>
#include <mutex>
#include <string>
#include <tuple>

namespace loss {

PatchLayout1D::PatchLayout1D(int n, int p, int n_nb) : n_(n), p_(p), m_(0), n_nb_(n_nb)
{
    require(p >= 1, ErrorCode::layout, "patch count must be >= 1");
    require(n_nb >= 1, ErrorCode::layout, "n_nb must be >= 1");
    require(n % p == 0, ErrorCode::layout,
            std::to_string(n) + " intervals not divisible by " + std::to_string(p) + " patches");
    m_ = n / p;
    if (p > 1)
        require(m_ >= n_nb + 2, ErrorCode::layout,
                "patch width " + std::to_string(m_) + " < n_nb + 2 = " + std::to_string(n_nb + 2));
}

BandedLu natural_system_matrix(const Grid1D& grid)
{
    const int n = grid.n();
    const double h2 = grid.h() * grid.h();
    BandedLu a(n + 3, 2, 2);
    // storage row r <-> paper index r - 1
    a.at(0, 0) = 1.0 / h2;
    a.at(0, 1) = -2.0 / h2;
    a.at(0, 2) = 1.0 / h2;
    for (int r = 1; r <= n + 1; ++r) {
        a.at(r, r - 1) = 1.0 / 6.0;
        a.at(r, r) = 4.0 / 6.0;
        a.at(r, r + 1) = 1.0 / 6.0;
    }
    a.at(n + 2, n) = 1.0 / h2;
    a.at(n + 2, n + 1) = -2.0 / h2;
    a.at(n + 2, n + 2) = 1.0 / h2;
    return a;
}

std::map<int, std::vector<double>> compute_inverse_rows(const Grid1D& grid, std::span<const int> rows)
{
    const int n = grid.n();
    BandedLu at = natural_system_matrix(grid).transposed();
    at.factor();
    std::map<int, std::vector<double>> out;
    for (int i : rows) {
        require(i >= -1 && i <= n + 1, ErrorCode::domain, "inverse row index " + std::to_string(i) + " out of range");
        if (out.count(i))
            continue;
        std::vector<double> e(static_cast<std::size_t>(n + 3), 0.0);
        e[static_cast<std::size_t>(i + 1)] = 1.0;
        at.solve(e);
        out.emplace(i, std::move(e));
    }
    return out;
}

namespace {

// h-normalized tables, computed on a unit-spacing grid.
struct NormalizedStencil {
    std::vector<double> c0;
    std::vector<std::vector<double>> c_minus, c_plus;
    std::vector<double> c_left, c_right;
};

NormalizedStencil compute_normalized(int n, int p, int n_nb)
{
    const Grid1D unit(0.0, static_cast<double>(n), n);
    const int m = n / p;
    std::vector<int> rows{-1, 1, n - 1, n + 1};
    for (int l = 1; l < p; ++l) {
        rows.push_back(l * m - 1);
        rows.push_back(l * m + 1);
    }
    const auto b = compute_inverse_rows(unit, rows);
    auto B = [&](int i, int j) { return b.at(i)[static_cast<std::size_t>(j + 1)]; };

    NormalizedStencil s;
    for (int l = 1; l < p; ++l) {
        const int k = l * m;
        s.c0.push_back((-B(k - 1, k) + B(k + 1, k)) / 2.0);
        std::vector<double> cm(static_cast<std::size_t>(n_nb)), cp(static_cast<std::size_t>(n_nb));
        for (int j = 1; j <= n_nb; ++j) {
            cm[static_cast<std::size_t>(j - 1)] = (-B(k - 1, k - j) + B(k + 1, k - j)) / 2.0;
            cp[static_cast<std::size_t>(j - 1)] = (-B(k - 1, k + j) + B(k + 1, k + j)) / 2.0;
        }
        s.c_minus.push_back(std::move(cm));
        s.c_plus.push_back(std::move(cp));
    }
    for (int j = 0; j <= n_nb; ++j) {
        s.c_left.push_back((-B(-1, j) + B(1, j)) / 2.0);
        s.c_right.push_back((-B(n - 1, n - j) + B(n + 1, n - j)) / 2.0);
    }
    return s;
}

const NormalizedStencil& cached_normalized(int n, int p, int n_nb)
{
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<NormalizedStencil>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, p, n_nb}];
    if (!slot)
        slot = std::make_unique<NormalizedStencil>(compute_normalized(n, p, n_nb));
    return *slot;
}

std::vector<double> scaled(const std::vector<double>& v, double h)
{
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[i] / h;
    return out;
}

} // namespace

PmbcStencil build_pmbc_stencils(const Grid1D& grid, const PatchLayout1D& layout)
{
    require(layout.n() == grid.n(), ErrorCode::layout, "layout/grid interval count mismatch");
    const int n_nb = layout.n_nb();
    require(n_nb <= grid.n(), ErrorCode::layout, "n_nb exceeds grid size");
    const NormalizedStencil& ns = cached_normalized(grid.n(), layout.p(), n_nb);
    const double h = grid.h();

    PmbcStencil s;
    s.h = h;
    s.n_nb = n_nb;
    s.p = layout.p();
    s.m = layout.m();
    s.c0 = scaled(ns.c0, h);
    for (std::size_t l = 0; l < ns.c_minus.size(); ++l) {
        s.c_minus.push_back(scaled(ns.c_minus[l], h));
        s.c_plus.push_back(scaled(ns.c_plus[l], h));
    }
    s.c_left = scaled(ns.c_left, h);
    s.c_right = scaled(ns.c_right, h);
    return s;
}

void PmbcStencil::write_table(std::ostream& os) const
{
    os << "# junction j c_minus c_plus (scaled by 1/h, h=" << h << ")\n";
    os << std::setprecision(17);
    for (int l = 1; l < p; ++l) {
        os << l << " 0 " << c0[static_cast<std::size_t>(l - 1)] / 2 << ' ' << c0[static_cast<std::size_t>(l - 1)] / 2
           << '\n';
        for (int j = 1; j <= n_nb; ++j)
            os << l << ' ' << j << ' ' << c_minus[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(j - 1)]
               << ' ' << c_plus[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(j - 1)] << '\n';
    }
    os << "# end closures: j c_left c_right\n";
    for (int j = 0; j <= n_nb; ++j)
        os << "end " << j << ' ' << c_left[static_cast<std::size_t>(j)] << ' ' << c_right[static_cast<std::size_t>(j)]
           << '\n';
}

double junction_partial_sum(std::span<const double> samples, const PmbcStencil& st, JunctionSide side, int l)
{
    require(l >= 1 && l < st.p, ErrorCode::domain, "junction index out of range");
    require(samples.size() >= static_cast<std::size_t>(st.n_nb + 1), ErrorCode::dimension,
            "junction partial sum: insufficient local samples");
    const auto li = static_cast<std::size_t>(l - 1);
    if (side == JunctionSide::left) {
        const std::size_t k = samples.size() - 1;
        double s = 0.5 * st.c0[li] * samples[k];
        for (int j = 1; j <= st.n_nb; ++j)
            s += st.c_minus[li][static_cast<std::size_t>(j - 1)] * samples[k - static_cast<std::size_t>(j)];
        return s;
    }
    double s = 0.5 * st.c0[li] * samples[0];
    for (int j = 1; j <= st.n_nb; ++j)
        s += st.c_plus[li][static_cast<std::size_t>(j - 1)] * samples[static_cast<std::size_t>(j)];
    return s;
}

double left_end_slope(std::span<const double> samples, const PmbcStencil& st)
{
    require(samples.size() >= static_cast<std::size_t>(st.n_nb + 1), ErrorCode::dimension,
            "end closure: insufficient local samples");
    double s = 0.0;
    for (int j = 0; j <= st.n_nb; ++j)
        s += st.c_left[static_cast<std::size_t>(j)] * samples[static_cast<std::size_t>(j)];
    return s;
}

double right_end_slope(std::span<const double> samples, const PmbcStencil& st)
{
    require(samples.size() >= static_cast<std::size_t>(st.n_nb + 1), ErrorCode::dimension,
            "end closure: insufficient local samples");
    const std::size_t k = samples.size() - 1;
    double s = 0.0;
    for (int j = 0; j <= st.n_nb; ++j)
        s += st.c_right[static_cast<std::size_t>(j)] * samples[k - static_cast<std::size_t>(j)];
    return s;
}

LocalSplineSystem::LocalSplineSystem(int m, double h)
    : m_(m), h_(h), inv_2h_(1.0 / (2.0 * h)), l_(static_cast<std::size_t>(m + 3), 0.0),
      d_(static_cast<std::size_t>(m + 3), 0.0), inv_d_(static_cast<std::size_t>(m + 3), 0.0)
{
    require(m >= 2, ErrorCode::domain, "local system needs m >= 2");
    d_[1] = 4.0;
    l_[1] = 0.25;
    d_[2] = 4.0 - 2.0 * l_[1];
    for (int i = 2; i <= m; ++i) {
        l_[static_cast<std::size_t>(i)] = 1.0 / d_[static_cast<std::size_t>(i)];
        d_[static_cast<std::size_t>(i + 1)] = 4.0 - l_[static_cast<std::size_t>(i)];
    }
    l_[static_cast<std::size_t>(m + 1)] = 1.0 / (d_[static_cast<std::size_t>(m)] * d_[static_cast<std::size_t>(m + 1)]);
    d_[static_cast<std::size_t>(m + 2)] = 1.0 - l_[static_cast<std::size_t>(m + 1)];
    for (int i = 1; i <= m + 2; ++i) {
        require(d_[static_cast<std::size_t>(i)] != 0.0, ErrorCode::numeric, "zero pivot in local system");
        inv_d_[static_cast<std::size_t>(i)] = 1.0 / d_[static_cast<std::size_t>(i)];
    }
}

void LocalSplineSystem::coefficients(const double* v, std::ptrdiff_t stride, int lanes, const double* phi_l,
                                     const double* phi_r, double* coef) const
{
    const int m = m_;
    const double h = h_;
    auto row = [&](int i) { return coef + static_cast<std::ptrdiff_t>(i + 1) * lanes; };
    auto sample = [&](int i) { return v + static_cast<std::ptrdiff_t>(i) * stride; };

    // L sweep
    {
        double* y = row(-1);
        for (int q = 0; q < lanes; ++q)
            y[q] = phi_l[q];
        double* y0 = row(0);
        const double* s0 = sample(0);
        const double f = h / 3.0;
        for (int q = 0; q < lanes; ++q)
            y0[q] = s0[q] + f * y[q];
    }
    for (int i = 1; i <= m; ++i) {
        double* y = row(i);
        const double* yp = row(i - 1);
        const double* s = sample(i);
        const double li = l_[static_cast<std::size_t>(i)];
        for (int q = 0; q < lanes; ++q)
            y[q] = s[q] - li * yp[q];
    }
    {
        double* y = row(m + 1);
        const double* ym1 = row(m - 1);
        const double* ym = row(m);
        const double a = 3.0 * l_[static_cast<std::size_t>(m)] / h;
        const double b = 3.0 * l_[static_cast<std::size_t>(m + 1)] / h;
        for (int q = 0; q < lanes; ++q)
            y[q] = phi_r[q] + a * ym1[q] - b * ym[q];
    }
    // U sweep on 6y
    {
        double* x = row(m + 1);
        const double f = 2.0 * h * inv_d_[static_cast<std::size_t>(m + 2)];
        for (int q = 0; q < lanes; ++q)
            x[q] *= f;
    }
    for (int i = m; i >= 1; --i) {
        double* x = row(i);
        const double* xn = row(i + 1);
        const double inv = inv_d_[static_cast<std::size_t>(i + 1)];
        for (int q = 0; q < lanes; ++q)
            x[q] = (6.0 * x[q] - xn[q]) * inv;
    }
    {
        double* x0 = row(0);
        const double* x1 = row(1);
        const double inv = inv_d_[1];
        for (int q = 0; q < lanes; ++q)
            x0[q] = (6.0 * x0[q] - 2.0 * x1[q]) * inv;
        double* xm = row(-1);
        const double f = 2.0 * h;
        for (int q = 0; q < lanes; ++q)
            xm[q] = x1[q] - f * xm[q];
    }
}

void LocalSplineSystem::derivative(const double* v, std::ptrdiff_t stride, int lanes, const double* phi_l,
                                   const double* phi_r, double* out, std::ptrdiff_t out_stride, double* scratch) const
{
    coefficients(v, stride, lanes, phi_l, phi_r, scratch);
    const double s = inv_2h_;
    for (int i = 0; i <= m_; ++i) {
        const double* lo = scratch + static_cast<std::ptrdiff_t>(i) * lanes;
        const double* hi = scratch + static_cast<std::ptrdiff_t>(i + 2) * lanes;
        double* o = out + static_cast<std::ptrdiff_t>(i) * out_stride;
        for (int q = 0; q < lanes; ++q)
            o[q] = (hi[q] - lo[q]) * s;
    }
}

SplineCoefficients fit_local(std::span<const double> samples, double phi_l, double phi_r,
                             const LocalSplineSystem& system)
{
    const int m = system.m();
    require(samples.size() == static_cast<std::size_t>(m + 1), ErrorCode::dimension,
            "fit_local: expected " + std::to_string(m + 1) + " samples");
    std::vector<double> c(static_cast<std::size_t>(m + 3));
    system.coefficients(samples.data(), 1, 1, &phi_l, &phi_r, c.data());
    return SplineCoefficients(Grid1D(0.0, m * system.h(), m), std::move(c));
}

namespace {

// Boundary slopes of every patch, assembled as own half + neighbour half.
void patch_slopes(std::span<const double> samples, const PatchLayout1D& layout, const PmbcStencil& st,
                  std::vector<double>& phi_l, std::vector<double>& phi_r)
{
    const int p = layout.p();
    const int m = layout.m();
    phi_l.assign(static_cast<std::size_t>(p), 0.0);
    phi_r.assign(static_cast<std::size_t>(p), 0.0);
    auto patch = [&](int q) { return samples.subspan(static_cast<std::size_t>(q * m), static_cast<std::size_t>(m + 1)); };
    for (int q = 0; q < p; ++q) {
        const auto own = patch(q);
        if (q == 0) {
            phi_l[0] = left_end_slope(own, st);
        } else {
            const double mine = junction_partial_sum(own, st, JunctionSide::right, q);
            const double theirs = junction_partial_sum(patch(q - 1), st, JunctionSide::left, q);
            phi_l[static_cast<std::size_t>(q)] = mine + theirs;
        }
        if (q == p - 1) {
            phi_r[static_cast<std::size_t>(q)] = right_end_slope(own, st);
        } else {
            const double mine = junction_partial_sum(own, st, JunctionSide::left, q + 1);
            const double theirs = junction_partial_sum(patch(q + 1), st, JunctionSide::right, q + 1);
            phi_r[static_cast<std::size_t>(q)] = mine + theirs;
        }
    }
}

} // namespace

std::vector<double> patched_derivative_line(std::span<const double> samples, const Grid1D& grid,
                                            const PatchLayout1D& layout, const PmbcStencil& st)
{
    require(samples.size() == static_cast<std::size_t>(grid.n() + 1), ErrorCode::dimension,
            "patched derivative: sample count mismatch");
    require(layout.n() == grid.n() && st.p == layout.p() && st.n_nb == layout.n_nb(), ErrorCode::layout,
            "patched derivative: layout and stencil disagree");
    if (layout.p() == 1)
        return derivative_at_knots(fit_global(samples, grid));

    const int p = layout.p();
    const int m = layout.m();
    std::vector<double> phi_l, phi_r;
    patch_slopes(samples, layout, st, phi_l, phi_r);

    LocalSplineSystem sys(m, grid.h());
    std::vector<double> out(samples.size());
    std::vector<double> local(static_cast<std::size_t>(m + 1)), scratch(static_cast<std::size_t>(m + 3));
    double prev_right = 0.0;
    for (int q = 0; q < p; ++q) {
        sys.derivative(samples.data() + q * m, 1, 1, &phi_l[static_cast<std::size_t>(q)],
                       &phi_r[static_cast<std::size_t>(q)], local.data(), 1, scratch.data());
        if (q > 0) {
            const double scale = std::max(1.0, std::fabs(phi_l[static_cast<std::size_t>(q)]));
            if (std::fabs(local[0] - prev_right) > 1e-13 * scale * std::max(1.0, 1.0 / grid.h()))
                fail(ErrorCode::internal, "junction derivative differs between patches");
            local[0] = phi_l[static_cast<std::size_t>(q)];
        }
        if (q < p - 1) {
            prev_right = local[static_cast<std::size_t>(m)];
            local[static_cast<std::size_t>(m)] = phi_r[static_cast<std::size_t>(q)];
        }
        for (int i = 0; i <= m; ++i)
            out[static_cast<std::size_t>(q * m + i)] = local[static_cast<std::size_t>(i)];
    }
    return out;
}

std::vector<double> patched_coefficients_line(std::span<const double> samples, const Grid1D& grid,
                                              const PatchLayout1D& layout, const PmbcStencil& st)
{
    require(samples.size() == static_cast<std::size_t>(grid.n() + 1), ErrorCode::dimension,
            "patched coefficients: sample count mismatch");
    if (layout.p() == 1)
        return fit_global(samples, grid).values();
    const int p = layout.p();
    const int m = layout.m();
    std::vector<double> phi_l, phi_r;
    patch_slopes(samples, layout, st, phi_l, phi_r);
    LocalSplineSystem sys(m, grid.h());
    std::vector<double> out(static_cast<std::size_t>(grid.n() + 3));
    std::vector<double> c(static_cast<std::size_t>(m + 3));
    for (int q = p - 1; q >= 0; --q) {
        sys.coefficients(samples.data() + q * m, 1, 1, &phi_l[static_cast<std::size_t>(q)],
                         &phi_r[static_cast<std::size_t>(q)], c.data());
        for (int i = 0; i < m + 3; ++i)
            out[static_cast<std::size_t>(q * m + i)] = c[static_cast<std::size_t>(i)];
    }
    return out;
}

} // namespace loss
