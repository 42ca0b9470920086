#include "loss/physics.hpp"

#include "loss/error.hpp"

#include <cmath>
#include <numbers>

namespace loss {

MaterialModel::Props MaterialModel::at(double x, double y, double z) const
{
    Props p{rho, cp, cs};
    const double c[3] = {x, y, z};
    for (const auto& b : boxes) {
        bool inside = true;
        for (int a = 0; a < 3; ++a)
            inside = inside && c[a] >= b.lo[a] && c[a] <= b.hi[a];
        if (inside)
            p = {b.rho, b.cp, b.cs};
    }
    return p;
}

double MaterialModel::max_cp() const
{
    double m = cp;
    for (const auto& b : boxes)
        m = std::max(m, b.cp);
    return m;
}

void MaterialModel::validate(bool elastic) const
{
    auto check = [&](double r, double p, double s, const char* what) {
        require(r > 0, ErrorCode::config, std::string(what) + ": density must be positive");
        require(p > 0, ErrorCode::config, std::string(what) + ": cp must be positive");
        if (elastic) {
            require(s >= 0, ErrorCode::config, std::string(what) + ": cs must be >= 0");
            require(p > s, ErrorCode::config, std::string(what) + ": cp must exceed cs");
        }
    };
    check(rho, cp, cs, "material");
    for (const auto& b : boxes)
        check(b.rho, b.cp, b.cs, "material box");
}

double SourceModel::amplitude(double x, double y, double z) const
{
    const double dx = x - center[0], dy = y - center[1], dz = z - center[2];
    return std::exp(-(dx * dx + dy * dy + dz * dz));
}

double ricker(double t, double fp, double delay)
{
    const double a = std::numbers::pi * fp * (t - delay);
    const double a2 = a * a;
    return (1.0 - 2.0 * a2) * std::exp(-a2);
}

std::array<double, 6> stress_from_strain(const std::array<double, 6>& e, double rho, double cp, double cs)
{
    const double p2 = cp * cp, l2 = cp * cp - 2.0 * cs * cs, mu2 = 2.0 * rho * cs * cs;
    return {rho * (p2 * e[0] + l2 * (e[1] + e[2])),
            rho * (p2 * e[1] + l2 * (e[2] + e[0])),
            rho * (p2 * e[2] + l2 * (e[0] + e[1])),
            mu2 * e[3], mu2 * e[4], mu2 * e[5]};
}

namespace {

template <class F>
PatchedField sample(const PatchLayout3D& layout, const Axes& ax, F f)
{
    PatchedField out = layout.make_field();
    for (int q = 0; q < layout.patch_count(); ++q) {
        const auto o = layout.origin(q);
        Array3& a = out.patches[static_cast<std::size_t>(q)];
        const auto d = a.dims();
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k)
                    a(i, j, k) = f(ax.coord(0, o[0] + i), ax.coord(1, o[1] + j), ax.coord(2, o[2] + k));
    }
    return out;
}

} // namespace

MaterialFields sample_material(const MaterialModel& m, const PatchLayout3D& layout, const Axes& axes)
{
    MaterialFields f;
    f.rho = sample(layout, axes, [&](double x, double y, double z) { return m.at(x, y, z).rho; });
    f.mp = sample(layout, axes, [&](double x, double y, double z) {
        const auto p = m.at(x, y, z);
        return p.rho * p.cp * p.cp;
    });
    f.lam = sample(layout, axes, [&](double x, double y, double z) {
        const auto p = m.at(x, y, z);
        return p.rho * (p.cp * p.cp - 2.0 * p.cs * p.cs);
    });
    f.ms = sample(layout, axes, [&](double x, double y, double z) {
        const auto p = m.at(x, y, z);
        return p.rho * p.cs * p.cs;
    });
    return f;
}

PatchedField sample_source(const SourceModel& s, const PatchLayout3D& layout, const Axes& axes)
{
    return sample(layout, axes, [&](double x, double y, double z) { return s.amplitude(x, y, z); });
}

std::array<PatchedField, 4> acoustic2d_gradients(const Wavefield2D& f, DerivativeProvider& d)
{
    std::array<PatchedField, 4> g;
    d.differentiate(f.sigma, 0, g[0]);
    d.differentiate(f.sigma, 2, g[1]);
    d.differentiate(f.v1, 0, g[2]);
    d.differentiate(f.v3, 2, g[3]);
    return g;
}

namespace {

void ensure_like(PatchedField& f, const PatchedField& like)
{
    if (f.patches.size() != like.patches.size()) {
        f.patches.clear();
        for (const auto& p : like.patches)
            f.patches.emplace_back(p.dims());
    }
}

// out = a * (x + y)
void combine_half(PatchedField& out, const PatchedField& x, const PatchedField& y)
{
    for (std::size_t q = 0; q < out.patches.size(); ++q) {
        double* o = out.patches[q].data();
        const double* a = x.patches[q].data();
        const double* b = y.patches[q].data();
        const std::size_t n = out.patches[q].size();
        for (std::size_t i = 0; i < n; ++i)
            o[i] = 0.5 * (a[i] + b[i]);
    }
}

void add_into(PatchedField& out, const PatchedField& x)
{
    for (std::size_t q = 0; q < out.patches.size(); ++q) {
        double* o = out.patches[q].data();
        const double* a = x.patches[q].data();
        const std::size_t n = out.patches[q].size();
        for (std::size_t i = 0; i < n; ++i)
            o[i] += a[i];
    }
}

} // namespace

void elastic3d_strain_rates(const std::array<PatchedField, 3>& v, DerivativeProvider& d,
                            std::array<PatchedField, 6>& r, PatchedField& tmp)
{
    for (auto& x : r)
        ensure_like(x, v[0]);
    ensure_like(tmp, v[0]);
    d.differentiate(v[0], 0, r[0]);
    d.differentiate(v[1], 1, r[1]);
    d.differentiate(v[2], 2, r[2]);
    // shear rates: 1/2 (dvi/dxj + dvj/dxi)
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int s = 0; s < 3; ++s) {
        const int i = pairs[s][0], j = pairs[s][1];
        PatchedField& out = r[static_cast<std::size_t>(3 + s)];
        d.differentiate(v[static_cast<std::size_t>(i)], j, out);
        d.differentiate(v[static_cast<std::size_t>(j)], i, tmp);
        combine_half(out, out, tmp);
    }
}

void elastic3d_stress_patch(const std::array<PatchedField, 6>& e, const MaterialFields& mat,
                            std::array<PatchedField, 6>& s, std::size_t q)
{
    const std::size_t n = e[0].patches[q].size();
    const double* e11 = e[0].patches[q].data();
    const double* e22 = e[1].patches[q].data();
    const double* e33 = e[2].patches[q].data();
    const double* mp = mat.mp.patches[q].data();
    const double* lam = mat.lam.patches[q].data();
    const double* ms = mat.ms.patches[q].data();
    double* s11 = s[0].patches[q].data();
    double* s22 = s[1].patches[q].data();
    double* s33 = s[2].patches[q].data();
    for (std::size_t i = 0; i < n; ++i) {
        s11[i] = mp[i] * e11[i] + lam[i] * (e22[i] + e33[i]);
        s22[i] = mp[i] * e22[i] + lam[i] * (e33[i] + e11[i]);
        s33[i] = mp[i] * e33[i] + lam[i] * (e11[i] + e22[i]);
    }
    for (int c = 3; c < 6; ++c) {
        const double* ec = e[static_cast<std::size_t>(c)].patches[q].data();
        double* sc = s[static_cast<std::size_t>(c)].patches[q].data();
        for (std::size_t i = 0; i < n; ++i)
            sc[i] = 2.0 * ms[i] * ec[i];
    }
}

void elastic3d_stress(const std::array<PatchedField, 6>& e, const MaterialFields& mat, std::array<PatchedField, 6>& s)
{
    for (auto& x : s)
        ensure_like(x, e[0]);
    for (std::size_t q = 0; q < e[0].patches.size(); ++q)
        elastic3d_stress_patch(e, mat, s, q);
}

void elastic3d_momentum_rates(const std::array<PatchedField, 6>& e, const MaterialFields& mat,
                              const PatchedField* amplitude, double wavelet, const std::array<bool, 3>& targets,
                              DerivativeProvider& d, std::array<PatchedField, 3>& rates,
                              std::array<PatchedField, 6>& stress, PatchedField& tmp)
{
    elastic3d_stress(e, mat, stress);
    for (auto& x : rates)
        ensure_like(x, e[0]);
    ensure_like(tmp, e[0]);
    // sigma_ij index in the stored order
    const int sidx[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
    for (int i = 0; i < 3; ++i) {
        PatchedField& r = rates[static_cast<std::size_t>(i)];
        d.differentiate(stress[static_cast<std::size_t>(sidx[i][0])], 0, r);
        d.differentiate(stress[static_cast<std::size_t>(sidx[i][1])], 1, tmp);
        add_into(r, tmp);
        d.differentiate(stress[static_cast<std::size_t>(sidx[i][2])], 2, tmp);
        add_into(r, tmp);
        const bool src = amplitude && targets[static_cast<std::size_t>(i)] && wavelet != 0.0;
        for (std::size_t q = 0; q < r.patches.size(); ++q) {
            double* o = r.patches[q].data();
            const double* rho = mat.rho.patches[q].data();
            const std::size_t n = r.patches[q].size();
            if (src) {
                const double* a = amplitude->patches[q].data();
                for (std::size_t k = 0; k < n; ++k)
                    o[k] = (o[k] + a[k] * wavelet) / rho[k];
            } else {
                for (std::size_t k = 0; k < n; ++k)
                    o[k] /= rho[k];
            }
        }
    }
}

} // namespace loss
