#include "loss/pml.hpp"

#include "loss/error.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <string>

namespace loss {

AxisProfile build_axis_profile(const Grid1D& grid, const PmlParams& pp, double c_pmax)
{
    require(pp.cells >= 1, ErrorCode::config, "pml: layer needs at least one cell");
    require(pp.r > 0 && pp.r < 1, ErrorCode::config, "pml: reflection coefficient must lie in (0, 1)");
    require(pp.k_max >= 1, ErrorCode::config, "pml: k_max must be >= 1");
    require(pp.f0 > 0, ErrorCode::config, "pml: f0 must be positive");
    require(2 * pp.cells <= grid.n(), ErrorCode::config,
            "pml: layer of " + std::to_string(pp.cells) + " cells is wider than half the axis (" +
                std::to_string(grid.n()) + " intervals)");
    AxisProfile p;
    p.n = grid.n();
    p.cells = pp.cells;
    const double l_phys = pp.cells * grid.h();
    p.d0 = -3.0 * c_pmax * std::log(pp.r) / (2.0 * l_phys);
    p.alpha_max = std::numbers::pi * pp.f0;
    const auto n1 = static_cast<std::size_t>(grid.n() + 1);
    p.d.assign(n1, 0.0);
    p.k.assign(n1, 1.0);
    p.alpha.assign(n1, 0.0);
    for (int i = 0; i <= grid.n(); ++i) {
        if (!p.in_layer(i))
            continue;
        const int depth = i <= pp.cells ? pp.cells - i : i - (grid.n() - pp.cells);
        const double s = static_cast<double>(depth) / pp.cells;
        const auto u = static_cast<std::size_t>(i);
        p.d[u] = p.d0 * s * s;
        p.k[u] = 1.0 + (pp.k_max - 1.0) * std::pow(s, pp.m);
        p.alpha[u] = p.alpha_max * std::pow(1.0 - s, pp.p_exp);
    }
    return p;
}

PmlProfile build_profile(const Grid1D& gx, const Grid1D& gz, const PmlParams& params, double c_pmax)
{
    PmlProfile p;
    p.params = params;
    p.axis[0] = build_axis_profile(gx, params, c_pmax);
    p.axis[2] = build_axis_profile(gz, params, c_pmax);
    return p;
}

PmlProfile zeroed_profile(const PmlProfile& like)
{
    PmlProfile p = like;
    for (auto& a : p.axis) {
        std::fill(a.d.begin(), a.d.end(), 0.0);
        std::fill(a.k.begin(), a.k.end(), 1.0);
        std::fill(a.alpha.begin(), a.alpha.end(), 0.0);
        a.d0 = 0.0;
        a.alpha_max = 0.0;
    }
    return p;
}

void write_profile(std::ostream& os, const AxisProfile& p)
{
    os << "# knot d k alpha\n" << std::setprecision(17);
    for (std::size_t i = 0; i < p.d.size(); ++i)
        os << i << ' ' << p.d[i] << ' ' << p.k[i] << ' ' << p.alpha[i] << '\n';
}

double exp_euler_memory_update(double psi, double g, double d, double k, double alpha, double dt)
{
    const double a = d / k + alpha;
    if (!(a > 0.0))
        fail(ErrorCode::internal, "memory update called outside a layer");
    const double decay = std::exp(-a * dt);
    const double gain = -std::expm1(-a * dt) / a;
    return decay * psi - (d / (k * k)) * gain * g;
}

double exact_flow_velocity_update(double v, double psi_old, double psi_new, double g, double rho, double d, double k,
                                  double alpha, double dt)
{
    return v - flow_increment(g, psi_old, psi_new, d, k, alpha, dt) / rho;
}

std::size_t PmlState::stored_values() const
{
    std::size_t s = 0;
    for (const auto& v : slabs)
        for (const auto& sl : v)
            s += sl.psi.size() + sl.phi.size();
    return s;
}

PmlState make_pml_state(const PatchLayout3D& layout, const PmlProfile& profile)
{
    PmlState st;
    const int np = layout.patch_count();
    st.slabs.resize(static_cast<std::size_t>(np));
    st.slab_index.resize(static_cast<std::size_t>(np));
    for (int q = 0; q < np; ++q) {
        const auto o = layout.origin(q);
        const auto dims = layout.dims(q);
        for (int a = 0; a < 3; ++a) {
            auto& idx = st.slab_index[static_cast<std::size_t>(q)][a];
            idx.assign(static_cast<std::size_t>(dims[a]), -1);
            const AxisProfile& ap = profile.axis[a];
            if (ap.cells == 0)
                continue;
            // contiguous runs of layer knots inside this patch
            int i = 0;
            while (i < dims[a]) {
                if (!ap.in_layer(o[a] + i)) {
                    ++i;
                    continue;
                }
                int j = i;
                while (j < dims[a] && ap.in_layer(o[a] + j))
                    ++j;
                MemorySlab s;
                s.axis = a;
                s.begin = i;
                s.end = j;
                auto sd = dims;
                sd[a] = j - i;
                s.psi = Array3(sd);
                s.phi = Array3(sd);
                const int id = static_cast<int>(st.slabs[static_cast<std::size_t>(q)].size());
                for (int t = i; t < j; ++t)
                    idx[static_cast<std::size_t>(t)] = id;
                st.slabs[static_cast<std::size_t>(q)].push_back(std::move(s));
                i = j;
            }
        }
    }
    return st;
}

} // namespace loss
