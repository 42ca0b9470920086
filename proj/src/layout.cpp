#include "loss/layout.hpp"

#include "loss/error.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace loss {

PatchLayout3D::PatchLayout3D(std::array<int, 3> intervals, std::array<int, 3> patches, int n_nb)
    : n_(intervals), p_(patches), n_nb_(n_nb), spline_(true)
{
    for (int a = 0; a < 3; ++a) {
        require(patches[a] >= 1, ErrorCode::layout, "patch count per axis must be >= 1");
        if (intervals[a] == 0) {
            require(patches[a] == 1, ErrorCode::layout, "degenerate axis cannot be split");
            knots_[a] = 1;
            m_[a] = 0;
            continue;
        }
        require(intervals[a] >= 4, ErrorCode::layout, "axis " + std::to_string(a) + " needs >= 4 intervals");
        axis_[a].emplace(intervals[a], patches[a], n_nb);
        knots_[a] = intervals[a] + 1;
        m_[a] = axis_[a]->m();
    }
}

PatchLayout3D PatchLayout3D::single(std::array<int, 3> knots)
{
    PatchLayout3D l;
    l.knots_ = knots;
    l.spline_ = false;
    for (int a = 0; a < 3; ++a) {
        require(knots[a] >= 1, ErrorCode::layout, "empty axis");
        l.n_[a] = knots[a] - 1;
        l.m_[a] = knots[a] - 1;
    }
    return l;
}

std::array<int, 3> PatchLayout3D::coords(int id) const
{
    const int k = id % p_[2];
    const int j = (id / p_[2]) % p_[1];
    const int i = id / (p_[2] * p_[1]);
    return {i, j, k};
}

int PatchLayout3D::id(std::array<int, 3> c) const { return (c[0] * p_[1] + c[1]) * p_[2] + c[2]; }

std::array<int, 3> PatchLayout3D::origin(int id) const
{
    const auto c = coords(id);
    return {c[0] * m_[0], c[1] * m_[1], c[2] * m_[2]};
}

std::array<int, 3> PatchLayout3D::dims(int id) const
{
    (void)id;
    if (!spline_)
        return knots_;
    return {m_[0] + 1, m_[1] + 1, m_[2] + 1};
}

int PatchLayout3D::neighbor(int id, int axis, int side) const
{
    auto c = coords(id);
    c[axis] += side;
    if (c[axis] < 0 || c[axis] >= p_[axis])
        return -1;
    return this->id(c);
}

PatchedField PatchLayout3D::make_field(double fill) const
{
    PatchedField f;
    f.patches.reserve(static_cast<std::size_t>(patch_count()));
    for (int q = 0; q < patch_count(); ++q)
        f.patches.emplace_back(dims(q), fill);
    return f;
}

PatchedField PatchLayout3D::scatter(const Array3& g) const
{
    require(g.dims() == knots_, ErrorCode::dimension, "scatter: global shape mismatch");
    PatchedField f = make_field();
    for (int q = 0; q < patch_count(); ++q) {
        const auto o = origin(q);
        Array3& a = f.patches[static_cast<std::size_t>(q)];
        const auto d = a.dims();
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                std::memcpy(&a(i, j, 0), &g(o[0] + i, o[1] + j, o[2]), sizeof(double) * static_cast<std::size_t>(d[2]));
    }
    return f;
}

Array3 PatchLayout3D::gather(const PatchedField& f) const
{
    require(f.patches.size() == static_cast<std::size_t>(patch_count()), ErrorCode::dimension,
            "gather: patch count mismatch");
    Array3 g(knots_);
    for (int q = 0; q < patch_count(); ++q) {
        const auto o = origin(q);
        const Array3& a = f.patches[static_cast<std::size_t>(q)];
        const auto d = a.dims();
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                std::memcpy(&g(o[0] + i, o[1] + j, o[2]), &a(i, j, 0), sizeof(double) * static_cast<std::size_t>(d[2]));
    }
    return g;
}

ExchangePlan::ExchangePlan(const PatchLayout3D& layout)
{
    for (int a = 0; a < 3; ++a) {
        face_index_[a].assign(static_cast<std::size_t>(layout.patch_count()), {-1, -1});
        for (int q = 0; q < layout.patch_count(); ++q) {
            const int r = layout.neighbor(q, a, +1);
            if (r < 0)
                continue;
            const auto d = layout.dims(q);
            std::size_t lines = 1;
            for (int b = 0; b < 3; ++b)
                if (b != a)
                    lines *= static_cast<std::size_t>(d[b]);
            const int idx = static_cast<int>(faces_[a].size());
            faces_[a].push_back({a, layout.coords(q)[a] + 1, q, r, lines});
            face_index_[a][static_cast<std::size_t>(q)][1] = idx;
            face_index_[a][static_cast<std::size_t>(r)][0] = idx;
        }
    }
}

int ExchangePlan::face_of(int patch, int axis, int side) const
{
    return face_index_[axis][static_cast<std::size_t>(patch)][side > 0 ? 1 : 0];
}

std::uint64_t ExchangePlan::scalars_per_pass(int axis) const
{
    std::uint64_t s = 0;
    for (const auto& f : faces_[axis])
        s += 2 * f.lines;
    return s;
}

Mailbox::Mailbox(const ExchangePlan& plan) : plan_(plan) {}

void Mailbox::begin_batch(const std::vector<int>& axes)
{
    if (ch_.size() < axes.size())
        ch_.resize(axes.size());
    for (std::size_t t = 0; t < axes.size(); ++t) {
        Channel& c = ch_[t];
        const auto& faces = plan_.faces(axes[t]);
        if (c.axis != axes[t]) {
            c.axis = axes[t];
            c.buf.clear();
            for (const auto& f : faces)
                c.buf.push_back({std::vector<double>(f.lines), std::vector<double>(f.lines)});
        }
        c.posted.assign(faces.size(), {0, 0});
    }
}

std::span<double> Mailbox::slot(int task, int face, int direction)
{
    return ch_[static_cast<std::size_t>(task)].buf[static_cast<std::size_t>(face)][static_cast<std::size_t>(direction)];
}

void Mailbox::post(int task, int face, int direction)
{
    Channel& c = ch_[static_cast<std::size_t>(task)];
    {
        std::lock_guard<std::mutex> lock(drop_mu_);
        if (drop_ && (*drop_)[0] == c.axis && (*drop_)[1] == face && (*drop_)[2] == direction) {
            drop_.reset();
            return;
        }
    }
    c.posted[static_cast<std::size_t>(face)][static_cast<std::size_t>(direction)] = 1;
    sent_ += c.buf[static_cast<std::size_t>(face)][static_cast<std::size_t>(direction)].size();
}

std::span<const double> Mailbox::receive(int task, int face, int direction) const
{
    const Channel& c = ch_[static_cast<std::size_t>(task)];
    if (!c.posted[static_cast<std::size_t>(face)][static_cast<std::size_t>(direction)]) {
        const auto& f = plan_.faces(c.axis)[static_cast<std::size_t>(face)];
        const int from = direction == 0 ? f.left_patch : f.right_patch;
        const int to = direction == 0 ? f.right_patch : f.left_patch;
        fail(ErrorCode::exchange, "missing junction message on axis " + std::to_string(c.axis) + " junction " +
                                      std::to_string(f.l) + " from patch " + std::to_string(from) + " to patch " +
                                      std::to_string(to));
    }
    return c.buf[static_cast<std::size_t>(face)][static_cast<std::size_t>(direction)];
}

void Mailbox::drop_next(int axis, int face, int direction)
{
    std::lock_guard<std::mutex> lock(drop_mu_);
    drop_ = std::array<int, 3>{axis, face, direction};
}

} // namespace loss
