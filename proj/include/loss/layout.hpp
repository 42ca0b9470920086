#pragma once

#include "loss/array3.hpp"
#include "loss/patched_spline.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace loss {

/// Cartesian patch decomposition. An axis with 0 intervals is degenerate (one knot, one patch).
class PatchLayout3D {
public:
    PatchLayout3D(std::array<int, 3> intervals, std::array<int, 3> patches, int n_nb);

    /// One patch holding `knots` points per axis, no spline structure (spectral grids).
    static PatchLayout3D single(std::array<int, 3> knots);

    int patch_count() const { return p_[0] * p_[1] * p_[2]; }
    const std::array<int, 3>& patches() const { return p_; }
    const std::array<int, 3>& knots() const { return knots_; }
    const std::array<int, 3>& intervals() const { return n_; }
    int n_nb() const { return n_nb_; }
    bool is_spline() const { return spline_; }

    const PatchLayout1D& axis(int a) const { return *axis_[a]; }
    bool axis_active(int a) const { return axis_[a].has_value(); }

    std::array<int, 3> coords(int id) const;
    int id(std::array<int, 3> c) const;
    std::array<int, 3> origin(int id) const;
    std::array<int, 3> dims(int id) const;
    /// Neighbour along `axis` on side -1 / +1, or -1 at the domain boundary.
    int neighbor(int id, int axis, int side) const;
    int worker_of(int id, int workers) const { return id % workers; }

    PatchedField make_field(double fill = 0.0) const;
    /// Copy a global array into patches (shared junction knots duplicated).
    PatchedField scatter(const Array3& global) const;
    Array3 gather(const PatchedField& f) const;

private:
    PatchLayout3D() = default;
    std::array<int, 3> n_{0, 0, 0}, p_{1, 1, 1}, knots_{1, 1, 1}, m_{0, 0, 0};
    int n_nb_ = 0;
    bool spline_ = true;
    std::array<std::optional<PatchLayout1D>, 3> axis_;
};

/// One junction face: the shared plane between two patches adjacent along `axis`.
struct JunctionFace {
    int axis;
    int l;            // junction index along the axis, 1..p-1
    int left_patch;
    int right_patch;
    std::size_t lines; // lines crossing the face
};

class ExchangePlan {
public:
    explicit ExchangePlan(const PatchLayout3D& layout);

    const std::vector<JunctionFace>& faces(int axis) const { return faces_[axis]; }
    /// Face index in faces(axis) for the junction on side -1/+1 of a patch, or -1.
    int face_of(int patch, int axis, int side) const;
    /// Scalars moved by one derivative pass along `axis` (one per line, each direction).
    std::uint64_t scalars_per_pass(int axis) const;

private:
    std::array<std::vector<JunctionFace>, 3> faces_;
    std::array<std::vector<std::array<int, 2>>, 3> face_index_;
};

/// Message slots for one batch of derivative tasks. Task t runs along axes[t]; direction 0
/// travels left->right, 1 right->left.
class Mailbox {
public:
    explicit Mailbox(const ExchangePlan& plan);

    void begin_batch(const std::vector<int>& axes);
    std::span<double> slot(int task, int face, int direction);
    void post(int task, int face, int direction);
    std::span<const double> receive(int task, int face, int direction) const;

    std::uint64_t scalars_sent() const { return sent_.load(); }
    void reset_counter() { sent_ = 0; }
    /// Test hook: drop the next message posted on this face of a pass along `axis`.
    void drop_next(int axis, int face, int direction);

private:
    struct Channel {
        int axis = -1;
        std::vector<std::array<std::vector<double>, 2>> buf;
        std::vector<std::array<unsigned char, 2>> posted;
    };
    const ExchangePlan& plan_;
    std::vector<Channel> ch_;
    std::optional<std::array<int, 3>> drop_;
    std::mutex drop_mu_;
    std::atomic<std::uint64_t> sent_{0};
};

} // namespace loss
