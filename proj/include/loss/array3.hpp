#pragma once

#include <array>
#include <algorithm>
#include <cstddef>
#include <vector>

namespace loss {

/// Dense 3-D array, row-major with the last index fastest. 2-D fields use dims (nx, 1, nz).
class Array3 {
public:
    Array3() = default;
    explicit Array3(std::array<int, 3> dims, double fill = 0.0)
        : dims_(dims), data_(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], fill)
    {
    }

    const std::array<int, 3>& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k;
    }
    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    const double& operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

private:
    std::array<int, 3> dims_{0, 0, 0};
    std::vector<double> data_;
};

/// A field split over patches; patch q of the owning layout is patches[q].
struct PatchedField {
    std::vector<Array3> patches;
};

/// Strided view of an array along one axis: element (o, i, s) sits at (o*along + i)*inner + s.
struct AxisView {
    std::size_t outer, along, inner;
};

inline AxisView axis_view(const std::array<int, 3>& d, int axis)
{
    std::size_t outer = 1, inner = 1;
    for (int a = 0; a < axis; ++a)
        outer *= static_cast<std::size_t>(d[a]);
    for (int a = axis + 1; a < 3; ++a)
        inner *= static_cast<std::size_t>(d[a]);
    return {outer, static_cast<std::size_t>(d[axis]), inner};
}

} // namespace loss
