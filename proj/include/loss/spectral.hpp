#pragma once

#include "loss/array3.hpp"
#include "loss/derivative.hpp"
#include "loss/fft.hpp"

#include <array>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace loss {

/// Periodic grid: axis a has n[a] points x_min[a] + j*length[a]/n[a]. n = 1 marks an unused axis.
struct SpectralGrid {
    std::array<double, 3> x_min{0, 0, 0};
    std::array<double, 3> length{1, 1, 1};
    std::array<int, 3> n{1, 1, 1};

    double spacing(int a) const { return length[a] / n[a]; }
    double coord(int a, int j) const { return x_min[a] + j * spacing(a); }
    /// Angular wavenumbers in FFT order with the Nyquist entry zeroed.
    std::vector<double> wavenumbers(int a) const;
};

/// Derivative of one real periodic line; asserts the imaginary residue is negligible.
std::vector<double> spectral_derivative_line(std::span<const double> v, double length);

/// Derivative along `axis` (two real lines packed per complex transform).
Array3 spectral_derivative(const Array3& field, int axis, const SpectralGrid& grid);
void spectral_derivative_into(const Array3& field, int axis, const SpectralGrid& grid, Array3& out);

class SpectralDerivative : public DerivativeProvider {
public:
    explicit SpectralDerivative(const SpectralGrid& grid) : grid_(grid) {}
    void start(std::span<const DerivativeTask> tasks) override;
    void post(int) override {}
    void solve(int q, int task, Array3& out) override;
    int patch_count() const override { return 1; }
    const std::vector<std::vector<int>>& needs() const override { return needs_; }
    void differentiate(const PatchedField& in, int axis, PatchedField& out) override;

private:
    SpectralGrid grid_;
    std::vector<DerivativeTask> tasks_;
    std::vector<std::vector<int>> needs_{{0}};
};

/// Evaluate the trigonometric interpolant of a periodic field at arbitrary coordinates,
/// one axis at a time. targets[a] may be empty only for an axis with n = 1.
Array3 trig_resample(const Array3& field, const SpectralGrid& grid, const std::array<std::vector<double>, 3>& targets);

} // namespace loss
