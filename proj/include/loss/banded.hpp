#pragma once

#include <span>
#include <vector>

namespace loss {

/// Band matrix with in-place LU (no pivoting). Entries outside the band are zero.
class BandedLu {
public:
    BandedLu(int n, int kl, int ku);

    int n() const { return n_; }
    double& at(int i, int j);
    double at(int i, int j) const;
    bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

    BandedLu transposed() const;

    // Only valid before factor(); residual checks use it.
    std::vector<double> multiply(std::span<const double> x) const;

    void factor();
    void solve(std::span<double> rhs) const;

private:
    int n_, kl_, ku_, w_;
    bool factored_ = false;
    std::vector<double> a_;
};

} // namespace loss
