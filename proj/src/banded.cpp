#include "loss/banded.hpp"

#include "loss/error.hpp"

#include <algorithm>

namespace loss {

BandedLu::BandedLu(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), w_(kl + ku + 1), a_(static_cast<std::size_t>(n) * (kl + ku + 1), 0.0)
{
    require(n > 0 && kl >= 0 && ku >= 0, ErrorCode::dimension, "bad band shape");
}

double& BandedLu::at(int i, int j)
{
    if (!in_band(i, j))
        fail(ErrorCode::internal, "band access outside band");
    return a_[static_cast<std::size_t>(i) * w_ + (j - i + kl_)];
}

double BandedLu::at(int i, int j) const
{
    if (!in_band(i, j))
        return 0.0;
    return a_[static_cast<std::size_t>(i) * w_ + (j - i + kl_)];
}

BandedLu BandedLu::transposed() const
{
    BandedLu t(n_, ku_, kl_);
    for (int i = 0; i < n_; ++i)
        for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
            t.at(j, i) = at(i, j);
    return t;
}

std::vector<double> BandedLu::multiply(std::span<const double> x) const
{
    std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
            s += at(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

void BandedLu::factor()
{
    for (int k = 0; k < n_; ++k) {
        const double piv = at(k, k);
        if (piv == 0.0)
            fail(ErrorCode::numeric, "zero pivot in banded factorization");
        for (int i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) {
            double& lik = at(i, k);
            if (lik == 0.0)
                continue;
            lik /= piv;
            for (int j = k + 1; j <= std::min(n_ - 1, k + ku_); ++j)
                at(i, j) -= lik * at(k, j);
        }
    }
    factored_ = true;
}

void BandedLu::solve(std::span<double> b) const
{
    require(factored_, ErrorCode::internal, "solve before factor");
    require(b.size() == static_cast<std::size_t>(n_), ErrorCode::dimension, "rhs length mismatch");
    for (int i = 0; i < n_; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = std::max(0, i - kl_); k < i; ++k)
            s -= at(i, k) * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int j = i + 1; j <= std::min(n_ - 1, i + ku_); ++j)
            s -= at(i, j) * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(i)] = s / at(i, i);
    }
}

} // namespace loss
