#include "loss/fft.hpp"

#include "loss/error.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace loss {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Fft::Fft(int n) : n_(n), rev_(static_cast<std::size_t>(n)), tw_(static_cast<std::size_t>(n / 2 > 0 ? n / 2 : 1))
{
    require(is_power_of_two(n), ErrorCode::dimension, "FFT length must be a power of two, got " + std::to_string(n));
    int bits = 0;
    while ((1 << bits) < n)
        ++bits;
    for (int i = 0; i < n; ++i) {
        int r = 0;
        for (int b = 0; b < bits; ++b)
            if (i & (1 << b))
                r |= 1 << (bits - 1 - b);
        rev_[static_cast<std::size_t>(i)] = r;
    }
    for (int k = 0; k < n / 2; ++k) {
        const double a = -2.0 * std::numbers::pi * k / n;
        tw_[static_cast<std::size_t>(k)] = {std::cos(a), std::sin(a)};
    }
}

void Fft::transform(std::complex<double>* x, bool inv) const
{
    const int n = n_;
    for (int i = 0; i < n; ++i) {
        const int r = rev_[static_cast<std::size_t>(i)];
        if (r > i)
            std::swap(x[i], x[r]);
    }
    // explicit real arithmetic avoids the library's NaN-recovering complex multiply
    auto* d = reinterpret_cast<double*>(x);
    const auto* t = reinterpret_cast<const double*>(tw_.data());
    const double sgn = inv ? -1.0 : 1.0;
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len / 2;
        const int step = n / len;
        for (int i = 0; i < n; i += len) {
            for (int k = 0; k < half; ++k) {
                const double wr = t[2 * k * step], wi = sgn * t[2 * k * step + 1];
                double* a = d + 2 * (i + k);
                double* b = d + 2 * (i + k + half);
                const double br = b[0] * wr - b[1] * wi;
                const double bi = b[0] * wi + b[1] * wr;
                b[0] = a[0] - br;
                b[1] = a[1] - bi;
                a[0] += br;
                a[1] += bi;
            }
        }
    }
}

void Fft::forward(std::complex<double>* x) const { transform(x, false); }

void Fft::inverse(std::complex<double>* x) const
{
    transform(x, true);
    const double s = 1.0 / n_;
    for (int i = 0; i < n_; ++i)
        x[i] *= s;
}

} // namespace loss
