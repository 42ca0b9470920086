#pragma once

#include <complex>
#include <vector>

namespace loss {

/// In-place iterative radix-2 complex FFT for one power-of-two length.
class Fft {
public:
    explicit Fft(int n);

    int n() const { return n_; }
    void forward(std::complex<double>* x) const;
    /// Inverse transform including the 1/n factor.
    void inverse(std::complex<double>* x) const;

private:
    void transform(std::complex<double>* x, bool inv) const;

    int n_;
    std::vector<int> rev_;
    std::vector<std::complex<double>> tw_;
};

bool is_power_of_two(int n);

} // namespace loss
