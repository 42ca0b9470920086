#pragma once

#include <algorithm>
#include <vector>

namespace loss {

namespace detail {
inline std::vector<double>& tls_buffer(int which)
{
    thread_local std::vector<double> bufs[4];
    return bufs[which];
}
} // namespace detail

template <class Kernel>
void for_line_blocks(const double* in, double* out, AxisView v, int block, Kernel&& kernel)
{
    const auto B = static_cast<std::size_t>(block);
    if (v.inner >= 8) {
        for (std::size_t o = 0; o < v.outer; ++o) {
            const std::size_t base = o * v.along * v.inner;
            for (std::size_t s0 = 0; s0 < v.inner; s0 += B) {
                const std::size_t lanes = std::min(B, v.inner - s0);
                kernel(in + base + s0, static_cast<std::ptrdiff_t>(v.inner), static_cast<int>(lanes),
                       out + base + s0, static_cast<std::ptrdiff_t>(v.inner), o * v.inner + s0);
            }
        }
        return;
    }
    // few contiguous lanes: transpose blocks of lines into a lane-contiguous buffer
    auto& gin = detail::tls_buffer(2);
    auto& gout = detail::tls_buffer(3);
    gin.resize(v.along * B);
    gout.resize(v.along * B);
    const std::size_t lines = v.outer * v.inner;
    thread_local std::vector<const double*> srcs;
    thread_local std::vector<double*> dsts;
    srcs.resize(B);
    dsts.resize(B);
    for (std::size_t l0 = 0; l0 < lines; l0 += B) {
        const std::size_t lanes = std::min(B, lines - l0);
        for (std::size_t q = 0; q < lanes; ++q) {
            const std::size_t line = l0 + q;
            const std::size_t off = (line / v.inner) * v.along * v.inner + line % v.inner;
            srcs[q] = in + off;
            dsts[q] = out + off;
        }
        for (std::size_t i = 0; i < v.along; ++i) {
            double* g = gin.data() + i * lanes;
            const std::size_t at = i * v.inner;
            for (std::size_t q = 0; q < lanes; ++q)
                g[q] = srcs[q][at];
        }
        kernel(gin.data(), static_cast<std::ptrdiff_t>(lanes), static_cast<int>(lanes), gout.data(),
               static_cast<std::ptrdiff_t>(lanes), l0);
        for (std::size_t i = 0; i < v.along; ++i) {
            const double* g = gout.data() + i * lanes;
            const std::size_t at = i * v.inner;
            for (std::size_t q = 0; q < lanes; ++q)
                dsts[q][at] = g[q];
        }
    }
}

} // namespace loss
