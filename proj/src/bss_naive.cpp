#include <algorithm>
#include <stdexcept>

#include "sureshrink/bss.hpp"

namespace sureshrink {

// Reference aggregation used by the tests: direct coefficient sums per block
// and an explicit per-pixel loop over every covering anchor. Shares no code
// with the integral-image round beyond the scalar helpers, so a bug in the
// fast gather cannot hide here.
void bss_round_naive(BssState& state, const GrayImage& y, const GrayImage& x_hat,
                     const ShrinkCoeffs& coeffs, double sigma) {
    const int width = state.width, height = state.height;
    if (y.width != width || y.height != height || !y.same_size(x_hat))
        throw std::invalid_argument("bss_round image dimensions do not match the state");
    if (coeffs.width != width || coeffs.height != height)
        throw std::invalid_argument("coefficient planes do not match the state");
    if (!(sigma > 0.0))
        throw std::invalid_argument("bss_round needs sigma > 0");
    if (state.block_size < 1)
        throw std::invalid_argument("block_size must be >= 1");

    const int B = state.block_size;
    const size_t n = static_cast<size_t>(width) * height;
    state.p_star.assign(n, 0.0);
    state.bsure_at_pstar.assign(n, 0.0);
    state.v.assign(n, 0.0);

    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int bottom = std::min(r + B - 1, height - 1);
            const int right = std::min(c + B - 1, width - 1);
            double A2 = 0.0, A1 = 0.0, A0 = 0.0;
            for (int br = r; br <= bottom; ++br)
                for (int bc = c; bc <= right; ++bc) {
                    const size_t i = static_cast<size_t>(br) * width + bc;
                    A2 += coeffs.a2[i];
                    A1 += coeffs.a1[i];
                    A0 += coeffs.a0[i];
                }
            const int area = (bottom - r + 1) * (right - c + 1);
            const size_t idx = static_cast<size_t>(r) * width + c;
            const double p = optimal_shrinkage(A1, A2);
            state.p_star[idx] = p;
            state.bsure_at_pstar[idx] = bsure_value(A2, A1, A0, p, area);
            state.v[idx] = block_weight(state.bsure_at_pstar[idx], sigma);
        }
    }

    if (state.x_out.width != width || state.x_out.height != height)
        state.x_out = GrayImage(width, height);

    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const size_t idx = static_cast<size_t>(r) * width + c;
            double vsum = 0.0, vpsum = 0.0;
            for (int ar = std::max(0, r - B + 1); ar <= r; ++ar)
                for (int ac = std::max(0, c - B + 1); ac <= c; ++ac) {
                    const size_t a = static_cast<size_t>(ar) * width + ac;
                    vsum += state.v[a];
                    vpsum += state.v[a] * state.p_star[a];
                }
            state.V[idx] += vsum;
            state.S[idx] += vpsum;
            const double xh = x_hat.data[idx];
            state.x_out.data[idx] = xh + (y.data[idx] - xh) * (state.S[idx] / state.V[idx]);
        }
    }
}

}  // namespace sureshrink
