#include "sureshrink/bss.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace sureshrink {

ShrinkCoeffs pixel_coeffs(const GrayImage& y, const NlmOutput& nlm) {
    if (nlm.params.cpw_mode != CpwMode::Std || nlm.psure_map.empty())
        throw std::invalid_argument("shrinkage coefficients need a std-mode NLM result");
    if (!y.same_size(nlm.x_hat))
        throw std::invalid_argument("noisy image and NLM result dimensions differ");

    const double s2 = nlm.sigma * nlm.sigma;
    ShrinkCoeffs co;
    co.width = y.width;
    co.height = y.height;
    const size_t n = y.size();
    co.a2.resize(n);
    co.a1.resize(n);
    co.a0.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double r = y.data[i] - nlm.x_hat.data[i];
        co.a2[i] = r * r;
        co.a0[i] = nlm.psure_map[i];
        co.a1[i] = s2 * nlm.divergence[i] - nlm.psure_map[i];
    }
    return co;
}

double optimal_shrinkage(double A1, double A2) {
    if (!(A2 >= 0.0))
        throw std::invalid_argument("optimal_shrinkage needs A2 >= 0");
    if (A2 == 0.0)
        return A1 < 0.0 ? 1.0 : 0.0;  // risk is linear: decreasing iff A1 < 0
    const double p = -A1 / A2;
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

BlockCoeffs block_coeffs(const IntegralImage& ii_a2, const IntegralImage& ii_a1,
                         const IntegralImage& ii_a0, int anchor_r, int anchor_c,
                         int block_size, int width, int height) {
    if (block_size < 1)
        throw std::invalid_argument("block_size must be >= 1");
    if (anchor_r < 0 || anchor_c < 0 || anchor_r >= height || anchor_c >= width)
        throw std::invalid_argument("block anchor outside the image");
    const int bottom = std::min(anchor_r + block_size - 1, height - 1);
    const int right = std::min(anchor_c + block_size - 1, width - 1);
    BlockCoeffs bc;
    bc.A2 = static_cast<double>(ii_a2.rect_sum_unchecked(anchor_r, anchor_c, bottom, right));
    bc.A1 = static_cast<double>(ii_a1.rect_sum_unchecked(anchor_r, anchor_c, bottom, right));
    bc.A0 = static_cast<double>(ii_a0.rect_sum_unchecked(anchor_r, anchor_c, bottom, right));
    bc.area = (bottom - anchor_r + 1) * (right - anchor_c + 1);
    return bc;
}

double bsure_value(double A2, double A1, double A0, double p, int block_area) {
    if (block_area < 1)
        throw std::invalid_argument("block area must be >= 1");
    return (A2 * p * p + 2.0 * A1 * p + A0) / static_cast<double>(block_area);
}

double block_weight(double bsure, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("block_weight needs sigma > 0");
    return std::exp(-bsure / (sigma * sigma));
}

BssState bss_begin(const ShrinkCoeffs& coeffs, int initial_block) {
    if (initial_block < 1)
        throw std::invalid_argument("initial block size must be >= 1");
    if (coeffs.width < 1 || coeffs.height < 1 ||
        coeffs.a2.size() != static_cast<size_t>(coeffs.width) * coeffs.height ||
        coeffs.a1.size() != coeffs.a2.size() || coeffs.a0.size() != coeffs.a2.size())
        throw std::invalid_argument("inconsistent coefficient planes");

    BssState st;
    st.width = coeffs.width;
    st.height = coeffs.height;
    st.block_size = initial_block;
    st.ii_a2 = IntegralImage::build(coeffs.a2, coeffs.height, coeffs.width);
    st.ii_a1 = IntegralImage::build(coeffs.a1, coeffs.height, coeffs.width);
    st.ii_a0 = IntegralImage::build(coeffs.a0, coeffs.height, coeffs.width);
    st.V.assign(coeffs.a2.size(), 0.0);
    st.S.assign(coeffs.a2.size(), 0.0);
    return st;
}

void bss_round(BssState& state, const GrayImage& y, const GrayImage& x_hat, double sigma) {
    const int width = state.width, height = state.height;
    if (y.width != width || y.height != height || !y.same_size(x_hat))
        throw std::invalid_argument("bss_round image dimensions do not match the state");
    if (!(sigma > 0.0))
        throw std::invalid_argument("bss_round needs sigma > 0");
    if (state.block_size < 1)
        throw std::invalid_argument("block_size must be >= 1");

    const int B = state.block_size;
    const size_t n = static_cast<size_t>(width) * height;
    state.p_star.assign(n, 0.0);
    state.bsure_at_pstar.assign(n, 0.0);
    state.v.assign(n, 0.0);
    std::vector<double> vp(n, 0.0);

    // Every pixel doubles as a block anchor; clipped blocks keep all
    // integral-image lookups in bounds.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < height; ++r) {
        const size_t idx0 = static_cast<size_t>(r) * width;
        for (int c = 0; c < width; ++c) {
            const BlockCoeffs bc = block_coeffs(state.ii_a2, state.ii_a1, state.ii_a0,
                                                r, c, B, width, height);
            const double p = optimal_shrinkage(bc.A1, bc.A2);
            const double bs = bsure_value(bc.A2, bc.A1, bc.A0, p, bc.area);
            const double w = block_weight(bs, sigma);
            state.p_star[idx0 + c] = p;
            state.bsure_at_pstar[idx0 + c] = bs;
            state.v[idx0 + c] = w;
            vp[idx0 + c] = w * p;
        }
    }

    // The per-pixel sums over all covering anchors are rectangle sums over
    // the anchor planes, so one integral image each makes the gather O(1)
    // per pixel -- round cost independent of block size.
    const IntegralImage ii_v = IntegralImage::build(state.v, height, width);
    const IntegralImage ii_vp = IntegralImage::build(vp, height, width);

    if (state.x_out.width != width || state.x_out.height != height)
        state.x_out = GrayImage(width, height);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < height; ++r) {
        const int top = std::max(0, r - B + 1);
        const size_t idx0 = static_cast<size_t>(r) * width;
        for (int c = 0; c < width; ++c) {
            const int left = std::max(0, c - B + 1);
            const size_t idx = idx0 + c;
            state.V[idx] += static_cast<double>(ii_v.rect_sum_unchecked(top, left, r, c));
            state.S[idx] += static_cast<double>(ii_vp.rect_sum_unchecked(top, left, r, c));
            const double xh = x_hat.data[idx];
            state.x_out.data[idx] = xh + (y.data[idx] - xh) * (state.S[idx] / state.V[idx]);
        }
    }
}

namespace {

double mean_sq_diff(const GrayImage& a, const GrayImage& b) {
    long double acc = 0.0L;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += static_cast<long double>(d) * d;
    }
    return static_cast<double>(acc / static_cast<long double>(a.size()));
}

double mean_of(const std::vector<double>& v) {
    long double acc = 0.0L;
    for (double x : v) acc += x;
    return static_cast<double>(acc / static_cast<long double>(v.size()));
}

}  // namespace

BssResult bss_shrink(const GrayImage& y, const NlmOutput& nlm, double sigma,
                     double tol, int initial_block, bool want_diagnostics) {
    if (!(sigma >= 0.0) || std::isnan(sigma))
        throw std::invalid_argument("sigma must be non-negative");
    if (std::isnan(tol) || tol < 0.0)
        throw std::invalid_argument("tolerance must be non-negative");
    if (!y.same_size(nlm.x_hat))
        throw std::invalid_argument("noisy image and NLM result dimensions differ");

    BssResult res;
    if (sigma == 0.0) {
        // Aggregation weights exp(-bsure/sigma^2) are undefined without
        // noise; the estimate passes through unchanged.
        res.x = nlm.x_hat;
        return res;
    }

    const ShrinkCoeffs coeffs = pixel_coeffs(y, nlm);
    BssState state = bss_begin(coeffs, initial_block);
    const int max_block = std::min(y.width, y.height);

    const GrayImage* prev = &nlm.x_hat;
    double total_seconds = 0.0;
    GrayImage prev_copy;

    while (true) {
        const auto t0 = std::chrono::steady_clock::now();
        bss_round(state, y, nlm.x_hat, sigma);
        total_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++res.rounds;

        const double delta = mean_sq_diff(state.x_out, *prev);
        if (want_diagnostics)
            res.diagnostics.push_back({res.rounds, state.block_size,
                                       mean_of(state.bsure_at_pstar),
                                       mean_of(state.p_star), delta});
        if (delta <= tol)
            break;
        if (state.block_size + 1 > max_block)
            break;
        state.block_size += 1;
        prev_copy = state.x_out;
        prev = &prev_copy;
    }

    res.x = std::move(state.x_out);
    res.mean_round_seconds = total_seconds / res.rounds;
    return res;
}

}  // namespace sureshrink
