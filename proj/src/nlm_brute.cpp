#include <cmath>
#include <stdexcept>
#include <vector>

#include "sureshrink/nlm.hpp"

namespace sureshrink {

namespace {

void validate_params_brute(const NlmParams& p, double sigma) {
    if (p.patch_radius < 0 || p.search_radius < 0)
        throw std::invalid_argument("patch/search radius must be non-negative");
    if (!(p.bandwidth_h > 0.0) || !std::isfinite(p.bandwidth_h))
        throw std::invalid_argument("bandwidth h must be finite and positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma must be finite and non-negative");
    if (p.search_radius == 0 && p.cpw_mode != CpwMode::Std)
        throw std::invalid_argument(
            "zero/max center weights need a non-trivial search window");
}

}  // namespace

// Textbook reference: per-pixel loop over the search window with direct
// patch sums. Single-threaded on purpose -- this is the oracle the fast path
// is checked against. SSDs and the divergence sum are carried in long double
// (independent arithmetic path); the weight accumulation mirrors the fast
// path's order so the comparison measures algorithmic agreement, not
// summation noise.
NlmOutput nlm_denoise_brute_padded(const GrayImage& padded, int width, int height,
                                   const NlmParams& params, double sigma) {
    validate_params_brute(params, sigma);
    const int pr = params.patch_radius;
    const int sr = params.search_radius;
    const int margin = pr + sr;
    if (padded.width != width + 2 * margin || padded.height != height + 2 * margin)
        throw std::invalid_argument("padded grid does not match dimensions plus margin");

    const double h = params.bandwidth_h;
    const bool is_std = params.cpw_mode == CpwMode::Std;
    const size_t n = static_cast<size_t>(width) * height;
    const int side = 2 * sr + 1;

    NlmOutput out;
    out.params = params;
    out.sigma = sigma;
    out.x_hat = GrayImage(width, height);
    out.weight_sum.assign(n, 0.0);
    out.second_moment.assign(n, 0.0);
    if (is_std) {
        out.divergence.assign(n, 0.0);
        out.psure_map.assign(n, 0.0);
    }

    std::vector<double> weights(static_cast<size_t>(side) * side);
    const int prs = pr < sr ? pr : sr;

    auto pixel = [&](int r, int c) -> double {
        return padded.at(r + margin, c + margin);
    };

    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double y0 = pixel(r, c);
            double wsum = 0.0, num = 0.0, m2 = 0.0, wmax = 0.0;

            for (int dr = -sr; dr <= sr; ++dr) {
                for (int dc = -sr; dc <= sr; ++dc) {
                    double w;
                    if (dr == 0 && dc == 0) {
                        switch (params.cpw_mode) {
                            case CpwMode::Std: w = 1.0; break;
                            case CpwMode::Zero: w = 0.0; break;
                            case CpwMode::Max: w = 0.0; break;  // deferred below
                        }
                    } else {
                        long double ssd = 0.0L;
                        for (int jr = -pr; jr <= pr; ++jr)
                            for (int jc = -pr; jc <= pr; ++jc) {
                                const long double d = pixel(r + jr, c + jc) -
                                                      pixel(r + dr + jr, c + dc + jc);
                                ssd += d * d;
                            }
                        w = nlm_weight(static_cast<double>(ssd), h);
                        if (wmax < w) wmax = w;
                    }
                    weights[static_cast<size_t>(dr + sr) * side + (dc + sr)] = w;
                    if (w != 0.0) {
                        const double yd = pixel(r + dr, c + dc);
                        wsum += w;
                        num += w * yd;
                        m2 += w * yd * yd;
                    }
                }
            }
            if (params.cpw_mode == CpwMode::Max) {
                wsum += wmax;
                num += wmax * y0;
                m2 += wmax * y0 * y0;
            }

            const size_t idx = static_cast<size_t>(r) * width + c;
            const double x_hat = num / wsum;
            out.x_hat.data[idx] = x_hat;
            out.weight_sum[idx] = wsum;
            out.second_moment[idx] = m2 / wsum;

            if (is_std) {
                // Literal divergence formula, term by term: the sum runs over
                // patch offsets i that also lie in the search window (the
                // weight w_{l,l-i} only exists there); i = 0 contributes
                // nothing since y_l - y_{l+0} = 0.
                long double third = 0.0L;
                for (int ir = -prs; ir <= prs; ++ir)
                    for (int ic = -prs; ic <= prs; ++ic) {
                        if (ir == 0 && ic == 0) continue;
                        const double w_li =
                            weights[static_cast<size_t>(-ir + sr) * side + (-ic + sr)];
                        third += static_cast<long double>(w_li) *
                                 (y0 - pixel(r + ir, c + ic)) *
                                 (x_hat - pixel(r - ir, c - ic));
                    }
                const double div = (out.second_moment[idx] - x_hat * x_hat) / h +
                                   1.0 / wsum +
                                   static_cast<double>(third) / (wsum * h);
                out.divergence[idx] = div;
                out.psure_map[idx] = psure_pixel(y0, x_hat, div, sigma);
            }
        }
    }

    if (is_std)
        out.sure = sure_global(out.psure_map);
    return out;
}

NlmOutput nlm_denoise_brute(const GrayImage& y, const NlmParams& params, double sigma) {
    validate_params_brute(params, sigma);
    const GrayImage padded = pad_symmetric(y, params.patch_radius + params.search_radius);
    return nlm_denoise_brute_padded(padded, y.width, y.height, params, sigma);
}

}  // namespace sureshrink
