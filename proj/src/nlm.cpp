#include "sureshrink/nlm.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sureshrink/integral.hpp"

namespace sureshrink {

namespace {

void validate_params(const NlmParams& p, double sigma) {
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

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Squared-difference plane for one displacement, covering the image plus a
// patch_radius ring so every patch rectangle stays inside it:
//   plane(r+pr, c+pr) = (P(l) - P(l+d))^2 for image coords l=(r,c),
//   r in [-pr, h+pr).
void build_sq_plane(const GrayImage& padded, int width, int height, int pr, int margin,
                    int dr, int dc, std::vector<double>& plane) {
    const int ph = height + 2 * pr;
    const int pw = width + 2 * pr;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int rr = 0; rr < ph; ++rr) {
        const int base_r = rr - pr + margin;
        const double* row_a = &padded.data[static_cast<size_t>(base_r) * padded.width];
        const double* row_b = &padded.data[static_cast<size_t>(base_r + dr) * padded.width];
        double* out = &plane[static_cast<size_t>(rr) * pw];
        for (int cc = 0; cc < pw; ++cc) {
            const int base_c = cc - pr + margin;
            const double d = row_a[base_c] - row_b[base_c + dc];
            out[cc] = d * d;
        }
    }
}

}  // namespace

double nlm_weight(double ssd, double h) {
    return std::exp(-ssd / (2.0 * h));
}

double psure_pixel(double y_l, double x_hat_l, double div_l, double sigma) {
    const double r = y_l - x_hat_l;
    return r * r + 2.0 * sigma * sigma * div_l - sigma * sigma;
}

double sure_global(const std::vector<double>& psure_map) {
    if (psure_map.empty())
        throw std::invalid_argument("sure_global needs a non-empty map");
    long double acc = 0.0L;
    for (double v : psure_map) acc += v;
    return static_cast<double>(acc / static_cast<long double>(psure_map.size()));
}

double divergence_pixel(double x_hat_l, double second_moment_l, double weight_sum_l,
                        double center_weight, double g_l, double hh_l, double bandwidth_h) {
    return (second_moment_l - x_hat_l * x_hat_l) / bandwidth_h +
           center_weight / weight_sum_l +
           (x_hat_l * g_l - hh_l) / (weight_sum_l * bandwidth_h);
}

NlmOutput nlm_denoise(const GrayImage& y, const NlmParams& params, double sigma,
                      NlmTimings* timings) {
    validate_params(params, sigma);
    const int margin = params.patch_radius + params.search_radius;
    const GrayImage padded = pad_symmetric(y, margin);
    return nlm_denoise_padded(padded, y.width, y.height, params, sigma, timings);
}

NlmOutput nlm_denoise_padded(const GrayImage& padded, int width, int height,
                             const NlmParams& params, double sigma, NlmTimings* timings) {
    validate_params(params, sigma);
    const int pr = params.patch_radius;
    const int sr = params.search_radius;
    const int margin = pr + sr;
    if (padded.width != width + 2 * margin || padded.height != height + 2 * margin)
        throw std::invalid_argument("padded grid does not match dimensions plus margin");

    const size_t n = static_cast<size_t>(width) * height;
    const double h = params.bandwidth_h;
    const bool is_std = params.cpw_mode == CpwMode::Std;
    const bool is_max = params.cpw_mode == CpwMode::Max;
    const int patch_side = 2 * pr + 1;

    std::vector<double> wsum(n, 0.0), num(n, 0.0), m2num(n, 0.0);
    std::vector<double> wmax;
    if (is_max) wmax.assign(n, 0.0);

    std::vector<double> plane(static_cast<size_t>(height + 2 * pr) * (width + 2 * pr));
    const int plane_w = width + 2 * pr;

    const auto t0 = std::chrono::steady_clock::now();

    // Displacements visited sequentially in row-major order; every output
    // pixel is written by exactly one thread inside each displacement, so
    // the accumulation order -- and therefore the result, bit for bit -- is
    // independent of the worker count.
    for (int dr = -sr; dr <= sr; ++dr) {
        for (int dc = -sr; dc <= sr; ++dc) {
            if (dr == 0 && dc == 0) {
                if (is_std) {
                    // Self-weight is exactly 1; zero/max defer the center.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                    for (int r = 0; r < height; ++r) {
                        const double* py = &padded.data[(static_cast<size_t>(r) + margin) *
                                                            padded.width + margin];
                        const size_t idx0 = static_cast<size_t>(r) * width;
                        for (int c = 0; c < width; ++c) {
                            const double y0 = py[c];
                            wsum[idx0 + c] += 1.0;
                            num[idx0 + c] += y0;
                            m2num[idx0 + c] += y0 * y0;
                        }
                    }
                }
                continue;
            }

            build_sq_plane(padded, width, height, pr, margin, dr, dc, plane);
            const IntegralImage ii =
                IntegralImage::build(plane, height + 2 * pr, plane_w);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (int r = 0; r < height; ++r) {
                const double* row_d = &padded.data[(static_cast<size_t>(r) + margin + dr) *
                                                       padded.width + margin + dc];
                const size_t idx0 = static_cast<size_t>(r) * width;
                for (int c = 0; c < width; ++c) {
                    const double ssd = static_cast<double>(
                        ii.rect_sum_unchecked(r, c, r + patch_side - 1, c + patch_side - 1));
                    const double w = nlm_weight(ssd, h);
                    const double yd = row_d[c];
                    const size_t idx = idx0 + c;
                    wsum[idx] += w;
                    num[idx] += w * yd;
                    m2num[idx] += w * yd * yd;
                    if (is_max && wmax[idx] < w) wmax[idx] = w;
                }
            }
        }
    }

    if (is_max) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int r = 0; r < height; ++r) {
            const double* py =
                &padded.data[(static_cast<size_t>(r) + margin) * padded.width + margin];
            const size_t idx0 = static_cast<size_t>(r) * width;
            for (int c = 0; c < width; ++c) {
                const double y0 = py[c];
                const double w = wmax[idx0 + c];
                wsum[idx0 + c] += w;
                num[idx0 + c] += w * y0;
                m2num[idx0 + c] += w * y0 * y0;
            }
        }
    }

    NlmOutput out;
    out.params = params;
    out.sigma = sigma;
    out.x_hat = GrayImage(width, height);
    out.weight_sum = std::move(wsum);
    out.second_moment.assign(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < height; ++r) {
        const size_t idx0 = static_cast<size_t>(r) * width;
        for (int c = 0; c < width; ++c) {
            const size_t idx = idx0 + c;
            out.x_hat.data[idx] = num[idx] / out.weight_sum[idx];
            out.second_moment[idx] = m2num[idx] / out.weight_sum[idx];
        }
    }

    if (timings) timings->nlm_seconds = seconds_since(t0);

    if (is_std) {
        // Risk stage: the divergence needs, for every patch displacement d
        // inside the search window, the weight w_d and the samples at l-d
        // and l+d. The weight planes are rebuilt here (identical values to
        // the main loop) so the extra cost of risk estimation is measured
        // separately from plain denoising.
        const auto t1 = std::chrono::steady_clock::now();
        std::vector<double> g(n, 0.0), hh(n, 0.0);
        const int prs = pr < sr ? pr : sr;  // patch displacements must lie in the search window
        for (int dr = -prs; dr <= prs; ++dr) {
            for (int dc = -prs; dc <= prs; ++dc) {
                if (dr == 0 && dc == 0) continue;  // (y_l - y_l) term vanishes
                build_sq_plane(padded, width, height, pr, margin, dr, dc, plane);
                const IntegralImage ii =
                    IntegralImage::build(plane, height + 2 * pr, plane_w);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (int r = 0; r < height; ++r) {
                    const size_t prow = static_cast<size_t>(r) + margin;
                    const double* row_0 = &padded.data[prow * padded.width + margin];
                    const double* row_p =
                        &padded.data[(prow + dr) * padded.width + margin + dc];
                    const double* row_m =
                        &padded.data[(prow - dr) * padded.width + margin - dc];
                    const size_t idx0 = static_cast<size_t>(r) * width;
                    for (int c = 0; c < width; ++c) {
                        const double ssd = static_cast<double>(ii.rect_sum_unchecked(
                            r, c, r + patch_side - 1, c + patch_side - 1));
                        const double w = nlm_weight(ssd, h);
                        const double diff = row_0[c] - row_m[c];
                        const size_t idx = idx0 + c;
                        g[idx] += w * diff;
                        hh[idx] += w * diff * row_p[c];
                    }
                }
            }
        }

        out.divergence.assign(n, 0.0);
        out.psure_map.assign(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int r = 0; r < height; ++r) {
            const double* py =
                &padded.data[(static_cast<size_t>(r) + margin) * padded.width + margin];
            const size_t idx0 = static_cast<size_t>(r) * width;
            for (int c = 0; c < width; ++c) {
                const size_t idx = idx0 + c;
                const double div =
                    divergence_pixel(out.x_hat.data[idx], out.second_moment[idx],
                                     out.weight_sum[idx], 1.0, g[idx], hh[idx], h);
                out.divergence[idx] = div;
                out.psure_map[idx] = psure_pixel(py[c], out.x_hat.data[idx], div, sigma);
            }
        }
        out.sure = sure_global(out.psure_map);
        if (timings) timings->sure_seconds = seconds_since(t1);
    }

    return out;
}

}  // namespace sureshrink
