#pragma once

#include <limits>
#include <vector>

#include "sureshrink/image.hpp"

namespace sureshrink {

// Center-pixel-weight handling: the self-weight w_{l,l} is 1 (std), 0
// (zero), or the maximum weight seen among the other candidates (max).
enum class CpwMode { Std, Zero, Max };

struct NlmParams {
    int patch_radius = 1;     // patch = (2*patch_radius+1)^2 square
    int search_radius = 7;    // search window = (2*search_radius+1)^2 square
    double bandwidth_h = 0.0; // exponent is ssd / (2h), must be > 0
    CpwMode cpw_mode = CpwMode::Std;
};

// Wall-clock split of a denoise call: the plain NLM estimate versus the
// extra divergence/PSURE stage (only meaningful for CpwMode::Std).
struct NlmTimings {
    double nlm_seconds = 0.0;
    double sure_seconds = 0.0;
};

struct NlmOutput {
    GrayImage x_hat;                    // weighted average estimate
    std::vector<double> weight_sum;     // per-pixel W_l
    std::vector<double> second_moment;  // per-pixel weighted mean of y_k^2
    // Risk estimation lives only in std mode (the divergence formula assumes
    // w_{l,l} = 1); zero/max leave these empty and sure = NaN.
    std::vector<double> divergence;     // per-pixel d x_hat_l / d y_l
    std::vector<double> psure_map;      // per-pixel unbiased risk contribution
    double sure = std::numeric_limits<double>::quiet_NaN();
    NlmParams params;
    double sigma = 0.0;
};

// w = exp(-ssd / (2h)); 1 iff ssd == 0.
double nlm_weight(double ssd, double h);

// (y_l - x_hat_l)^2 + 2 sigma^2 div_l - sigma^2.
double psure_pixel(double y_l, double x_hat_l, double div_l, double sigma);

// Arithmetic mean of the PSURE map.
double sure_global(const std::vector<double>& psure_map);

// Finalizes the per-pixel divergence from the quantities accumulated during
// the displacement loop:
//   (m2 - x_hat^2)/h + w_center/W + (x_hat*g - hh)/(W*h)
// where g = sum over patch displacements d of w_d*(y_l - y_{l-d}) and
// hh = sum of w_d*(y_l - y_{l-d})*y_{l+d}, both read off the padded grid.
double divergence_pixel(double x_hat_l, double second_moment_l, double weight_sum_l,
                        double center_weight, double g_l, double hh_l, double bandwidth_h);

// Integral-image fast path. Pads the input by patch_radius+search_radius
// (mirror) and runs the displacement loop: one squared-difference plane and
// one summed-area table per displacement, so the cost is independent of
// patch size. Deterministic regardless of worker count: displacements are
// visited sequentially in row-major order (center handled per cpw_mode) and
// each output pixel is owned by exactly one thread.
NlmOutput nlm_denoise(const GrayImage& y, const NlmParams& params, double sigma,
                      NlmTimings* timings = nullptr);

// Same computation on an already padded grid (margin = patch_radius +
// search_radius on every side); width/height are the unpadded dimensions.
// This is the entry point the finite-difference oracle perturbs: the
// divergence is the derivative with respect to a single padded cell, and
// mirrored border copies are distinct cells of this grid.
NlmOutput nlm_denoise_padded(const GrayImage& padded, int width, int height,
                             const NlmParams& params, double sigma,
                             NlmTimings* timings = nullptr);

// Serial brute-force reference: per-pixel double loop over the search
// window with direct patch SSD sums, plus an independent divergence loop
// following the textbook formula term by term. Kept for testing; the fast
// path must agree to 1e-9 per pixel.
NlmOutput nlm_denoise_brute(const GrayImage& y, const NlmParams& params, double sigma);
NlmOutput nlm_denoise_brute_padded(const GrayImage& padded, int width, int height,
                                   const NlmParams& params, double sigma);

}  // namespace sureshrink
