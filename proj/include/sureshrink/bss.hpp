#pragma once

#include <vector>

#include "sureshrink/image.hpp"
#include "sureshrink/integral.hpp"
#include "sureshrink/nlm.hpp"

namespace sureshrink {

// Per-pixel coefficients of the shrinkage risk quadratic
//   risk(q) = a2*q^2 + 2*a1*q + a0
// for the blend x' = x_hat + q*(y - x_hat):
//   a2 = (y - x_hat)^2, a1 = sigma^2*div - psure, a0 = psure.
// Identity: a2 + 2*a1 + a0 = sigma^2 at every pixel (q=1 recovers the raw
// noisy pixel, whose risk is exactly sigma^2).
struct ShrinkCoeffs {
    int width = 0;
    int height = 0;
    std::vector<double> a2, a1, a0;
};

ShrinkCoeffs pixel_coeffs(const GrayImage& y, const NlmOutput& nlm);

// Constrained minimizer of A2*p^2 + 2*A1*p over p in [0,1]:
// clamp(-A1/A2, 0, 1). Degenerate A2 == 0 leaves a linear risk: 1 when
// A1 < 0 (strictly decreasing), else 0.
double optimal_shrinkage(double A1, double A2);

// Coefficient sums over one block. Blocks are square, anchored at their
// top-left corner, and clipped at the right/bottom image borders; area is
// the clipped pixel count.
struct BlockCoeffs {
    double A2 = 0.0;
    double A1 = 0.0;
    double A0 = 0.0;
    int area = 0;
};

BlockCoeffs block_coeffs(const IntegralImage& ii_a2, const IntegralImage& ii_a1,
                         const IntegralImage& ii_a0, int anchor_r, int anchor_c,
                         int block_size, int width, int height);

// Block risk at shrinkage p: (A2*p^2 + 2*A1*p + A0) / area.
double bsure_value(double A2, double A1, double A0, double p, int block_area);

// Aggregation weight exp(-bsure / sigma^2); exceeds 1 when bsure < 0.
double block_weight(double bsure, double sigma);

// Round state. The coefficient tables are fixed for the whole iteration;
// V and S persist across rounds (each round adds every covering block's
// weight and weighted shrinkage to every pixel it covers).
struct BssState {
    int width = 0;
    int height = 0;
    int block_size = 7;
    IntegralImage ii_a2, ii_a1, ii_a0;
    std::vector<double> V, S;            // accumulated per-pixel sums
    std::vector<double> p_star;          // last round, per anchor
    std::vector<double> bsure_at_pstar;  // last round, per anchor
    std::vector<double> v;               // last round, per anchor
    GrayImage x_out;                     // latest blended estimate
};

// Builds the integral tables and zeroes the accumulators.
BssState bss_begin(const ShrinkCoeffs& coeffs, int initial_block = 7);

// One aggregation round at state.block_size: per anchor compute the block's
// optimal shrinkage, risk, and weight; accumulate V_k += sum of v over the
// anchors covering k and S_k += sum of v*p_star (gathered in O(1) per pixel
// from integral images over the v and v*p_star planes); blend
// x_out = x_hat + (y - x_hat) * S/V. Deterministic for any worker count.
void bss_round(BssState& state, const GrayImage& y, const GrayImage& x_hat, double sigma);

// Reference implementation used by the tests: direct coefficient sums per
// block and an explicit scatter loop over every covering anchor. No integral
// images anywhere.
void bss_round_naive(BssState& state, const GrayImage& y, const GrayImage& x_hat,
                     const ShrinkCoeffs& coeffs, double sigma);

struct BssDiagRow {
    int round = 0;
    int block_size = 0;
    double mean_bsure = 0.0;  // over anchors, at p_star
    double mean_pstar = 0.0;  // over anchors
    double delta = 0.0;       // mean squared change of x_out this round
};

struct BssResult {
    GrayImage x;
    int rounds = 0;
    double mean_round_seconds = 0.0;
    std::vector<BssDiagRow> diagnostics;
};

// Full iteration: rounds with block_size initial_block, initial_block+1, ...
// until the mean squared change of the blended image is <= tol or the block
// no longer fits (block_size > min(width, height)). sigma == 0 bypasses the
// procedure (the aggregation weights would be undefined) and returns x_hat.
BssResult bss_shrink(const GrayImage& y, const NlmOutput& nlm, double sigma,
                     double tol = 1e-4, int initial_block = 7,
                     bool want_diagnostics = false);

}  // namespace sureshrink
