#pragma once

#include <cstdint>

#include "sureshrink/image.hpp"

namespace sureshrink {

struct NoiseSpec {
    double sigma = 0.0;    // gray levels, >= 0
    uint64_t seed = 0;
};

// y = x + n with n i.i.d. N(0, sigma^2). The generator is pinned:
// splitmix64 expands the seed into the state of a xoshiro256++ stream, whose
// 64-bit outputs feed the trigonometric Box-Muller transform (both halves of
// each pair are consumed); pixels are filled in row-major order. Identical
// (image, spec) therefore reproduces bit-identical output. Values are NOT
// clipped to [0,255] -- clamping happens only at save time.
GrayImage add_gaussian(const GrayImage& x, const NoiseSpec& spec);

// Robust noise-level estimate: median(|L * y|) / (0.6745 * sqrt(20)) with L
// the 3x3 Laplacian [0,1,0; 1,-4,1; 0,1,0], evaluated on interior pixels
// only. Requires at least 3x3.
double estimate_sigma(const GrayImage& y);

}  // namespace sureshrink
