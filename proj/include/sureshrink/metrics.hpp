#pragma once

#include "sureshrink/image.hpp"

namespace sureshrink {

struct QualityReport {
    double mse = 0.0;   // gray-level^2
    double psnr = 0.0;  // dB, +infinity when mse == 0
    double ssim = 0.0;  // in [-1, 1]
};

// Mean squared per-pixel difference. Throws std::invalid_argument on
// dimension mismatch.
double mse(const GrayImage& a, const GrayImage& b);

// 10*log10(255^2 / mse); +infinity when the images are identical. Peak is
// fixed at 255 regardless of the actual image range.
double psnr(const GrayImage& a, const GrayImage& b);

// Mean local SSIM over all valid 11x11 windows, Gaussian-weighted with
// std 1.5, constants C1=(0.01*255)^2 and C2=(0.03*255)^2. Requires both
// images to be at least 11x11.
double ssim(const GrayImage& a, const GrayImage& b);

QualityReport quality_report(const GrayImage& reference, const GrayImage& test);

}  // namespace sureshrink
