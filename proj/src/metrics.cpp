#include "sureshrink/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sureshrink {

namespace {

void require_same_size(const GrayImage& a, const GrayImage& b) {
    if (!a.same_size(b))
        throw std::invalid_argument("metric inputs must have identical dimensions");
}

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;

std::vector<double> gaussian_kernel_11() {
    std::vector<double> k(kWindow);
    const double two_var = 2.0 * 1.5 * 1.5;
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kRadius;
        k[i] = std::exp(-(d * d) / two_var);
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable valid-mode filtering: output is (h-10) x (w-10).
std::vector<double> gauss_valid(const std::vector<double>& src, int h, int w,
                                const std::vector<double>& k) {
    const int wo = w - kWindow + 1;
    const int ho = h - kWindow + 1;
    std::vector<double> tmp(static_cast<size_t>(h) * wo);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < wo; ++c) {
            double acc = 0.0;
            for (int i = 0; i < kWindow; ++i)
                acc += k[i] * src[static_cast<size_t>(r) * w + c + i];
            tmp[static_cast<size_t>(r) * wo + c] = acc;
        }
    std::vector<double> out(static_cast<size_t>(ho) * wo);
    for (int r = 0; r < ho; ++r)
        for (int c = 0; c < wo; ++c) {
            double acc = 0.0;
            for (int i = 0; i < kWindow; ++i)
                acc += k[i] * tmp[static_cast<size_t>(r + i) * wo + c];
            out[static_cast<size_t>(r) * wo + c] = acc;
        }
    return out;
}

}  // namespace

double mse(const GrayImage& a, const GrayImage& b) {
    require_same_size(a, b);
    long double acc = 0.0L;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += static_cast<long double>(d) * d;
    }
    return static_cast<double>(acc / static_cast<long double>(a.size()));
}

double psnr(const GrayImage& a, const GrayImage& b) {
    const double m = mse(a, b);
    if (m == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

double ssim(const GrayImage& a, const GrayImage& b) {
    require_same_size(a, b);
    if (a.width < kWindow || a.height < kWindow)
        throw std::invalid_argument("ssim needs images of at least 11x11");

    const int h = a.height, w = a.width;
    const size_t n = a.size();
    std::vector<double> aa(n), bb(n), ab(n);
    for (size_t i = 0; i < n; ++i) {
        aa[i] = a.data[i] * a.data[i];
        bb[i] = b.data[i] * b.data[i];
        ab[i] = a.data[i] * b.data[i];
    }

    const auto k = gaussian_kernel_11();
    const auto mu_a = gauss_valid(a.data, h, w, k);
    const auto mu_b = gauss_valid(b.data, h, w, k);
    const auto m_aa = gauss_valid(aa, h, w, k);
    const auto m_bb = gauss_valid(bb, h, w, k);
    const auto m_ab = gauss_valid(ab, h, w, k);

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    long double acc = 0.0L;
    for (size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double va = m_aa[i] - ma * ma;
        const double vb = m_bb[i] - mb * mb;
        const double cov = m_ab[i] - ma * mb;
        const double val = ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                           ((ma * ma + mb * mb + c1) * (va + vb + c2));
        acc += val;
    }
    return static_cast<double>(acc / static_cast<long double>(mu_a.size()));
}

QualityReport quality_report(const GrayImage& reference, const GrayImage& test) {
    QualityReport q;
    q.mse = mse(reference, test);
    q.psnr = psnr(reference, test);
    q.ssim = ssim(reference, test);
    return q;
}

}  // namespace sureshrink
