#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sureshrink/bss.hpp"
#include "sureshrink/image.hpp"
#include "sureshrink/integral.hpp"
#include "sureshrink/nlm.hpp"

using namespace sureshrink;

namespace {

struct Synth {
    GrayImage y;
    NlmOutput nlm;
    double sigma = 20.0;
};

// Build a consistent (y, x_hat, divergence, psure) bundle without running the
// denoiser: residuals and divergences are drawn at random and the risk map is
// filled in from the same definition the estimator uses.
Synth make_synth(int w, int h, uint64_t seed, bool zero_residual_pixel = false) {
    Synth s;
    s.y.width = w;
    s.y.height = h;
    s.y.data.assign(static_cast<size_t>(w) * h, 0.0);
    s.nlm.x_hat = GrayImage(w, h);
    s.nlm.divergence.resize(s.y.data.size());
    s.nlm.psure_map.resize(s.y.data.size());
    s.nlm.sigma = s.sigma;
    uint64_t st = seed * 0x9e3779b97f4a7c15ULL + 11;
    auto uni = [&st]() {
        st ^= st << 13;
        st ^= st >> 7;
        st ^= st << 17;
        return static_cast<double>(st >> 11) * 0x1.0p-53;
    };
    for (size_t i = 0; i < s.y.data.size(); ++i) {
        const double xh = 30.0 + 200.0 * uni();
        double r = -30.0 + 60.0 * uni();
        if (zero_residual_pixel && i == s.y.data.size() / 2) r = 0.0;
        const double div = uni();
        s.nlm.x_hat.data[i] = xh;
        s.y.data[i] = xh + r;
        s.nlm.divergence[i] = div;
        s.nlm.psure_map[i] = r * r + 2.0 * s.sigma * s.sigma * div - s.sigma * s.sigma;
    }
    return s;
}

}  // namespace

TEST_CASE("pixel coefficients satisfy the shrinkage identity") {
    const Synth s = make_synth(16, 12, 3);
    const ShrinkCoeffs c = pixel_coeffs(s.y, s.nlm);
    REQUIRE(c.width == 16);
    REQUIRE(c.height == 12);
    const double s2 = s.sigma * s.sigma;
    for (size_t i = 0; i < c.a2.size(); ++i) {
        CHECK(c.a2[i] >= 0.0);
        // At full shrinkage the blend returns the noisy pixel, whose risk is sigma^2.
        CHECK(std::fabs(c.a2[i] + 2.0 * c.a1[i] + c.a0[i] - s2) <= 1e-10);
    }
}

TEST_CASE("block risk equals the averaged risk of the blended estimator") {
    const Synth s = make_synth(20, 20, 7);
    const ShrinkCoeffs c = pixel_coeffs(s.y, s.nlm);
    const IntegralImage ii2 = IntegralImage::build(c.a2, c.height, c.width);
    const IntegralImage ii1 = IntegralImage::build(c.a1, c.height, c.width);
    const IntegralImage ii0 = IntegralImage::build(c.a0, c.height, c.width);
    const double s2 = s.sigma * s.sigma;
    const double p = 0.37;
    for (const auto anchor : {std::pair{0, 0}, std::pair{5, 3}, std::pair{17, 16}}) {
        const int B = 4;
        const BlockCoeffs bc =
            block_coeffs(ii2, ii1, ii0, anchor.first, anchor.second, B, c.width, c.height);
        const double got = bsure_value(bc.A2, bc.A1, bc.A0, p, bc.area);

        // Independent route: risk of x_hat + p*(y - x_hat) from first principles.
        long double acc = 0.0L;
        int n = 0;
        for (int r = anchor.first; r < std::min(anchor.first + B, c.height); ++r)
            for (int col = anchor.second; col < std::min(anchor.second + B, c.width); ++col) {
                const int i = r * c.width + col;
                const double res = s.y.data[i] - s.nlm.x_hat.data[i];
                const double div_blend = (1.0 - p) * s.nlm.divergence[i] + p;
                acc += (1.0 - p) * (1.0 - p) * res * res + 2.0 * s2 * div_blend - s2;
                ++n;
            }
        REQUIRE(n == bc.area);
        CHECK(std::fabs(got - static_cast<double>(acc / n)) <= 1e-10);
    }
}

TEST_CASE("optimal shrinkage closed form") {
    CHECK(optimal_shrinkage(0.0, 5.0) == doctest::Approx(0.0));
    CHECK(optimal_shrinkage(-10.0, 4.0) == doctest::Approx(1.0));  // clamp at 1
    CHECK(optimal_shrinkage(-1.0, 4.0) == doctest::Approx(0.25));
    CHECK(optimal_shrinkage(3.0, 4.0) == doctest::Approx(0.0));  // clamp at 0
    CHECK(optimal_shrinkage(-2.0, 0.0) == doctest::Approx(1.0));  // flat quadratic, improving
    CHECK(optimal_shrinkage(2.0, 0.0) == doctest::Approx(0.0));
    CHECK(optimal_shrinkage(0.0, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(optimal_shrinkage(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("minimizer beats both endpoints and full shrinkage recovers sigma^2") {
    const Synth s = make_synth(24, 24, 11);
    const ShrinkCoeffs c = pixel_coeffs(s.y, s.nlm);
    const IntegralImage ii2 = IntegralImage::build(c.a2, c.height, c.width);
    const IntegralImage ii1 = IntegralImage::build(c.a1, c.height, c.width);
    const IntegralImage ii0 = IntegralImage::build(c.a0, c.height, c.width);
    const double s2 = s.sigma * s.sigma;
    for (int anchor_r = 0; anchor_r < 24; anchor_r += 5)
        for (int anchor_c = 0; anchor_c < 24; anchor_c += 5) {
            const BlockCoeffs bc =
                block_coeffs(ii2, ii1, ii0, anchor_r, anchor_c, 7, c.width, c.height);
            CHECK(bc.A2 >= 0.0);
            CHECK(std::fabs(bsure_value(bc.A2, bc.A1, bc.A0, 1.0, bc.area) - s2) <= 1e-8);
            const double pstar = optimal_shrinkage(bc.A1, bc.A2);
            const double at_star = bsure_value(bc.A2, bc.A1, bc.A0, pstar, bc.area);
            CHECK(at_star <= bsure_value(bc.A2, bc.A1, bc.A0, 0.0, bc.area) + 1e-12);
            CHECK(at_star <= bsure_value(bc.A2, bc.A1, bc.A0, 1.0, bc.area) + 1e-12);
        }
}

TEST_CASE("single-pixel blocks reduce to pixelwise shrinkage") {
    const Synth s = make_synth(15, 13, 19, /*zero_residual_pixel=*/true);
    const ShrinkCoeffs c = pixel_coeffs(s.y, s.nlm);
    BssState state = bss_begin(c, 1);
    bss_round(state, s.y, s.nlm.x_hat, s.sigma);
    for (size_t i = 0; i < s.y.data.size(); ++i) {
        double expect_p;
        if (c.a2[i] == 0.0) {
            expect_p = c.a1[i] < 0.0 ? 1.0 : 0.0;
        } else {
            expect_p = std::min(1.0, std::max(0.0, -c.a1[i] / c.a2[i]));
        }
        // With one-pixel blocks the gather has a single term, so the block
        // weight cancels out of the blend entirely.
        const double expect =
            s.nlm.x_hat.data[i] + (s.y.data[i] - s.nlm.x_hat.data[i]) * expect_p;
        CHECK(state.p_star[i] == doctest::Approx(expect_p).epsilon(1e-12));
        CHECK(state.x_out.data[i] == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("round output is a convex blend of the two inputs") {
    const Synth s = make_synth(30, 22, 23);
    const ShrinkCoeffs c = pixel_coeffs(s.y, s.nlm);
    BssState state = bss_begin(c, 7);
    bss_round(state, s.y, s.nlm.x_hat, s.sigma);
    for (size_t i = 0; i < s.y.data.size(); ++i) {
        const double lo = std::min(s.nlm.x_hat.data[i], s.y.data[i]);
        const double hi = std::max(s.nlm.x_hat.data[i], s.y.data[i]);
        CHECK(state.x_out.data[i] >= lo - 1e-9);
        CHECK(state.x_out.data[i] <= hi + 1e-9);
        CHECK(state.V[i] > 0.0);
    }
}

TEST_CASE("uniformly unhelpful residuals leave the estimate untouched") {
    // Force a1 > 0 everywhere so every block picks p* = 0.
    Synth s = make_synth(18, 18, 29);
    const double s2 = s.sigma * s.sigma;
    // With div = 0.1 the coefficient a1 works out to 0.9*sigma^2 - r^2, so
    // keeping residuals below 0.9*sigma^2 in square makes it positive everywhere.
    for (size_t i = 0; i < s.y.data.size(); ++i) {
        s.nlm.divergence[i] = 0.1;
        const double r = (s.y.data[i] - s.nlm.x_hat.data[i]) * 0.1;
        s.y.data[i] = s.nlm.x_hat.data[i] + r;
        s.nlm.psure_map[i] = r * r + 2.0 * s2 * 0.1 - s2;
    }
    const ShrinkCoeffs c = pixel_coeffs(s.y, s.nlm);
    for (double v : c.a1) REQUIRE(v > 0.0);
    BssState state = bss_begin(c, 5);
    bss_round(state, s.y, s.nlm.x_hat, s.sigma);
    for (size_t i = 0; i < s.y.data.size(); ++i)
        CHECK(state.x_out.data[i] == doctest::Approx(s.nlm.x_hat.data[i]).epsilon(1e-12));
}

TEST_CASE("integral-image rounds match the direct implementation") {
    const Synth s = make_synth(21, 26, 37, /*zero_residual_pixel=*/true);
    const ShrinkCoeffs c = pixel_coeffs(s.y, s.nlm);
    for (int block : {1, 3, 7}) {
        BssState fast = bss_begin(c, block);
        BssState naive = bss_begin(c, block);
        // Three growing rounds so the running V/S accumulators get exercised too.
        for (int round = 0; round < 3; ++round) {
            bss_round(fast, s.y, s.nlm.x_hat, s.sigma);
            bss_round_naive(naive, s.y, s.nlm.x_hat, c, s.sigma);
            for (size_t i = 0; i < s.y.data.size(); ++i) {
                CHECK(std::fabs(fast.x_out.data[i] - naive.x_out.data[i]) <= 1e-9);
                CHECK(std::fabs(fast.p_star[i] - naive.p_star[i]) <= 1e-9);
            }
            ++fast.block_size;
            ++naive.block_size;
        }
    }
}

TEST_CASE("full pipeline stops by tolerance or by block growth") {
    const Synth s = make_synth(16, 16, 41);
    // Enormous tolerance: the first round always satisfies it.
    BssResult one = bss_shrink(s.y, s.nlm, s.sigma, /*tol=*/1e30, /*initial_block=*/7);
    CHECK(one.rounds == 1);

    // Zero tolerance: rounds continue until the block no longer fits.
    BssResult grow = bss_shrink(s.y, s.nlm, s.sigma, /*tol=*/0.0, /*initial_block=*/7,
                                /*want_diagnostics=*/true);
    CHECK(grow.rounds == 10);  // blocks 7..16 inclusive on a 16x16 frame
    REQUIRE(grow.diagnostics.size() == 10);
    for (int k = 0; k < 10; ++k) {
        CHECK(grow.diagnostics[k].round == k + 1);
        CHECK(grow.diagnostics[k].block_size == 7 + k);
        CHECK(std::isfinite(grow.diagnostics[k].delta));
    }
}

TEST_CASE("noise-free input short-circuits") {
    const Synth s = make_synth(12, 12, 43);
    const BssResult res = bss_shrink(s.y, s.nlm, 0.0, 1e-4, 7);
    CHECK(res.rounds == 0);
    REQUIRE(res.x.data.size() == s.nlm.x_hat.size());
    for (size_t i = 0; i < res.x.data.size(); ++i) CHECK(res.x.data[i] == s.nlm.x_hat.data[i]);
}

TEST_CASE("invalid arguments are rejected") {
    const Synth s = make_synth(10, 10, 47);
    CHECK_THROWS_AS(bss_shrink(s.y, s.nlm, -1.0, 1e-4, 7), std::invalid_argument);
    CHECK_THROWS_AS(bss_shrink(s.y, s.nlm, 20.0, -1.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(bss_shrink(s.y, s.nlm, 20.0, 1e-4, 0), std::invalid_argument);
    CHECK_THROWS_AS(
        bss_shrink(s.y, s.nlm, std::numeric_limits<double>::quiet_NaN(), 1e-4, 7),
        std::invalid_argument);
}

TEST_CASE("end-to-end shrinkage of a real denoiser output runs and blends") {
    // Small but genuine: noisy ramp through the estimator, then block shrinkage.
    GrayImage clean;
    clean.width = 40;
    clean.height = 40;
    clean.data.assign(1600, 0.0);
    for (int r = 0; r < 40; ++r)
        for (int c = 0; c < 40; ++c) clean.at(r, c) = 4.0 * c + 2.0 * r;
    GrayImage y = clean;
    uint64_t st = 12345;
    for (double& v : y.data) {
        st ^= st << 13;
        st ^= st >> 7;
        st ^= st << 17;
        v += 20.0 * (static_cast<double>(st >> 11) * 0x1.0p-53 - 0.5) * 3.46;
    }
    NlmParams p;
    p.patch_radius = 1;
    p.search_radius = 3;
    p.bandwidth_h = 1800.0;
    const NlmOutput nlm = nlm_denoise(y, p, 10.0);
    const BssResult res = bss_shrink(y, nlm, 10.0, 1e-4, 7);
    CHECK(res.rounds >= 1);
    REQUIRE(res.x.data.size() == y.data.size());
    for (size_t i = 0; i < res.x.data.size(); ++i) {
        const double lo = std::min(nlm.x_hat.data[i], y.data[i]);
        const double hi = std::max(nlm.x_hat.data[i], y.data[i]);
        CHECK(res.x.data[i] >= lo - 1e-9);
        CHECK(res.x.data[i] <= hi + 1e-9);
    }
}

#ifdef _OPENMP
TEST_CASE("block shrinkage is bit-identical across worker counts") {
    const Synth s = make_synth(33, 27, 53);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const BssResult serial = bss_shrink(s.y, s.nlm, s.sigma, 1e-4, 7);
    omp_set_num_threads(saved > 1 ? saved : 4);
    const BssResult parallel = bss_shrink(s.y, s.nlm, s.sigma, 1e-4, 7);
    omp_set_num_threads(saved);
    CHECK(serial.rounds == parallel.rounds);
    REQUIRE(serial.x.data.size() == parallel.x.data.size());
    for (size_t i = 0; i < serial.x.data.size(); ++i) CHECK(serial.x.data[i] == parallel.x.data[i]);
}
#endif
