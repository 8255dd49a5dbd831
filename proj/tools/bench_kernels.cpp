// Micro-benchmark comparing the integral-image kernels against the serial
// brute-force references, plus shrinkage round cost at two block sizes.

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "sureshrink/bss.hpp"
#include "sureshrink/image.hpp"
#include "sureshrink/nlm.hpp"
#include "sureshrink/noise.hpp"
#include "sureshrink/threading.hpp"

using namespace sureshrink;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

GrayImage make_input(const std::string& path, int size, double sigma) {
    GrayImage clean;
    if (!path.empty()) {
        clean = load_pgm(path);
        if (size > 0 && size <= std::min(clean.width, clean.height)) {
            GrayImage crop;
            crop.width = size;
            crop.height = size;
            crop.data.resize(static_cast<size_t>(size) * size);
            for (int r = 0; r < size; ++r)
                for (int c = 0; c < size; ++c) crop.at(r, c) = clean.at(r, c);
            clean = std::move(crop);
        }
    } else {
        const int n = size > 0 ? size : 256;
        clean.width = n;
        clean.height = n;
        clean.data.resize(static_cast<size_t>(n) * n);
        uint64_t s = 0x1234abcdULL;
        for (double& v : clean.data) {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            v = 255.0 * (static_cast<double>(s >> 11) * 0x1.0p-53);
        }
    }
    return add_gaussian(clean, {sigma, 1});
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap_from_env();

    std::string image;
    int size = 128;
    int patch = 3, search = 15;
    double sigma = 20.0;
    int reps = 5;

    CLI::App app{"Kernel timing: fast vs brute-force paths"};
    app.add_option("--image", image, "input PGM (random field if omitted)");
    app.add_option("--size", size, "square crop / synthetic size (default 128)");
    app.add_option("--patch", patch, "odd patch side");
    app.add_option("--search", search, "odd search side");
    app.add_option("--sigma", sigma, "noise level");
    app.add_option("--reps", reps, "shrinkage-round timing repetitions");
    CLI11_PARSE(app, argc, argv);

    const GrayImage noisy = make_input(image, size, sigma);
    std::printf("input: %dx%d  patch %d  search %d  sigma %.1f  workers %d\n", noisy.width,
                noisy.height, patch, search, sigma, worker_count());

    NlmParams params;
    params.patch_radius = (patch - 1) / 2;
    params.search_radius = (search - 1) / 2;
    params.bandwidth_h = patch * patch * sigma * sigma / 2.0;

    NlmTimings timings;
    const NlmOutput fast = nlm_denoise(noisy, params, sigma, &timings);
    std::printf("fast nlm: %.3fs weights+average, %.3fs risk stage\n", timings.nlm_seconds,
                timings.sure_seconds);

#ifdef _OPENMP
    {
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        NlmTimings t1;
        (void)nlm_denoise(noisy, params, sigma, &t1);
        omp_set_num_threads(saved);
        std::printf("fast nlm, single worker: %.3fs weights+average, %.3fs risk stage\n",
                    t1.nlm_seconds, t1.sure_seconds);
    }
#endif

    {
        const auto t0 = Clock::now();
        const NlmOutput brute = nlm_denoise_brute(noisy, params, sigma);
        const double dt = seconds_since(t0);
        double worst = 0.0;
        for (size_t i = 0; i < brute.x_hat.data.size(); ++i)
            worst = std::max(worst, std::abs(brute.x_hat.data[i] - fast.x_hat.data[i]));
        std::printf("brute nlm (serial reference): %.3fs, max |diff| vs fast %.3g\n", dt, worst);
    }

    const ShrinkCoeffs coeffs = pixel_coeffs(noisy, fast);
    for (int block : {7, 37}) {
        BssState state = bss_begin(coeffs, block);
        const auto t0 = Clock::now();
        for (int r = 0; r < reps; ++r) bss_round(state, noisy, fast.x_hat, sigma);
        const double per_round = seconds_since(t0) / reps;
        std::printf("shrinkage round, block %2d: %.4fs per round\n", block, per_round);
    }

    BssState naive_state = bss_begin(coeffs, 7);
    const auto t0 = Clock::now();
    bss_round_naive(naive_state, noisy, fast.x_hat, coeffs, sigma);
    std::printf("shrinkage round, block  7, direct reference: %.4fs\n", seconds_since(t0));
    return 0;
}
