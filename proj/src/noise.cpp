#include "sureshrink/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sureshrink {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// xoshiro256++, state seeded through splitmix64 so any 64-bit seed (zero
// included) yields a well-mixed stream.
struct Xoshiro256pp {
    uint64_t s[4];

    explicit Xoshiro256pp(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : s) word = splitmix64(sm);
    }

    uint64_t next() {
        const uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // One uniform pair per Box-Muller invocation: u1 in (0,1] keeps the log
    // finite, u2 in [0,1).
    double uniform_open_closed() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
    double uniform_closed_open() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace

GrayImage add_gaussian(const GrayImage& x, const NoiseSpec& spec) {
    validate_image(x);
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
        throw std::invalid_argument("noise sigma must be finite and non-negative");
    GrayImage y = x;
    if (spec.sigma == 0.0)
        return y;

    // Sequential fill in row-major order; the stream position defines the
    // output, so this loop must not be parallelized or reordered.
    Xoshiro256pp rng(spec.seed);
    const size_t n = y.size();
    for (size_t i = 0; i < n; i += 2) {
        const double u1 = rng.uniform_open_closed();
        const double u2 = rng.uniform_closed_open();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = kTwoPi * u2;
        y.data[i] += spec.sigma * (radius * std::cos(angle));
        if (i + 1 < n)
            y.data[i + 1] += spec.sigma * (radius * std::sin(angle));
    }
    return y;
}

double estimate_sigma(const GrayImage& y) {
    validate_image(y);
    if (y.width < 3 || y.height < 3)
        throw std::invalid_argument("sigma estimation needs an image of at least 3x3");

    std::vector<double> responses;
    responses.reserve(static_cast<size_t>(y.width - 2) * (y.height - 2));
    for (int r = 1; r + 1 < y.height; ++r)
        for (int c = 1; c + 1 < y.width; ++c) {
            const double lap = y.at(r - 1, c) + y.at(r + 1, c) + y.at(r, c - 1) +
                               y.at(r, c + 1) - 4.0 * y.at(r, c);
            responses.push_back(std::fabs(lap));
        }

    std::sort(responses.begin(), responses.end());
    const size_t n = responses.size();
    const double median = (n % 2 == 1)
                              ? responses[n / 2]
                              : 0.5 * (responses[n / 2 - 1] + responses[n / 2]);
    // 0.6745 converts MAD to a Gaussian std; sqrt(20) is the Laplacian
    // kernel's l2 norm, which scales i.i.d. noise through the filter.
    return median / (0.6745 * std::sqrt(20.0));
}

}  // namespace sureshrink
