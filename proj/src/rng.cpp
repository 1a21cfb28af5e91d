#include "tapelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tapelab {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t symbol, StreamPurpose purpose)
    : engine_(splitmix64(splitmix64(master_seed) ^ splitmix64((symbol << 8) | static_cast<std::uint64_t>(purpose)))) {}

double RngStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    // Lemire's nearly divisionless method.
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = -n % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(engine_()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::exponential(double rate) {
    return -std::log(uniform_open()) / rate;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint32_t RngStream::binomial(std::uint32_t trials, double p) {
    std::uint32_t k = 0;
    for (std::uint32_t i = 0; i < trials; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
}

std::uint32_t RngStream::poisson(double mean) {
    // Knuth, in chunks so exp(-chunk) never underflows.
    std::uint32_t total = 0;
    while (mean > 0.0) {
        const double chunk = std::min(mean, 16.0);
        mean -= chunk;
        const double limit = std::exp(-chunk);
        double prod = uniform_open();
        while (prod > limit) {
            ++total;
            prod *= uniform_open();
        }
    }
    return total;
}

std::uint32_t RngStream::geometric(double mean) {
    if (mean <= 1.0) return 1;
    const double p = 1.0 / mean;
    return 1 + static_cast<std::uint32_t>(std::floor(std::log(uniform_open()) / std::log1p(-p)));
}

std::size_t RngStream::pick(std::span<const double> cumulative_weights) {
    const double u = uniform() * cumulative_weights.back();
    const auto it = std::upper_bound(cumulative_weights.begin(), cumulative_weights.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_weights.begin()),
                                 cumulative_weights.size() - 1);
}

} // namespace tapelab
