#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace tapelab {

// What a stream is used for; combined with a symbol id to derive an
// independent stream from the master seed.
enum class StreamPurpose : std::uint64_t {
    Arrivals = 1,
    Sweeps = 2,
    Venues = 3,
    Quotes = 4,
    Prices = 5,
    Sizes = 6,
    Latency = 7,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// mt19937_64 output is fixed by the standard; every distribution below is
// implemented here so that draws do not depend on the standard library vendor.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t symbol, StreamPurpose purpose);
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();       // [0, 1)
    double uniform_open();  // (0, 1)
    std::uint64_t uniform_int(std::uint64_t n);  // [0, n), n > 0
    bool bernoulli(double p) { return uniform() < p; }
    double exponential(double rate);
    double normal();
    std::uint32_t binomial(std::uint32_t trials, double p);
    std::uint32_t poisson(double mean);
    /// Geometric on {1, 2, ...} with the given mean (>= 1).
    std::uint32_t geometric(double mean);
    /// Index drawn with probability proportional to weights.
    std::size_t pick(std::span<const double> cumulative_weights);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace tapelab
