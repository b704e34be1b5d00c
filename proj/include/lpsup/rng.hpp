#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace lpsup {

std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256++ seeded from (seed, stream). Every stream is an independent
/// generator, so a variate is fixed by (seed, stream, position) alone.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Standard normal variates drawn from one StreamRng.
class NormalSource {
public:
    NormalSource(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

    double operator()() { return dist_(rng_); }
    StreamRng& engine() noexcept { return rng_; }

private:
    StreamRng rng_;
    boost::random::normal_distribution<double> dist_;
};

/// Worker count: `requested` if positive, else LPSUP_THREADS, else the
/// hardware concurrency (at least 1).
unsigned resolve_threads(int requested);

/// Runs fn(chunk) for chunk in [0, n_chunks) on up to `threads` workers.
/// The first exception thrown by any chunk is rethrown after all workers stop.
void for_each_chunk(std::size_t n_chunks, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lpsup
