#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace synmix {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is identified by a (seed, stream id) pair. The seed is the
/// Philox key and the stream id occupies the upper half of the 128-bit
/// counter, so two streams with different ids never share a block.
/// `substream(i)` derives a child id deterministically, which lets
/// per-dataset or per-chain generators be created in any order.
///
/// Satisfies UniformRandomBitGenerator, so it can drive the standard
/// `<random>` distributions directly.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0) noexcept
        : seed_(seed), stream_id_(stream_id)
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        if (buffered_ == 0) {
            refill();
        }
        --buffered_;
        return buffer_[buffered_];
    }

    /// Uniform double in the open interval (0, 1).
    double uniform() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    [[nodiscard]] RngStream substream(std::uint64_t index) const noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

/// SplitMix64 finalizer; used to derive child stream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace synmix
