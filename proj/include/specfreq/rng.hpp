#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace specfreq {

/// Philox4x32-10 (Salmon et al., SC'11): a keyed bijection on 128-bit counters.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    [[nodiscard]] static Counter block(Counter ctr, Key key) noexcept;
};

/// SplitMix64 finalizer, used to derive stream identifiers.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Identifies one independent random stream.
///
/// The 64-bit `seed` is the Philox key. The 64-bit `stream` fills the upper
/// half of the counter and the lower half counts blocks inside the stream, so
/// distinct (seed, stream) pairs never share a counter value. Child streams
/// are derived by hashing (stream, index); a child depends only on its
/// parent and its index, never on how many values other streams consumed.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    [[nodiscard]] StreamKey child(std::uint64_t index) const noexcept;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Sequential reader over one stream.
class CounterRng {
public:
    explicit CounterRng(StreamKey key) noexcept;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    [[nodiscard]] double uniform() noexcept;
    /// Standard normal via Box-Muller; values come in pairs from one block.
    [[nodiscard]] double normal() noexcept;
    void fill_normal(std::span<double> out) noexcept;

    [[nodiscard]] std::uint64_t blocks_used() const noexcept { return block_; }

private:
    void refill() noexcept;

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int words_left_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace specfreq
