#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace nuhawkes {

/// SplitMix64 finalizer; used to derive stream keys, never as a generator.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a over a tag string, so module names can enter the key derivation.
[[nodiscard]] constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key selects an independent stream; the 128-bit counter walks
/// through it. Satisfies UniformRandomBitGenerator with 64-bit output.
class Philox4x32 {
public:
    using result_type = std::uint64_t;

    explicit Philox4x32(std::uint64_t key = 0) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (index_ >= 4) {
            refill();
        }
        const std::uint64_t lo = block_[index_];
        const std::uint64_t hi = block_[index_ + 1];
        index_ += 2;
        return (hi << 32) | lo;
    }

    /// Uniform double in the open interval (0, 1), 53 bits of resolution.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// One 10-round Philox block for an explicit counter and key.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) noexcept;

    [[nodiscard]] std::uint64_t key() const noexcept {
        return (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0];
    }

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 4> block_{};
    unsigned index_ = 4;
};

/// Key for the stream owned by (root seed, module, path index). Different
/// modules and paths never share a key unless the 64-bit mix collides.
[[nodiscard]] constexpr std::uint64_t stream_key(std::uint64_t root, std::string_view module,
                                                 std::uint64_t path_index) noexcept {
    return mix64(mix64(root ^ tag_hash(module)) + mix64(path_index));
}

[[nodiscard]] inline Philox4x32 make_stream(std::uint64_t root, std::string_view module,
                                            std::uint64_t path_index) noexcept {
    return Philox4x32(stream_key(root, module, path_index));
}

} // namespace nuhawkes
