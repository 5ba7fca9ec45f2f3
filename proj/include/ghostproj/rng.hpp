#pragma once

#include <array>
#include <cstdint>

namespace ghostproj {

/// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// Every draw is a pure function of (key, counter), so any consumer can be
/// evaluated at a random offset without touching generator state. Mask
/// pixels, Poisson streams and Gaussian streams are all keyed off distinct
/// stream ids, which makes results independent of evaluation order and
/// thread count.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter round10(Counter ctr, Key key) noexcept
    {
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

/// Streams carved out of the 32-bit counter word `ctr[3]` (top byte).
enum class RngStream : std::uint32_t {
    mask = 0,
    poisson = 1,
    exposure = 2,
    generic = 3,
};

inline double u01_from_bits(std::uint32_t hi, std::uint32_t lo) noexcept
{
    const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A forward stream of uniform deviates at a fixed (seed, stream, id, sub)
/// location. `id`/`sub` typically hold the mask index and pixel index.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, RngStream stream, std::uint64_t id,
                  std::uint32_t sub = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          base_{sub, static_cast<std::uint32_t>(id),
                static_cast<std::uint32_t>(id >> 32),
                static_cast<std::uint32_t>(stream) << 24}
    {
    }

    double next_u01() noexcept
    {
        if (have_ == 0) {
            auto ctr = base_;
            ctr[3] |= block_++;
            buf_ = Philox4x32::round10(ctr, key_);
            have_ = 2;
        }
        --have_;
        return have_ == 1 ? u01_from_bits(buf_[0], buf_[1])
                          : u01_from_bits(buf_[2], buf_[3]);
    }

    /// Standard normal via Box-Muller (consumes two uniforms).
    double next_gaussian() noexcept;

    /// Poisson deviate with the given mean. Inversion below mean 10,
    /// PTRD-style rejection above.
    std::uint64_t next_poisson(double mean) noexcept;

private:
    Philox4x32::Key key_;
    Philox4x32::Counter base_;
    Philox4x32::Counter buf_{};
    std::uint32_t block_ = 0;
    int have_ = 0;
};

} // namespace ghostproj
