#pragma once

// Counter-based random number generation (Philox4x32-10).
// Every draw is a pure function of (seed, stream, counter), so ensembles
// keyed by (seed, path index, step index) reproduce exactly regardless of
// execution order or worker count.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace reflectics {

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

class Philox4x32 {
public:
    explicit Philox4x32(uint64_t seed, uint64_t stream = 0) {
        const uint64_t k = detail::splitmix64(seed) ^ detail::splitmix64(~stream * 0xD1342543DE82EF95ULL + 1);
        key_[0] = static_cast<uint32_t>(k);
        key_[1] = static_cast<uint32_t>(k >> 32);
    }

    // 128-bit counter split as (block, event): `event` identifies the draw
    // site (e.g. a step index), `block` enumerates output blocks within it.
    std::array<uint32_t, 4> raw(uint64_t event, uint64_t block) const {
        std::array<uint32_t, 4> ctr = {
            static_cast<uint32_t>(block), static_cast<uint32_t>(block >> 32),
            static_cast<uint32_t>(event), static_cast<uint32_t>(event >> 32)};
        uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = 0xD2511F53ULL * ctr[0];
            const uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
            const std::array<uint32_t, 4> next = {
                static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                static_cast<uint32_t>(p1),
                static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                static_cast<uint32_t>(p0)};
            ctr = next;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return ctr;
    }

    // Uniform in (0,1) with 53 random bits.
    double u01(uint64_t event, uint64_t block) const {
        const auto r = raw(event, block);
        const uint64_t bits = (static_cast<uint64_t>(r[0]) << 32) | r[1];
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // Fills `out` with i.i.d. standard normals for one draw event.
    void fill_normals(uint64_t event, std::span<double> out) const {
        size_t i = 0;
        uint64_t block = 0;
        while (i < out.size()) {
            const auto r = raw(event, block++);
            const uint64_t b1 = (static_cast<uint64_t>(r[0]) << 32) | r[1];
            const uint64_t b2 = (static_cast<uint64_t>(r[2]) << 32) | r[3];
            const double u1 = (static_cast<double>(b1 >> 11) + 0.5) * 0x1.0p-53;
            const double u2 = (static_cast<double>(b2 >> 11) + 0.5) * 0x1.0p-53;
            const double rad = std::sqrt(-2.0 * std::log(u1));
            out[i++] = rad * std::cos(2.0 * M_PI * u2);
            if (i < out.size()) out[i++] = rad * std::sin(2.0 * M_PI * u2);
        }
    }

private:
    std::array<uint32_t, 2> key_;
};

// Sequential convenience stream on top of the keyed generator (for MCMC
// chains and samplers that consume draws one by one).
class RngStream {
public:
    explicit RngStream(uint64_t seed, uint64_t stream = 0) : gen_(seed, stream) {}

    double u01() { return gen_.u01(ctr_++, 0); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double z[2];
        gen_.fill_normals(ctr_++, std::span<double>(z, 2));
        spare_ = z[1];
        have_spare_ = true;
        return z[0];
    }

    // Uniform integer in [0, n)
    uint64_t index(uint64_t n) { return static_cast<uint64_t>(u01() * static_cast<double>(n)) % n; }

private:
    Philox4x32 gen_;
    uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace reflectics
