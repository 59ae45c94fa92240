// Copyright (c) 2026 the seqmult authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQMULT_RNG_HPP
#define SEQMULT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace seqmult {

namespace detail {

// SplitMix64 finalizer, used to spread seeds and stream ids.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// PCG64 (XSL-RR 128/64).  128-bit LCG state with a per-stream odd increment,
// so distinct stream ids give independent sequences by construction.
class Pcg64 {
public:
    Pcg64(std::uint64_t seed, std::uint64_t stream) {
        inc_ = (static_cast<unsigned __int128>(splitmix64(stream)) << 1u) | 1u;
        state_ = 0;
        step();
        state_ += (static_cast<unsigned __int128>(splitmix64(seed)) << 64) |
                  splitmix64(seed ^ 0xda3e39cb94b95bdbULL);
        step();
    }

    std::uint64_t next() {
        step();
        const std::uint64_t xored =
            static_cast<std::uint64_t>(state_ >> 64) ^ static_cast<std::uint64_t>(state_);
        const unsigned rot = static_cast<unsigned>(state_ >> 122);
        return (xored >> rot) | (xored << ((-rot) & 63u));
    }

private:
    void step() {
        constexpr unsigned __int128 mult =
            (static_cast<unsigned __int128>(0x2360ed051fc65da4ULL) << 64) | 0x4385df649fccf645ULL;
        state_ = state_ * mult + inc_;
    }

    unsigned __int128 state_ = 0;
    unsigned __int128 inc_ = 1;
};

} // namespace detail

// A deterministic, splittable random stream.  Identical (seed, stream_id)
// pairs replay the identical draw sequence; distinct stream ids are
// statistically independent.  Single-owner: never share one stream across
// threads, derive() a child stream per worker instead.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id), engine_(seed, stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Child stream with the same seed but a stream id mixed from
    // (stream_id, child).  Deterministic; children of distinct parents or
    // distinct indices do not collide in practice.
    RngStream derive(std::uint64_t child) const {
        return RngStream(seed_, detail::splitmix64(stream_id_ ^ (child * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL)));
    }

    std::uint64_t next_u64() { return engine_.next(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1): rejects exact zero so callers may take logs.
    double uniform_open01() {
        for (;;) {
            const double u = uniform01();
            if (u > 0.0) return u;
        }
    }

    // Standard normal via the Marsaglia polar method; the spare value of each
    // accepted pair is cached.
    double normal01() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        for (;;) {
            const double u = 2.0 * uniform01() - 1.0;
            const double v = 2.0 * uniform01() - 1.0;
            const double s = u * u + v * v;
            if (s >= 1.0 || s == 0.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v * f;
            has_spare_ = true;
            return u * f;
        }
    }

    // Uniform integer in [0, bound) by rejection (unbiased).
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_.next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    detail::Pcg64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace seqmult

#endif // SEQMULT_RNG_HPP
