#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linsketch/rng.hpp"
#include "linsketch/sketch.hpp"

namespace linsketch {

enum class Distribution { kUniform, kZipf, kPlantedHeavy };
enum class DeltaMode { kNonneg, kSigned, kInsertDelete };

struct StreamSpec {
    std::uint64_t n = 1 << 16;   // universe size
    std::size_t length = 0;      // update count
    Distribution dist = Distribution::kUniform;
    double zipf_s = 1.1;
    std::size_t heavy_count = 1;       // planted-heavy: number of heavy keys
    double heavy_mass = 0.9;           // fraction of updates hitting them
    DeltaMode delta_mode = DeltaMode::kNonneg;
    std::uint64_t seed = 1;

    void validate() const {
        if (n == 0) throw std::invalid_argument("StreamSpec: n must be > 0");
        if (dist == Distribution::kZipf && zipf_s <= 0)
            throw std::invalid_argument("StreamSpec: zipf exponent must be > 0");
        if (dist == Distribution::kPlantedHeavy &&
            (heavy_count == 0 || heavy_count > n || heavy_mass < 0 ||
             heavy_mass > 1))
            throw std::invalid_argument("StreamSpec: bad planted-heavy params");
    }
};

/// Deterministic synthetic turnstile stream for the given spec.
inline std::vector<UpdateRecord> generate_stream(const StreamSpec& spec) {
    spec.validate();
    CounterRng rng(spec.seed, /*stream=*/7);
    std::vector<UpdateRecord> out;
    out.reserve(spec.length);

    // Zipf sampling by inverse CDF over a capped support.
    std::vector<double> cdf;
    if (spec.dist == Distribution::kZipf) {
        std::uint64_t support = std::min<std::uint64_t>(spec.n, 1 << 20);
        cdf.resize(support);
        double acc = 0;
        for (std::uint64_t i = 0; i < support; ++i) {
            acc += std::pow(double(i + 1), -spec.zipf_s);
            cdf[i] = acc;
        }
        for (auto& v : cdf) v /= acc;
    }

    for (std::size_t t = 0; t < spec.length; ++t) {
        std::uint64_t u = 0;
        switch (spec.dist) {
            case Distribution::kUniform:
                u = rng.next_below(spec.n);
                break;
            case Distribution::kZipf: {
                double p = rng.next_double();
                auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
                u = std::uint64_t(it - cdf.begin());
                break;
            }
            case Distribution::kPlantedHeavy:
                if (rng.next_double() < spec.heavy_mass)
                    u = rng.next_below(spec.heavy_count);
                else
                    u = rng.next_below(spec.n);
                break;
        }
        std::int64_t d = 0;
        switch (spec.delta_mode) {
            case DeltaMode::kNonneg:
                d = std::int64_t(rng.next_below(16)) + 1;
                break;
            case DeltaMode::kSigned:
                d = std::int64_t(rng.next_below(16)) + 1;
                if (rng.next() & 1) d = -d;
                break;
            case DeltaMode::kInsertDelete:
                d = (rng.next() & 1) ? 1 : -1;
                break;
        }
        out.push_back({u, d});
    }
    return out;
}

/// Stream file format: little-endian records of (u: 8 bytes, delta: 8 bytes
/// signed).
inline void write_stream(std::ostream& os,
                         const std::vector<UpdateRecord>& stream) {
    for (const auto& r : stream) {
        char buf[16];
        std::uint64_t d = std::uint64_t(r.delta);
        for (int b = 0; b < 8; ++b) {
            buf[b] = char((r.u >> (8 * b)) & 0xff);
            buf[8 + b] = char((d >> (8 * b)) & 0xff);
        }
        os.write(buf, 16);
    }
}

inline std::vector<UpdateRecord> read_stream(std::istream& is) {
    std::vector<UpdateRecord> out;
    char buf[16];
    while (is.read(buf, 16)) {
        std::uint64_t u = 0, d = 0;
        for (int b = 0; b < 8; ++b) {
            u |= std::uint64_t(std::uint8_t(buf[b])) << (8 * b);
            d |= std::uint64_t(std::uint8_t(buf[8 + b])) << (8 * b);
        }
        out.push_back({u, std::int64_t(d)});
    }
    if (is.gcount() != 0)
        throw std::runtime_error("read_stream: truncated record");
    return out;
}

}  // namespace linsketch
