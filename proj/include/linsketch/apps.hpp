#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "linsketch/deamortize.hpp"
#include "linsketch/sketch.hpp"

namespace linsketch {

struct PointEstimate {
    std::int64_t value = 0;
    std::size_t rows_used = 0;
};

struct L2Estimate {
    std::uint64_t value = 0;
};

/// CountMin point query: the minimum over rows of the queried key's bucket
/// counter. Never underestimates on nonnegative streams.
inline PointEstimate point_query(const SketchState& state, std::uint64_t u) {
    const SketchConfig& cfg = state.config();
    auto enc = encode_point(u & state.mask(), state.hash_spec());
    std::int64_t best = 0;
    for (std::size_t j = 0; j < cfg.T; ++j) {
        unsigned b = bucket_of_encoded(enc, j, state.seeds());
        std::int64_t v = state.counter_signed(j, b);
        if (j == 0 || v < best) best = v;
    }
    return {best, cfg.T};
}

inline PointEstimate point_query(BufferedSketch& s, std::uint64_t u) {
    return s.buffered_query(
        [u](const SketchState& st) { return point_query(st, u); });
}

/// Count-sketch second-moment estimate with k = 2: per row the squared
/// difference of the two bucket sums, combined by the lower median.
inline L2Estimate l2_estimate(const SketchState& state) {
    const SketchConfig& cfg = state.config();
    if (cfg.k != 2)
        throw std::invalid_argument("l2_estimate: sketch must have k = 2");
    std::vector<std::uint64_t> est(cfg.T);
    for (std::size_t j = 0; j < cfg.T; ++j) {
        std::int64_t d = state.counter_signed(j, 0) - state.counter_signed(j, 1);
        est[j] = std::uint64_t(d) * std::uint64_t(d);
    }
    std::nth_element(est.begin(), est.begin() + (cfg.T - 1) / 2, est.end());
    return {est[(cfg.T - 1) / 2]};
}

inline L2Estimate l2_estimate(BufferedSketch& s) {
    return s.buffered_query(
        [](const SketchState& st) { return l2_estimate(st); });
}

}  // namespace linsketch
