#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "linsketch/bit_matrix.hpp"
#include "linsketch/gf2.hpp"
#include "linsketch/matmul.hpp"
#include "linsketch/ops.hpp"
#include "linsketch/rng.hpp"

namespace linsketch {

constexpr std::size_t kMaxBuckets = 256;

/// Parameters of the c-wise independent family h_s(u) = <s, g(u)> with
/// g(u) = (1, u, u^2, ..., u^(c-1)) over GF(2^W).
class HashFamilySpec {
  public:
    HashFamilySpec(unsigned c, unsigned k, FieldSpec field)
        : c_(c), k_(k), field_(std::move(field)) {
        if (c < 2) throw std::invalid_argument("HashFamilySpec: c must be >= 2");
        if (k < 2 || k > kMaxBuckets || (k & (k - 1)) != 0)
            throw std::invalid_argument(
                "HashFamilySpec: k must be a power of two in [2, 256]");
    }

    unsigned c() const { return c_; }
    unsigned k() const { return k_; }
    unsigned log2k() const { return unsigned(std::countr_zero(k_)); }
    unsigned W() const { return field_.W(); }
    const FieldSpec& field() const { return field_; }

    std::size_t seed_bits() const { return std::size_t(c_) * W(); }
    std::size_t seed_words() const { return (seed_bits() + 63) / 64; }

  private:
    unsigned c_, k_;
    FieldSpec field_;
};

/// A c*W-bit seed, bit p stored at word p/64, bit p%64.
struct HashSeed {
    std::vector<std::uint64_t> bits;

    static HashSeed random(const HashFamilySpec& spec, CounterRng& rng) {
        HashSeed s;
        s.bits.resize(spec.seed_words());
        for (auto& w : s.bits) w = rng.next();
        std::size_t tail = spec.seed_bits() % 64;
        if (tail) s.bits.back() &= (std::uint64_t(1) << tail) - 1;
        return s;
    }
};

/// g(u) packed as a c*W-bit string: block i holds the W coefficient bits of
/// u^i, low-degree coefficient first.
inline std::vector<std::uint64_t> encode_point(std::uint64_t u,
                                               const HashFamilySpec& spec,
                                               OpCounter* oc = nullptr) {
    const unsigned W = spec.W();
    std::vector<std::uint64_t> enc(spec.seed_words(), 0);
    GfElem p(1, spec.field());
    GfElem ue(u, spec.field());
    for (unsigned i = 0; i < spec.c(); ++i) {
        std::size_t base = std::size_t(i) * W;
        std::uint64_t w = p.word();
        enc[base / 64] |= w << (base % 64);
        if (base % 64 && W > 64 - base % 64)
            enc[base / 64 + 1] |= w >> (64 - base % 64);
        if (i + 1 < spec.c()) {
            p = field_mul(p, ue);
            // shift-and-XOR clmul plus long-division reduction, ~4 ALU ops
            // per coefficient bit
            detail::count(oc, 0, 4 * W, 4);
        }
    }
    detail::count(oc, 0, 2 * spec.c(), enc.size());
    return enc;
}

namespace detail {
inline bool dot_f2(std::span<const std::uint64_t> a,
                   std::span<const std::uint64_t> b, OpCounter* oc) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc ^= a[i] & b[i];
    count(oc, 0, 3 * a.size() + 1, 2 * a.size());
    return std::popcount(acc) & 1;
}
}  // namespace detail

/// One hash bit: the F_2 inner product of the seed with g(u).
inline bool eval_single(const HashSeed& s, std::uint64_t u,
                        const HashFamilySpec& spec, OpCounter* oc = nullptr) {
    auto enc = encode_point(u, spec, oc);
    return detail::dot_f2(s.bits, enc, oc);
}

inline bool eval_encoded(const HashSeed& s,
                         std::span<const std::uint64_t> enc,
                         OpCounter* oc = nullptr) {
    return detail::dot_f2(s.bits, enc, oc);
}

/// Batched evaluation: output[j][i] = h_{s_j}(u_i), computed as the F_2
/// product S X of the m x cW seed matrix and the cW x B matrix of encoded
/// points.
inline BitMatrix batch_eval(const std::vector<HashSeed>& seeds,
                            const std::vector<std::uint64_t>& keys,
                            const HashFamilySpec& spec,
                            const BaseKernel* kernel = nullptr,
                            OpCounter* oc = nullptr) {
    const std::size_t m = seeds.size(), b = keys.size();
    const std::size_t cw = spec.seed_bits();
    BitMatrix s(m, cw);
    for (std::size_t j = 0; j < m; ++j) {
        auto row = s.row(j);
        for (std::size_t w = 0; w < seeds[j].bits.size(); ++w)
            row[w] = seeds[j].bits[w];
    }
    BitMatrix x(cw, b);
    for (std::size_t i = 0; i < b; ++i) {
        auto enc = encode_point(keys[i], spec, oc);
        for (std::size_t p = 0; p < cw; ++p)
            if ((enc[p / 64] >> (p % 64)) & 1) x.set(p, i, true);
    }
    if (kernel) return matmul_rect(s, x, *kernel, oc);
    return matmul_schoolbook(s, x, oc);
}

/// T * log2(k) seeds, one per (sketch row, output bit), regenerated
/// deterministically from the master seed.
class BucketSeedSet {
  public:
    BucketSeedSet(const HashFamilySpec& spec, std::size_t T,
                  std::uint64_t master_seed)
        : rows_(T), log2k_(spec.log2k()) {
        CounterRng rng(master_seed, /*stream=*/1);
        seeds_.reserve(T * log2k_);
        for (std::size_t i = 0; i < T * log2k_; ++i)
            seeds_.push_back(HashSeed::random(spec, rng));
    }

    std::size_t rows() const { return rows_; }
    unsigned bits_per_bucket() const { return log2k_; }

    const HashSeed& seed(std::size_t row, unsigned bit) const {
        return seeds_[row * log2k_ + bit];
    }

    /// All seeds in (row-major, bit-minor) order, the layout batch_eval uses.
    const std::vector<HashSeed>& all() const { return seeds_; }

  private:
    std::size_t rows_;
    unsigned log2k_;
    std::vector<HashSeed> seeds_;
};

/// Bucket index of key u in sketch row `row`: bit t of the result is
/// h from seed (row, t) applied to u.
inline unsigned bucket_of(std::uint64_t u, std::size_t row,
                          const BucketSeedSet& seeds,
                          const HashFamilySpec& spec,
                          OpCounter* oc = nullptr) {
    auto enc = encode_point(u, spec, oc);
    unsigned b = 0;
    for (unsigned t = 0; t < seeds.bits_per_bucket(); ++t)
        if (eval_encoded(seeds.seed(row, t), enc, oc)) b |= 1u << t;
    return b;
}

inline unsigned bucket_of_encoded(std::span<const std::uint64_t> enc,
                                  std::size_t row, const BucketSeedSet& seeds,
                                  OpCounter* oc = nullptr) {
    unsigned b = 0;
    for (unsigned t = 0; t < seeds.bits_per_bucket(); ++t)
        if (eval_encoded(seeds.seed(row, t), enc, oc)) b |= 1u << t;
    return b;
}

}  // namespace linsketch
