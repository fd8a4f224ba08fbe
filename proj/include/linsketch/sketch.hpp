#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "linsketch/bit_matrix.hpp"
#include "linsketch/hash.hpp"
#include "linsketch/matvec.hpp"
#include "linsketch/ops.hpp"

namespace linsketch {

constexpr std::size_t kMaxRepetitions = 512;

struct UpdateRecord {
    std::uint64_t u = 0;
    std::int64_t delta = 0;
};

struct SketchConfig {
    unsigned k = 2;
    unsigned c = 2;
    std::size_t T = 64;
    unsigned W = 64;
    std::size_t B = 64;
    std::uint64_t master_seed = 1;

    void validate() const {
        if (k < 2 || k > kMaxBuckets || (k & (k - 1)) != 0)
            throw std::invalid_argument("SketchConfig: bad k");
        if (c < 2) throw std::invalid_argument("SketchConfig: c must be >= 2");
        if (T == 0 || T > kMaxRepetitions)
            throw std::invalid_argument("SketchConfig: bad T");
        if (W != 8 && W != 16 && W != 32 && W != 64)
            throw std::invalid_argument("SketchConfig: bad W");
        if (B < 1 || B > T * W)
            throw std::invalid_argument("SketchConfig: B must be in [1, T*W]");
    }
};

/// Engine choices for the batch path. The packed matvec backend and a
/// recursive hash-eval kernel are the slower, structurally faithful routes;
/// the defaults favor throughput at desk scale.
struct FlushPlan {
    MatvecBackend matvec = MatvecBackend::kWordMm;
    const BaseKernel* hash_kernel = nullptr;  // null: word-parallel schoolbook
};

/// The lin-skt(k, c, T) memory state: T seed rows and T x k signed counters,
/// exact mod 2^W.
class SketchState {
  public:
    explicit SketchState(SketchConfig cfg)
        : cfg_((cfg.validate(), cfg)), field_(FieldSpec::for_width(cfg.W)),
          spec_(cfg.c, cfg.k, field_),
          seeds_(spec_, cfg.T, cfg.master_seed),
          counters_(cfg.T * cfg.k, 0),
          layout_perm_(make_layout_perm(cfg)) {}

    const SketchConfig& config() const { return cfg_; }
    const HashFamilySpec& hash_spec() const { return spec_; }
    const BucketSeedSet& seeds() const { return seeds_; }

    std::uint64_t mask() const {
        return cfg_.W == 64 ? ~std::uint64_t(0)
                            : (std::uint64_t(1) << cfg_.W) - 1;
    }

    std::uint64_t counter(std::size_t row, unsigned bucket) const {
        return counters_[row * cfg_.k + bucket];
    }

    std::int64_t counter_signed(std::size_t row, unsigned bucket) const {
        std::uint64_t v = counter(row, bucket);
        if (cfg_.W < 64 && (v >> (cfg_.W - 1)) & 1) v |= ~mask();
        return std::int64_t(v);
    }

    std::vector<std::uint64_t> counters_snapshot() const { return counters_; }

    void naive_update(const UpdateRecord& upd, OpCounter* oc = nullptr) {
        auto enc = encode_point(upd.u & mask(), spec_, oc);
        std::uint64_t d = std::uint64_t(upd.delta) & mask();
        for (std::size_t j = 0; j < cfg_.T; ++j) {
            unsigned b = bucket_of_encoded(enc, j, seeds_, oc);
            std::uint64_t& ctr = counters_[j * cfg_.k + b];
            ctr = (ctr + d) & mask();
            detail::count(oc, 0, 2, 2);
        }
    }

    /// The batch path: hash batch-eval, indicator assembly, layout
    /// permutation, wide matrix-vector product, counter add. Equivalent to
    /// folding naive_update over the batch in order.
    void batch_update(std::span<const UpdateRecord> batch,
                      const FlushPlan& plan = {}, OpCounter* oc = nullptr) {
        if (batch.size() > cfg_.B)
            throw std::invalid_argument("batch_update: batch exceeds B");
        if (batch.empty()) return;

        std::vector<std::uint64_t> keys(cfg_.B, 0);
        IntVector deltas(cfg_.B, cfg_.W);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            keys[i] = batch[i].u & mask();
            deltas.set(i, std::uint64_t(batch[i].delta));
        }

        BitMatrix h = batch_eval(seeds_.all(), keys, spec_, plan.hash_kernel,
                                 oc);
        BitMatrix ind = assemble_indicators(h, oc);
        auto permuted = layout_perm_.apply(ind.words(), oc);
        BitMatrix ind_rowmajor = BitMatrix::from_words(
            cfg_.k * cfg_.T, cfg_.B, std::move(permuted));

        IntVector dv = matvec_wide(ind_rowmajor, deltas, plan.matvec, oc);
        for (std::size_t l = 0; l < counters_.size(); ++l) {
            counters_[l] = (counters_[l] + dv.get(l)) & mask();
        }
        detail::count(oc, 0, 2 * counters_.size(), 2 * counters_.size());
    }

    /// State serialization: one JSON header line, then the raw little-endian
    /// counter dump. Round-trips bit-exactly.
    void save(std::ostream& os) const {
        nlohmann::json j = {
            {"k", cfg_.k},          {"c", cfg_.c},
            {"T", cfg_.T},          {"W", cfg_.W},
            {"B", cfg_.B},          {"master_seed", cfg_.master_seed},
            {"field", field_.to_string()},
        };
        os << j.dump() << '\n';
        for (std::uint64_t v : counters_) {
            char buf[8];
            for (int b = 0; b < 8; ++b) buf[b] = char((v >> (8 * b)) & 0xff);
            os.write(buf, 8);
        }
    }

    static SketchState load(std::istream& is) {
        std::string header;
        if (!std::getline(is, header))
            throw std::runtime_error("SketchState::load: missing header");
        nlohmann::json j = nlohmann::json::parse(header);
        SketchConfig cfg;
        cfg.k = j.at("k");
        cfg.c = j.at("c");
        cfg.T = j.at("T");
        cfg.W = j.at("W");
        cfg.B = j.at("B");
        cfg.master_seed = j.at("master_seed");
        SketchState s(cfg);
        if (!(s.field_.to_string() == j.at("field").get<std::string>()))
            throw std::runtime_error("SketchState::load: field spec mismatch");
        for (auto& v : s.counters_) {
            char buf[8];
            if (!is.read(buf, 8))
                throw std::runtime_error("SketchState::load: truncated dump");
            v = 0;
            for (int b = 0; b < 8; ++b)
                v |= std::uint64_t(std::uint8_t(buf[b])) << (8 * b);
        }
        return s;
    }

    const BitPermutation& layout_perm() const { return layout_perm_; }

    /// Fills rows bucket*T .. bucket*T+T-1 of `ind` (production order b*T+j):
    /// row (b, j) marks the batch positions whose row-j bucket is b, built
    /// from the hash-bit rows by log2(k) word-wise ANDs and negations.
    void indicator_rows(const BitMatrix& h, unsigned bucket, BitMatrix& ind,
                        OpCounter* oc = nullptr) const {
        const unsigned logk = spec_.log2k();
        const std::size_t stride = h.stride();
        std::uint64_t tail = h.tail_mask();
        for (std::size_t j = 0; j < cfg_.T; ++j) {
            auto out = ind.row(bucket * cfg_.T + j);
            for (std::size_t w = 0; w < stride; ++w)
                out[w] = w + 1 == stride ? tail : ~std::uint64_t(0);
            for (unsigned t = 0; t < logk; ++t) {
                auto hr = h.row(j * logk + t);
                bool want = (bucket >> t) & 1;
                for (std::size_t w = 0; w < stride; ++w)
                    out[w] &= want ? hr[w] : ~hr[w];
            }
            detail::count(oc, 0, (logk + 1) * stride, (logk + 2) * stride);
        }
    }

    void apply_counter_delta(std::size_t offset,
                             std::span<const std::uint64_t> vals,
                             OpCounter* oc = nullptr) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::uint64_t& ctr = counters_[offset + i];
            ctr = (ctr + vals[i]) & mask();
        }
        detail::count(oc, 0, 2 * vals.size(), 2 * vals.size());
    }

  private:
    BitMatrix assemble_indicators(const BitMatrix& h, OpCounter* oc) const {
        BitMatrix ind(cfg_.k * cfg_.T, cfg_.B);
        for (unsigned b = 0; b < cfg_.k; ++b) indicator_rows(h, b, ind, oc);
        ind.clear_padding();
        return ind;
    }

    /// Fixed bit permutation taking row order b*T + j to row order j*k + b
    /// over the padded row-major buffer.
    static BitPermutation make_layout_perm(const SketchConfig& cfg) {
        std::size_t rowbits = ((cfg.B + 63) / 64) * 64;
        std::size_t nrows = std::size_t(cfg.k) * cfg.T;
        std::vector<std::size_t> pi(nrows * rowbits);
        for (std::size_t r = 0; r < nrows; ++r) {
            std::size_t j = r / cfg.k, b = r % cfg.k;
            std::size_t src_row = b * cfg.T + j;
            for (std::size_t off = 0; off < rowbits; ++off)
                pi[r * rowbits + off] = src_row * rowbits + off;
        }
        return BitPermutation(std::move(pi));
    }

    SketchConfig cfg_;
    FieldSpec field_;
    HashFamilySpec spec_;
    BucketSeedSet seeds_;
    std::vector<std::uint64_t> counters_;
    BitPermutation layout_perm_;
};

}  // namespace linsketch
