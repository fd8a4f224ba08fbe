#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "linsketch/matvec.hpp"
#include "linsketch/rng.hpp"
#include "linsketch/sketch.hpp"

namespace linsketch {

/// Resumable flush of one full buffer, realized as an explicit state machine
/// over the batch-update phases (hash-eval tiles, indicator assembly, layout
/// permutation, matvec tiles, counter add), each split into bounded-cost
/// chunks. step() consumes chunks until a step budget is spent; progress is
/// measured in the word-operation cost model.
class FlushJob {
  public:
    FlushJob(SketchState& state, std::vector<UpdateRecord> buffer,
             FlushPlan plan)
        : state_(&state), plan_(plan), buffer_(std::move(buffer)) {
        const SketchConfig& cfg = state_->config();
        const HashFamilySpec& spec = state_->hash_spec();
        b_ = cfg.B;
        m_ = cfg.T * spec.log2k();
        keys_.assign(b_, 0);
        deltas_.assign(b_, 0);
        for (std::size_t i = 0; i < buffer_.size() && i < b_; ++i) {
            keys_[i] = buffer_[i].u & state_->mask();
            deltas_[i] = std::uint64_t(buffer_[i].delta) & state_->mask();
        }
        x_ = BitMatrix(spec.seed_bits(), b_);
        h_ = BitMatrix(m_, b_);
        ind_ = BitMatrix(cfg.k * cfg.T, b_);
        dv_.assign(cfg.k * cfg.T, 0);
        if (buffer_.size() > b_)
            throw std::invalid_argument("FlushJob: buffer exceeds B");
        done_ = buffer_.empty();
    }

    bool done() const { return done_; }
    std::uint64_t total_spent() const { return spent_; }
    std::uint64_t max_chunk_cost() const { return max_chunk_; }

    /// Runs chunks while the budget is not exhausted. Returns the cost
    /// consumed by this call.
    std::uint64_t step(std::uint64_t budget) {
        std::uint64_t start = spent_;
        while (!done_ && spent_ - start < budget) run_chunk();
        return spent_ - start;
    }

    std::uint64_t finish() {
        std::uint64_t start = spent_;
        while (!done_) run_chunk();
        return spent_ - start;
    }

  private:
    enum class Phase { kEncode, kSeedMatrix, kHashMul, kIndicator, kPermute,
                       kMatvec, kAdd };

    void run_chunk() {
        OpCounter oc;
        const SketchConfig& cfg = state_->config();
        const HashFamilySpec& spec = state_->hash_spec();
        switch (phase_) {
            case Phase::kEncode: {
                std::size_t end = std::min(cursor_ + kEncodeChunk, b_);
                for (std::size_t i = cursor_; i < end; ++i) {
                    auto enc = encode_point(keys_[i], spec, &oc);
                    for (std::size_t p = 0; p < spec.seed_bits(); ++p)
                        if ((enc[p / 64] >> (p % 64)) & 1) x_.set(p, i, true);
                }
                advance(end, b_, Phase::kSeedMatrix);
                break;
            }
            case Phase::kSeedMatrix: {
                const auto& seeds = state_->seeds().all();
                s_ = BitMatrix(m_, spec.seed_bits());
                for (std::size_t j = 0; j < m_; ++j) {
                    auto row = s_.row(j);
                    for (std::size_t w = 0; w < seeds[j].bits.size(); ++w)
                        row[w] = seeds[j].bits[w];
                }
                detail::count(&oc, 0, 0, 2 * m_ * s_.stride());
                advance(1, 1, Phase::kHashMul);
                break;
            }
            case Phase::kHashMul: {
                // one chunk = a tile of rows of S X, word-parallel
                std::size_t end = std::min(cursor_ + kHashChunk, m_);
                for (std::size_t r = cursor_; r < end; ++r) {
                    auto sr = s_.row(r);
                    auto hr = h_.row(r);
                    for (std::size_t w = 0; w < s_.stride(); ++w) {
                        std::uint64_t v = sr[w];
                        while (v) {
                            unsigned bit = std::countr_zero(v);
                            v &= v - 1;
                            auto xr = x_.row(w * 64 + bit);
                            for (std::size_t t = 0; t < x_.stride(); ++t)
                                hr[t] ^= xr[t];
                            detail::count(&oc, 0, x_.stride(),
                                          2 * x_.stride() + 1);
                        }
                    }
                }
                advance(end, m_, Phase::kIndicator);
                break;
            }
            case Phase::kIndicator: {
                state_->indicator_rows(h_, unsigned(cursor_), ind_, &oc);
                advance(cursor_ + 1, cfg.k, Phase::kPermute);
                break;
            }
            case Phase::kPermute: {
                auto permuted = state_->layout_perm().apply(ind_.words(), &oc);
                ind_ = BitMatrix::from_words(cfg.k * cfg.T, b_,
                                             std::move(permuted));
                advance(1, 1, Phase::kMatvec);
                break;
            }
            case Phase::kMatvec: {
                std::size_t end = std::min(cursor_ + kMatvecChunk,
                                           ind_.rows());
                BitMatrix sub = ind_.submatrix(cursor_, 0,
                                               end - cursor_, b_);
                IntVector dsub(b_, cfg.W);
                for (std::size_t i = 0; i < b_; ++i) dsub.set(i, deltas_[i]);
                IntVector out = matvec_wide(sub, dsub, plan_.matvec, &oc);
                for (std::size_t i = 0; i < out.size(); ++i)
                    dv_[cursor_ + i] = out.get(i);
                advance(end, ind_.rows(), Phase::kAdd);
                break;
            }
            case Phase::kAdd: {
                std::size_t end = std::min(cursor_ + kAddChunk, dv_.size());
                state_->apply_counter_delta(
                    cursor_, std::span(dv_).subspan(cursor_, end - cursor_),
                    &oc);
                if (end == dv_.size()) done_ = true;
                cursor_ = end;
                break;
            }
        }
        std::uint64_t cost = oc.total();
        spent_ += cost;
        max_chunk_ = std::max(max_chunk_, cost);
    }

    void advance(std::size_t next, std::size_t limit, Phase next_phase) {
        cursor_ = next;
        if (cursor_ >= limit) {
            phase_ = next_phase;
            cursor_ = 0;
        }
    }

    static constexpr std::size_t kEncodeChunk = 8;
    static constexpr std::size_t kHashChunk = 16;
    static constexpr std::size_t kMatvecChunk = 8;
    static constexpr std::size_t kAddChunk = 256;

    SketchState* state_;
    FlushPlan plan_;
    std::vector<UpdateRecord> buffer_;
    std::size_t b_ = 0, m_ = 0;
    std::vector<std::uint64_t> keys_, deltas_, dv_;
    BitMatrix x_, s_, h_, ind_;
    Phase phase_ = Phase::kEncode;
    std::size_t cursor_ = 0;
    bool done_ = false;
    std::uint64_t spent_ = 0, max_chunk_ = 0;
};

struct StepReport {
    std::uint64_t quantum = 0;
    std::uint64_t max_steps_per_update = 0;
    std::uint64_t flush_total_steps = 0;
    std::uint64_t flushes = 0;
    std::uint64_t extra_query_steps = 0;

    std::string to_json() const {
        return "{\"quantum\":" + std::to_string(quantum) +
               ",\"max_steps_per_update\":" +
               std::to_string(max_steps_per_update) +
               ",\"flush_total_steps\":" + std::to_string(flush_total_steps) +
               ",\"flushes\":" + std::to_string(flushes) + "}";
    }
};

/// Double-buffer worst-case wrapper: updates append to the active buffer and
/// resume the pending background flush for one quantum of steps; when the
/// active buffer fills, the buffers switch roles and a fresh flush starts on
/// the full one. Queries complete all pending work first.
class BufferedSketch {
  public:
    explicit BufferedSketch(SketchConfig cfg, FlushPlan plan = {})
        : state_(cfg), plan_(plan) {
        buf_[0].reserve(cfg.B);
        buf_[1].reserve(cfg.B);
        calibrate();
    }

    const SketchState& state() const { return state_; }
    std::size_t buffered() const {
        return buf_[0].size() + buf_[1].size();
    }

    void buffered_update(const UpdateRecord& upd) {
        buf_[active_].push_back(upd);
        if (buf_[active_].size() == state_.config().B) {
            if (job_)
                throw std::logic_error(
                    "BufferedSketch: buffer filled before background flush "
                    "finished (quantum mis-sized)");
            active_ = 1 - active_;
            job_.emplace(state_, buf_[1 - active_], plan_);
        }
        std::uint64_t spent = 0;
        if (job_) {
            spent = job_->step(step_budget_);
            acct_.flush_total_steps += spent;
            if (job_->done()) retire_job();
        }
        acct_.max_steps_per_update =
            std::max(acct_.max_steps_per_update, spent);
    }

    /// Completes any pending flush, flushes the active buffer, then runs the
    /// query closure against the fully up-to-date state. Both buffers are
    /// empty afterwards.
    template <class F>
    auto buffered_query(F&& q) {
        std::uint64_t spent = 0;
        if (job_) {
            spent += job_->finish();
            retire_job();
        }
        if (!buf_[active_].empty()) {
            active_ = 1 - active_;
            job_.emplace(state_, buf_[1 - active_], plan_);
            spent += job_->finish();
            retire_job();
        }
        acct_.flush_total_steps += spent;
        acct_.extra_query_steps += spent;
        return q(std::as_const(state_));
    }

    StepReport step_accounting() const { return acct_; }

  private:
    void retire_job() {
        buf_[1 - active_].clear();
        job_.reset();
        ++acct_.flushes;
    }

    /// One dry-run flush of a synthetic full buffer fixes the chunk costs
    /// (they are data-independent once the seeds are fixed), and the quantum
    /// is sized so a flush always completes within B/2 updates.
    void calibrate() {
        const SketchConfig& cfg = state_.config();
        SketchState scratch(cfg);
        CounterRng rng(cfg.master_seed, /*stream=*/2);
        std::vector<UpdateRecord> synth(cfg.B);
        for (auto& u : synth) u = {rng.next(), 1};
        FlushJob dry(scratch, synth, plan_);
        std::uint64_t total = dry.finish();
        std::uint64_t max_chunk = dry.max_chunk_cost();
        step_budget_ = (2 * total + cfg.B - 1) / cfg.B;
        acct_.quantum = step_budget_ + max_chunk;
    }

    SketchState state_;
    FlushPlan plan_;
    std::vector<UpdateRecord> buf_[2];
    int active_ = 0;
    std::optional<FlushJob> job_;
    std::uint64_t step_budget_ = 0;
    StepReport acct_;
};

}  // namespace linsketch
