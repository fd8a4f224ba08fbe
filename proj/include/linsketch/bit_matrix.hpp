#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linsketch/ops.hpp"

namespace linsketch {

/// Row-major bit-packed matrix over F_2. Row stride is ceil(cols/64) words;
/// trailing pad bits in each row are kept zero.
class BitMatrix {
  public:
    BitMatrix() : rows_(0), cols_(0), stride_(0) {}

    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + 63) / 64),
          bits_(rows * stride_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }

    bool get(std::size_t i, std::size_t j) const {
        return (bits_[i * stride_ + j / 64] >> (j % 64)) & 1;
    }

    void set(std::size_t i, std::size_t j, bool v) {
        std::uint64_t& w = bits_[i * stride_ + j / 64];
        std::uint64_t m = std::uint64_t(1) << (j % 64);
        w = v ? (w | m) : (w & ~m);
    }

    std::span<std::uint64_t> row(std::size_t i) {
        return {bits_.data() + i * stride_, stride_};
    }
    std::span<const std::uint64_t> row(std::size_t i) const {
        return {bits_.data() + i * stride_, stride_};
    }

    std::span<const std::uint64_t> words() const { return bits_; }
    std::span<std::uint64_t> words() { return bits_; }

    /// Mask covering the valid bits of the last word of a row.
    std::uint64_t tail_mask() const {
        unsigned r = cols_ % 64;
        return r == 0 ? ~std::uint64_t(0) : (std::uint64_t(1) << r) - 1;
    }

    void clear_padding() {
        if (cols_ % 64 == 0 || stride_ == 0) return;
        std::uint64_t m = tail_mask();
        for (std::size_t i = 0; i < rows_; ++i)
            bits_[i * stride_ + stride_ - 1] &= m;
    }

    bool operator==(const BitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && bits_ == o.bits_;
    }

    BitMatrix submatrix(std::size_t r0, std::size_t c0, std::size_t nr,
                        std::size_t nc) const {
        BitMatrix s(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j)
                if (get(r0 + i, c0 + j)) s.set(i, j, true);
        return s;
    }

    void insert(const BitMatrix& s, std::size_t r0, std::size_t c0) {
        for (std::size_t i = 0; i < s.rows(); ++i)
            for (std::size_t j = 0; j < s.cols(); ++j)
                set(r0 + i, c0 + j, s.get(i, j));
    }

    void xor_with(const BitMatrix& o, OpCounter* oc = nullptr) {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("BitMatrix::xor_with: shape mismatch");
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] ^= o.bits_[i];
        detail::count(oc, 0, bits_.size(), 2 * bits_.size());
    }

    static BitMatrix from_words(std::size_t rows, std::size_t cols,
                                std::vector<std::uint64_t> words) {
        BitMatrix m(rows, cols);
        if (words.size() != m.bits_.size())
            throw std::invalid_argument("BitMatrix::from_words: bad length");
        m.bits_ = std::move(words);
        m.clear_padding();
        return m;
    }

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            auto r = row(i);
            for (std::size_t w = 0; w < stride_; ++w) {
                std::uint64_t v = r[w];
                while (v) {
                    unsigned b = std::countr_zero(v);
                    v &= v - 1;
                    t.set(w * 64 + b, i, true);
                }
            }
        }
        return t;
    }

    /// Fixture format: one row per line of '0'/'1' characters.
    std::string to_text() const {
        std::string s;
        s.reserve(rows_ * (cols_ + 1));
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j)
                s.push_back(get(i, j) ? '1' : '0');
            s.push_back('\n');
        }
        return s;
    }

    static BitMatrix from_text(const std::string& text) {
        std::vector<std::string> lines;
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line))
            if (!line.empty()) lines.push_back(line);
        if (lines.empty()) return BitMatrix();
        BitMatrix m(lines.size(), lines[0].size());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (lines[i].size() != m.cols())
                throw std::invalid_argument("BitMatrix: ragged fixture");
            for (std::size_t j = 0; j < m.cols(); ++j) {
                char c = lines[i][j];
                if (c != '0' && c != '1')
                    throw std::invalid_argument("BitMatrix: bad fixture char");
                if (c == '1') m.set(i, j, true);
            }
        }
        return m;
    }

  private:
    std::size_t rows_, cols_, stride_;
    std::vector<std::uint64_t> bits_;
};

/// Vector of W-bit two's-complement integers, stored in the low W bits of
/// each word.
class IntVector {
  public:
    IntVector(std::size_t len, unsigned W)
        : w_(W), mask_(W == 64 ? ~std::uint64_t(0)
                               : (std::uint64_t(1) << W) - 1),
          vals_(len, 0) {}

    std::size_t size() const { return vals_.size(); }
    unsigned width() const { return w_; }
    std::uint64_t mask() const { return mask_; }

    std::uint64_t get(std::size_t i) const { return vals_[i]; }
    void set(std::size_t i, std::uint64_t v) { vals_[i] = v & mask_; }

    /// Sign-extended view of entry i.
    std::int64_t get_signed(std::size_t i) const {
        std::uint64_t v = vals_[i];
        if (w_ < 64 && (v >> (w_ - 1)) & 1) v |= ~mask_;
        return std::int64_t(v);
    }

  private:
    unsigned w_;
    std::uint64_t mask_;
    std::vector<std::uint64_t> vals_;
};

/// A fixed permutation of m bit positions, with the word-aligned runs
/// precomputed so that applying it moves whole words where possible.
/// Output bit i equals input bit pi(i).
class BitPermutation {
  public:
    explicit BitPermutation(std::vector<std::size_t> pi) : pi_(std::move(pi)) {
        std::vector<char> seen(pi_.size(), 0);
        for (std::size_t s : pi_) {
            if (s >= pi_.size() || seen[s])
                throw std::invalid_argument("BitPermutation: not a permutation");
            seen[s] = 1;
        }
        // Split into maximal runs with pi(i+1) = pi(i)+1; runs whose ends are
        // 64-aligned on both sides become word copies.
        std::size_t i = 0;
        while (i < pi_.size()) {
            std::size_t len = 1;
            while (i + len < pi_.size() && pi_[i + len] == pi_[i] + len) ++len;
            runs_.push_back({i, pi_[i], len});
            i += len;
        }
    }

    std::size_t size() const { return pi_.size(); }

    /// Applies the permutation to an n-bit string packed in 64-bit words.
    std::vector<std::uint64_t> apply(std::span<const std::uint64_t> in,
                                     OpCounter* oc = nullptr) const {
        std::size_t n = pi_.size();
        if (in.size() < (n + 63) / 64)
            throw std::invalid_argument("BitPermutation: input too short");
        std::vector<std::uint64_t> out((n + 63) / 64, 0);
        for (const Run& r : runs_) {
            if (r.dst % 64 == 0 && r.src % 64 == 0 && r.len % 64 == 0) {
                std::size_t dw = r.dst / 64, sw = r.src / 64, nw = r.len / 64;
                for (std::size_t w = 0; w < nw; ++w) out[dw + w] = in[sw + w];
                detail::count(oc, 0, 0, 2 * nw);
            } else {
                for (std::size_t b = 0; b < r.len; ++b) {
                    std::size_t d = r.dst + b, s = r.src + b;
                    out[d / 64] |= ((in[s / 64] >> (s % 64)) & 1) << (d % 64);
                }
                detail::count(oc, 0, 4 * r.len, 2 * r.len);
            }
        }
        return out;
    }

    BitPermutation inverse() const {
        std::vector<std::size_t> inv(pi_.size());
        for (std::size_t i = 0; i < pi_.size(); ++i) inv[pi_[i]] = i;
        return BitPermutation(std::move(inv));
    }

  private:
    struct Run {
        std::size_t dst, src, len;
    };
    std::vector<std::size_t> pi_;
    std::vector<Run> runs_;
};

/// permute_bits on an explicit bit sequence; |x| must equal |pi|.
inline std::vector<bool> permute_bits(const std::vector<bool>& x,
                                      const BitPermutation& pi) {
    if (x.size() != pi.size())
        throw std::invalid_argument("permute_bits: size mismatch");
    std::vector<std::uint64_t> in((x.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) in[i / 64] |= std::uint64_t(1) << (i % 64);
    auto out = pi.apply(in);
    std::vector<bool> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = (out[i / 64] >> (i % 64)) & 1;
    return y;
}

/// Word-parallel product over F_2: for each set bit A[i][j], XOR row j of B
/// into row i of the result.
inline BitMatrix matmul_schoolbook(const BitMatrix& a, const BitMatrix& b,
                                   OpCounter* oc = nullptr) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul_schoolbook: dimension mismatch");
    BitMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ar = a.row(i);
        auto cr = c.row(i);
        for (std::size_t w = 0; w < a.stride(); ++w) {
            std::uint64_t v = ar[w];
            while (v) {
                unsigned bit = std::countr_zero(v);
                v &= v - 1;
                auto br = b.row(w * 64 + bit);
                for (std::size_t t = 0; t < b.stride(); ++t) cr[t] ^= br[t];
                detail::count(oc, 0, b.stride(), 2 * b.stride() + 1);
            }
        }
    }
    return c;
}

}  // namespace linsketch
