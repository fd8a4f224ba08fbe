#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>

#include "linsketch/bit_matrix.hpp"
#include "linsketch/ops.hpp"
#include "linsketch/packed_kernel.hpp"

namespace linsketch {

/// Base-case multiplier for the recursion. Implementations must return the
/// schoolbook F_2 product on any shape with all dims <= max_dim().
class BaseKernel {
  public:
    virtual ~BaseKernel() = default;
    virtual std::size_t max_dim() const = 0;
    virtual BitMatrix multiply(const BitMatrix& a, const BitMatrix& b,
                               OpCounter* oc) const = 0;
};

/// Base case backed by the packed-word integer kernel, reduced mod 2.
class PackedBaseKernel final : public BaseKernel {
  public:
    explicit PackedBaseKernel(std::size_t dim = 8) : dim_(dim) {}

    std::size_t max_dim() const override { return dim_; }

    BitMatrix multiply(const BitMatrix& a, const BitMatrix& b,
                       OpCounter* oc) const override {
        // Pad the block up to the fixed kernel shape; zero rows/cols do not
        // change the product.
        BitMatrix v(dim_, dim_), w(dim_, dim_);
        v.insert(a, 0, 0);
        w.insert(b, 0, 0);
        auto spec = PackedKernelSpec::make(dim_, dim_, dim_);
        U64Matrix z = packed_inner_block(v, w, spec, oc);
        BitMatrix c(a.rows(), b.cols());
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j)
                if (z.at(i, j) & 1) c.set(i, j, true);
        detail::count(oc, 0, c.rows() * c.cols(), c.rows() * c.cols() / 32 + 1);
        return c;
    }

  private:
    std::size_t dim_;
};

/// Base case in the style of the plugged matrix-multiply word instruction:
/// an 8x8 bit block fits one machine word, and the whole block product is
/// charged as a single word multiplication.
class WordMmBaseKernel final : public BaseKernel {
  public:
    std::size_t max_dim() const override { return 8; }

    BitMatrix multiply(const BitMatrix& a, const BitMatrix& b,
                       OpCounter* oc) const override {
        std::uint64_t aw = pack8(a), bw = pack8(b);
        std::uint64_t cw = 0;
        for (unsigned k = 0; k < 8; ++k) {
            std::uint64_t col = (aw >> k) & 0x0101010101010101ULL;
            std::uint64_t colmask = col * 0xffULL;
            std::uint64_t rowb = ((bw >> (8 * k)) & 0xff) * 0x0101010101010101ULL;
            cw ^= colmask & rowb;
        }
        detail::count(oc, 1, 0, 3);  // one instruction in the RAM^MM model
        BitMatrix c(a.rows(), b.cols());
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j)
                if ((cw >> (8 * i + j)) & 1) c.set(i, j, true);
        return c;
    }

  private:
    static std::uint64_t pack8(const BitMatrix& m) {
        std::uint64_t w = 0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            w |= (m.row(i)[0] & 0xff) << (8 * i);
        return w;
    }
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline BitMatrix strassen(const BitMatrix& a, const BitMatrix& b,
                          const BaseKernel& base, OpCounter* oc) {
    std::size_t n = a.rows();
    if (n <= base.max_dim()) return base.multiply(a, b, oc);

    std::size_t h = n / 2;
    BitMatrix a11 = a.submatrix(0, 0, h, h), a12 = a.submatrix(0, h, h, h);
    BitMatrix a21 = a.submatrix(h, 0, h, h), a22 = a.submatrix(h, h, h, h);
    BitMatrix b11 = b.submatrix(0, 0, h, h), b12 = b.submatrix(0, h, h, h);
    BitMatrix b21 = b.submatrix(h, 0, h, h), b22 = b.submatrix(h, h, h, h);

    auto x = [&](BitMatrix l, const BitMatrix& r) {
        l.xor_with(r, oc);
        return l;
    };

    // Rank-7 <2,2,2> decomposition; over F_2 addition and subtraction are
    // both XOR.
    BitMatrix m1 = strassen(x(a11, a22), x(b11, b22), base, oc);
    BitMatrix m2 = strassen(x(a21, a22), b11, base, oc);
    BitMatrix m3 = strassen(a11, x(b12, b22), base, oc);
    BitMatrix m4 = strassen(a22, x(b21, b11), base, oc);
    BitMatrix m5 = strassen(x(a11, a12), b22, base, oc);
    BitMatrix m6 = strassen(x(a21, a11), x(b11, b12), base, oc);
    BitMatrix m7 = strassen(x(a12, a22), x(b21, b22), base, oc);

    BitMatrix c(n, n);
    BitMatrix c11 = x(x(x(m1, m4), m5), m7);
    BitMatrix c12 = x(m3, m5);
    BitMatrix c21 = x(m2, m4);
    BitMatrix c22 = x(x(x(m1, m2), m3), m6);
    c.insert(c11, 0, 0);
    c.insert(c12, 0, h);
    c.insert(c21, h, 0);
    c.insert(c22, h, h);
    return c;
}

}  // namespace detail

/// F_2 product via the recursive rank-7 scheme: dims are zero-padded to a
/// common power of two, split into 2x2 blocks down to the base kernel, and
/// the padding is stripped from the output.
inline BitMatrix matmul_recursive(const BitMatrix& a, const BitMatrix& b,
                                  const BaseKernel& base,
                                  OpCounter* oc = nullptr) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul_recursive: dimension mismatch");
    std::size_t d = base.max_dim();
    if (a.rows() <= d && a.cols() <= d && b.cols() <= d)
        return base.multiply(a, b, oc);
    std::size_t n = detail::next_pow2(std::max({a.rows(), a.cols(), b.cols(),
                                                d}));
    BitMatrix pa(n, n), pb(n, n);
    pa.insert(a, 0, 0);
    pb.insert(b, 0, 0);
    BitMatrix pc = detail::strassen(pa, pb, base, oc);
    return pc.submatrix(0, 0, a.rows(), b.cols());
}

/// Rectangular dispatch: tile the m x r and r x n operands into r x r square
/// blocks (the inner dimension is never split) and XOR-accumulate one
/// recursive multiply per tile pair.
inline BitMatrix matmul_rect(const BitMatrix& a, const BitMatrix& b,
                             const BaseKernel& base, OpCounter* oc = nullptr) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul_rect: dimension mismatch");
    std::size_t r = a.cols();
    if (r == 0) return BitMatrix(a.rows(), b.cols());
    std::size_t t = std::max(r, base.max_dim());
    BitMatrix c(a.rows(), b.cols());
    for (std::size_t i0 = 0; i0 < a.rows(); i0 += t) {
        std::size_t ni = std::min(t, a.rows() - i0);
        BitMatrix at = a.submatrix(i0, 0, ni, r);
        for (std::size_t j0 = 0; j0 < b.cols(); j0 += t) {
            std::size_t nj = std::min(t, b.cols() - j0);
            BitMatrix bt = b.submatrix(0, j0, r, nj);
            BitMatrix ct = matmul_recursive(at, bt, base, oc);
            for (std::size_t i = 0; i < ni; ++i)
                for (std::size_t j = 0; j < nj; ++j)
                    if (ct.get(i, j)) c.set(i0 + i, j0 + j, true);
        }
    }
    return c;
}

}  // namespace linsketch
