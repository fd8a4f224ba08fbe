#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "linsketch/bit_matrix.hpp"
#include "linsketch/ops.hpp"
#include "linsketch/packed_kernel.hpp"

namespace linsketch {

/// How the integer tile products inside matvec_wide are computed.
enum class MatvecBackend {
    kPacked,  // packed-word integer kernel (wide-integer multiply per tile)
    kWordMm,  // plugged matrix-multiply word instruction, one op per tile
};

namespace detail {

/// 8x8x8 integer product of 0/1 tiles. In the RAM^MM cost model the block
/// product is one word instruction; the slot-wise accumulate is still
/// charged per word.
inline void wordmm_int_tile(const BitMatrix& a, std::size_t i0, std::size_t j0,
                            const BitMatrix& bt, std::size_t k0,
                            std::uint64_t* acc, std::size_t acc_cols,
                            std::size_t ni, std::size_t nj, std::size_t nk,
                            OpCounter* oc) {
    // bt is B transposed, so both operands are read row-wise. Tiles are
    // 8-aligned, so a byte slice never crosses a word boundary.
    for (std::size_t i = 0; i < ni; ++i) {
        std::uint64_t arow = (a.row(i0 + i)[j0 / 64] >> (j0 % 64)) & 0xff;
        for (std::size_t k = 0; k < nk; ++k) {
            std::uint64_t brow = (bt.row(k0 + k)[j0 / 64] >> (j0 % 64)) & 0xff;
            acc[i * acc_cols + k] +=
                std::uint64_t(std::popcount(arow & brow));
        }
    }
    (void)nj;
    detail::count(oc, 1, ni * nk, ni * nk + ni + nk);
}

}  // namespace detail

/// A * v over Z mod 2^W for a 0/1 matrix A (m x B) and a vector of W-bit
/// integers: v is expanded into the bit matrix Vb with Vb[j][t] = bit t of
/// v[j], C = A * Vb is computed over Z by integer tile products, and row i of
/// the output is recombined as sum_t 2^t C[i][t] with wrapping arithmetic.
inline IntVector matvec_wide(const BitMatrix& a, const IntVector& v,
                             MatvecBackend backend = MatvecBackend::kWordMm,
                             OpCounter* oc = nullptr) {
    if (a.cols() != v.size())
        throw std::invalid_argument("matvec_wide: dimension mismatch");
    const std::size_t m = a.rows(), b = a.cols();
    const unsigned W = v.width();

    BitMatrix vb(b, W);
    for (std::size_t j = 0; j < b; ++j) {
        std::uint64_t e = v.get(j);
        vb.row(j)[0] = W == 64 ? e : (e & v.mask());
    }
    detail::count(oc, 0, b, 2 * b);

    // C entries are column sums of at most b ones.
    std::vector<std::uint64_t> c(m * W, 0);
    constexpr std::size_t kTile = 8;
    if (backend == MatvecBackend::kWordMm) {
        BitMatrix vbt = vb.transposed();
        detail::count(oc, 0, vb.stride() * b, 2 * vb.stride() * b);
        for (std::size_t i0 = 0; i0 < m; i0 += kTile)
            for (std::size_t j0 = 0; j0 < b; j0 += kTile)
                for (std::size_t k0 = 0; k0 < W; k0 += kTile)
                    detail::wordmm_int_tile(
                        a, i0, j0, vbt, k0, c.data() + i0 * W + k0, W,
                        std::min(kTile, m - i0), std::min(kTile, b - j0),
                        std::min(kTile, std::size_t(W) - k0), oc);
    } else {
        // Tile with the packed-word kernel; per-tile sums are at most kTile,
        // accumulated across inner tiles in plain words.
        auto spec = PackedKernelSpec::make(kTile, kTile, kTile);
        for (std::size_t i0 = 0; i0 < m; i0 += kTile) {
            std::size_t ni = std::min(kTile, m - i0);
            for (std::size_t j0 = 0; j0 < b; j0 += kTile) {
                std::size_t nj = std::min(kTile, b - j0);
                BitMatrix at(kTile, kTile);
                at.insert(a.submatrix(i0, j0, ni, nj), 0, 0);
                for (std::size_t k0 = 0; k0 < W; k0 += kTile) {
                    std::size_t nk = std::min(kTile, std::size_t(W) - k0);
                    BitMatrix bt(kTile, kTile);
                    bt.insert(vb.submatrix(j0, k0, nj, nk), 0, 0);
                    U64Matrix z = packed_inner_block(at, bt, spec, oc);
                    for (std::size_t i = 0; i < ni; ++i)
                        for (std::size_t k = 0; k < nk; ++k)
                            c[(i0 + i) * W + k0 + k] += z.at(i, k);
                    detail::count(oc, 0, ni * nk, 2 * ni * nk);
                }
            }
        }
    }

    IntVector out(m, W);
    for (std::size_t i = 0; i < m; ++i) {
        std::uint64_t s = 0;
        for (unsigned t = 0; t < W; ++t)
            s += c[i * W + t] << t;  // wraps mod 2^64, masked below
        out.set(i, s);
        detail::count(oc, 0, 2 * W, W + 1);
    }
    return out;
}

}  // namespace linsketch
