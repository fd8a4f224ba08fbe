#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "linsketch/bit_matrix.hpp"
#include "linsketch/ops.hpp"

namespace linsketch {

/// Row-major matrix of nonnegative word-sized integers, used for products
/// over Z before any reduction.
struct U64Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint64_t> v;

    U64Matrix() = default;
    U64Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0) {}

    std::uint64_t& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    std::uint64_t at(std::size_t i, std::size_t j) const {
        return v[i * cols + j];
    }
    bool operator==(const U64Matrix& o) const {
        return rows == o.rows && cols == o.cols && v == o.v;
    }
};

/// Base-case dimensions and per-slot bit width for the packed-word kernel.
/// g must leave room for any slot sum: g >= ceil(log2(2 * d_b * maxentry)).
struct PackedKernelSpec {
    std::size_t d_a = 8, d_b = 8, d_c = 8;
    unsigned g = 4;
    std::size_t slot_budget = 4096;

    void validate(unsigned maxentry = 1) const {
        unsigned need = 1;
        while ((std::uint64_t(1) << need) < 2 * d_b * std::uint64_t(maxentry))
            ++need;
        if (g < need)
            throw std::invalid_argument("PackedKernelSpec: g too small");
        if (d_a * d_b * d_c * g > slot_budget)
            throw std::invalid_argument("PackedKernelSpec: slot budget exceeded");
    }

    static PackedKernelSpec make(std::size_t da, std::size_t db, std::size_t dc,
                                 unsigned maxentry = 1,
                                 std::size_t budget = 4096) {
        unsigned g = 1;
        while ((std::uint64_t(1) << g) < 2 * db * std::uint64_t(maxentry)) ++g;
        PackedKernelSpec s{da, db, dc, g, budget};
        s.validate(maxentry);
        return s;
    }
};

namespace detail {

/// Arbitrary-length unsigned integer over 64-bit words, just big enough for
/// the packed-word kernel: set slots, schoolbook multiply, extract slots.
class BigUint {
  public:
    explicit BigUint(std::size_t bits) : w_((bits + 63) / 64, 0) {}

    void add_at_bit(std::size_t pos, std::uint64_t val) {
        // val is slot-sized and slots never collide during packing, so
        // plain OR of the shifted value suffices.
        w_[pos / 64] |= val << (pos % 64);
        unsigned r = pos % 64;
        if (r && (val >> (64 - r))) w_[pos / 64 + 1] |= val >> (64 - r);
    }

    std::uint64_t extract(std::size_t pos, unsigned bits) const {
        std::uint64_t lo = word_at(pos / 64) >> (pos % 64);
        unsigned r = pos % 64;
        if (r) lo |= word_at(pos / 64 + 1) << (64 - r);
        return bits == 64 ? lo : lo & ((std::uint64_t(1) << bits) - 1);
    }

    std::size_t words() const { return w_.size(); }

    static BigUint mul(const BigUint& a, const BigUint& b, OpCounter* oc) {
        if (a.w_.size() == 1 && b.w_.size() == 1) {
            // fast path: one widening machine multiply
            BigUint r(128);
            unsigned __int128 p =
                (unsigned __int128)a.w_[0] * (unsigned __int128)b.w_[0];
            r.w_[0] = std::uint64_t(p);
            r.w_[1] = std::uint64_t(p >> 64);
            count(oc, 1, 0, 4);
            return r;
        }
        BigUint r((a.w_.size() + b.w_.size()) * 64);
        for (std::size_t i = 0; i < a.w_.size(); ++i) {
            if (a.w_[i] == 0) continue;
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.w_.size(); ++j) {
                unsigned __int128 p =
                    (unsigned __int128)a.w_[i] * b.w_[j] + r.w_[i + j] + carry;
                r.w_[i + j] = std::uint64_t(p);
                carry = std::uint64_t(p >> 64);
            }
            r.w_[i + b.w_.size()] += carry;
            count(oc, b.w_.size(), 2 * b.w_.size(), 3 * b.w_.size());
        }
        return r;
    }

  private:
    std::uint64_t word_at(std::size_t i) const {
        return i < w_.size() ? w_[i] : 0;
    }
    std::vector<std::uint64_t> w_;
};

}  // namespace detail

/// Integer (over Z) product of a d_a x d_b and a d_b x d_c 0/1 matrix via the
/// packed-word route: pack the rows of V and the columns of Wm into two wide
/// integers with g-bit slots, multiply once, and read slot P(d_b - 1) of each
/// cross-correlation block, which is the plain inner product.
inline U64Matrix packed_inner_block(const BitMatrix& v, const BitMatrix& wm,
                                    const PackedKernelSpec& spec,
                                    OpCounter* oc = nullptr) {
    if (v.rows() != spec.d_a || v.cols() != spec.d_b ||
        wm.rows() != spec.d_b || wm.cols() != spec.d_c)
        throw std::invalid_argument("packed_inner_block: dims do not match spec");
    spec.validate();

    const std::size_t da = spec.d_a, db = spec.d_b, dc = spec.d_c;
    const unsigned g = spec.g;
    const std::size_t block = 2 * g * db;   // bits per s(v_i) block incl. gap
    const std::size_t m1 = block * da;      // length of s(v_1..v_da)
    const std::size_t m2 = dc * (m1 + g * db);

    // s(v_1,...,v_da): s(v_i) occupies bits [block*(da-i-1), ...), with
    // entry j of v_i at slot j inside it.
    detail::BigUint lhs(m1);
    for (std::size_t i = 0; i < da; ++i) {
        std::size_t base = block * (da - 1 - i);
        for (std::size_t j = 0; j < db; ++j)
            if (v.get(i, j)) lhs.add_at_bit(base + g * j, 1);
        detail::count(oc, 0, 3 * db, db / 8 + 1);
    }
    // s^r(w_1,...,w_dc): s^r(w_j) reverses the entry order.
    detail::BigUint rhs(m2);
    for (std::size_t j = 0; j < dc; ++j) {
        std::size_t base = (m1 + g * db) * (dc - 1 - j);
        for (std::size_t t = 0; t < db; ++t)
            if (wm.get(t, j)) rhs.add_at_bit(base + g * (db - 1 - t), 1);
        detail::count(oc, 0, 3 * db, db / 8 + 1);
    }

    detail::BigUint prod = detail::BigUint::mul(lhs, rhs, oc);

    U64Matrix out(da, dc);
    for (std::size_t i = 0; i < da; ++i) {
        for (std::size_t j = 0; j < dc; ++j) {
            std::size_t pos = block * (da - 1 - i) +
                              (m1 + g * db) * (dc - 1 - j) + g * (db - 1);
            out.at(i, j) = prod.extract(pos, g);
            detail::count(oc, 0, 3, 2);
        }
    }
    return out;
}

}  // namespace linsketch
