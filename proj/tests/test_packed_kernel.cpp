#include <doctest.h>

#include <cstdint>

#include "linsketch/packed_kernel.hpp"
#include "linsketch/rng.hpp"

using namespace linsketch;

namespace {

BitMatrix random_matrix(std::size_t r, std::size_t c, CounterRng& rng) {
    BitMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (rng.next() & 1) m.set(i, j, true);
    return m;
}

// Independent oracle: plain integer matrix product of 0/1 matrices.
U64Matrix oracle_int_matmul(const BitMatrix& a, const BitMatrix& b) {
    U64Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::uint64_t s = 0;
            for (std::size_t t = 0; t < a.cols(); ++t)
                s += std::uint64_t(a.get(i, t) && b.get(t, j));
            c.at(i, j) = s;
        }
    return c;
}

}  // namespace

TEST_CASE("PackedKernelSpec validation") {
    // g must cover 2 * d_b * maxentry
    auto s = PackedKernelSpec::make(1, 3, 1);
    CHECK(s.g == 3);  // 2*3 = 6 <= 8
    auto s8 = PackedKernelSpec::make(8, 8, 8);
    CHECK(s8.g == 4);  // 2*8 = 16
    CHECK_THROWS_AS((PackedKernelSpec{1, 3, 1, 2}.validate()),
                    std::invalid_argument);
    // budget: d_a*d_b*d_c*g over the slot budget
    CHECK_THROWS_AS(PackedKernelSpec::make(16, 16, 16, 1, 4096),
                    std::invalid_argument);
}

TEST_CASE("packed kernel worked example") {
    // d_a = d_c = 1, d_b = 3, g = 4: v = (1,0,1) packs to 0x101 = 257,
    // w = (1,1,1) reverse-packs to 0x111 = 273, the single wide multiply
    // gives 257 * 273 = 70161 = 0x11211, and the middle slot (bits 8..11)
    // holds the inner product 2.
    BitMatrix v(1, 3), w(3, 1);
    v.set(0, 0, true);
    v.set(0, 2, true);
    w.set(0, 0, true);
    w.set(1, 0, true);
    w.set(2, 0, true);
    PackedKernelSpec spec{1, 3, 1, 4};
    U64Matrix out = packed_inner_block(v, w, spec);
    CHECK(out.at(0, 0) == 2);
}

TEST_CASE("packed kernel single-row random, d_b up to 32") {
    CounterRng rng(0x91);
    for (int t = 0; t < 10000; ++t) {
        std::size_t db = 1 + rng.next_below(32);
        BitMatrix v = random_matrix(1, db, rng);
        BitMatrix w = random_matrix(db, 1, rng);
        auto spec = PackedKernelSpec::make(1, db, 1);
        U64Matrix out = packed_inner_block(v, w, spec);
        CHECK(out.at(0, 0) == oracle_int_matmul(v, w).at(0, 0));
    }
}

TEST_CASE("packed kernel zero operand") {
    auto spec = PackedKernelSpec::make(4, 4, 4);
    BitMatrix z(4, 4);
    CounterRng rng(0x92);
    BitMatrix w = random_matrix(4, 4, rng);
    U64Matrix out = packed_inner_block(z, w, spec);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(out.at(i, j) == 0);
}

TEST_CASE("packed kernel all-ones saturates slots safely") {
    auto spec = PackedKernelSpec::make(8, 8, 8);
    BitMatrix v(8, 8), w(8, 8);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            v.set(i, j, true);
            w.set(i, j, true);
        }
    U64Matrix out = packed_inner_block(v, w, spec);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) CHECK(out.at(i, j) == 8);
}

TEST_CASE("packed kernel 8x8x8 matches integer schoolbook") {
    auto spec = PackedKernelSpec::make(8, 8, 8);
    CounterRng rng(0x93);
    for (int t = 0; t < 500; ++t) {
        BitMatrix v = random_matrix(8, 8, rng);
        BitMatrix w = random_matrix(8, 8, rng);
        OpCounter oc;
        U64Matrix out = packed_inner_block(v, w, spec, &oc);
        CHECK(out == oracle_int_matmul(v, w));
        CHECK(oc.total() > 0);
    }
}

TEST_CASE("packed kernel rectangular shapes") {
    CounterRng rng(0x94);
    for (int t = 0; t < 200; ++t) {
        std::size_t da = 1 + rng.next_below(6);
        std::size_t db = 1 + rng.next_below(12);
        std::size_t dc = 1 + rng.next_below(6);
        auto spec = PackedKernelSpec::make(da, db, dc);
        BitMatrix v = random_matrix(da, db, rng);
        BitMatrix w = random_matrix(db, dc, rng);
        CHECK(packed_inner_block(v, w, spec) == oracle_int_matmul(v, w));
    }
}

TEST_CASE("packed kernel rejects mismatched dims") {
    auto spec = PackedKernelSpec::make(2, 2, 2);
    BitMatrix v(2, 3), w(3, 2);
    CHECK_THROWS_AS(packed_inner_block(v, w, spec), std::invalid_argument);
}

TEST_CASE("packed kernel cost counting") {
    // The single-word-pair case must be charged exactly one multiplication.
    BitMatrix v(1, 3), w(3, 1);
    v.set(0, 0, true);
    w.set(0, 0, true);
    PackedKernelSpec spec{1, 3, 1, 4};
    OpCounter oc;
    packed_inner_block(v, w, spec, &oc);
    CHECK(oc.mults == 1);
}
