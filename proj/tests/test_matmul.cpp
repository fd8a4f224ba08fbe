#include <doctest.h>

#include <cstdint>

#include "linsketch/matmul.hpp"
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

// Independent oracle: triple-loop product over F_2.
BitMatrix oracle_matmul(const BitMatrix& a, const BitMatrix& b) {
    BitMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            bool v = false;
            for (std::size_t t = 0; t < a.cols(); ++t)
                v ^= a.get(i, t) && b.get(t, j);
            c.set(i, j, v);
        }
    return c;
}

}  // namespace

TEST_CASE("base kernels agree with the oracle on all small shapes") {
    PackedBaseKernel packed;
    WordMmBaseKernel wordmm;
    CounterRng rng(0xa1);
    for (std::size_t m = 1; m <= 8; ++m)
        for (std::size_t r = 1; r <= 8; ++r)
            for (std::size_t n = 1; n <= 8; ++n) {
                BitMatrix a = random_matrix(m, r, rng);
                BitMatrix b = random_matrix(r, n, rng);
                BitMatrix want = oracle_matmul(a, b);
                CHECK(packed.multiply(a, b, nullptr) == want);
                CHECK(wordmm.multiply(a, b, nullptr) == want);
            }
}

TEST_CASE("wordmm base kernel charges one multiplication per block") {
    WordMmBaseKernel k;
    CounterRng rng(0xa2);
    BitMatrix a = random_matrix(8, 8, rng);
    BitMatrix b = random_matrix(8, 8, rng);
    OpCounter oc;
    k.multiply(a, b, &oc);
    CHECK(oc.mults == 1);
    CHECK(oc.xors == 0);
}

TEST_CASE("matmul_recursive identity and base-size shortcut") {
    WordMmBaseKernel k;
    CounterRng rng(0xa3);
    BitMatrix m = random_matrix(8, 8, rng);
    CHECK(matmul_recursive(BitMatrix::identity(8), m, k) == m);

    // shapes within the base size go straight to the kernel: one mult total
    BitMatrix a = random_matrix(5, 7, rng);
    BitMatrix b = random_matrix(7, 3, rng);
    OpCounter oc;
    CHECK(matmul_recursive(a, b, k, &oc) == oracle_matmul(a, b));
    CHECK(oc.mults == 1);
}

TEST_CASE("matmul_recursive square sizes, both kernels") {
    PackedBaseKernel packed;
    WordMmBaseKernel wordmm;
    CounterRng rng(0xa4);
    for (std::size_t n : {9ul, 16ul, 20ul, 32ul, 64ul, 100ul}) {
        BitMatrix a = random_matrix(n, n, rng);
        BitMatrix b = random_matrix(n, n, rng);
        BitMatrix want = oracle_matmul(a, b);
        CHECK(matmul_recursive(a, b, wordmm) == want);
        CHECK(matmul_recursive(a, b, packed) == want);
    }
}

TEST_CASE("matmul_recursive uses the rank-7 recursion") {
    // 16x16 over an 8x8 base: one split level costs 7 base multiplies.
    WordMmBaseKernel k;
    CounterRng rng(0xa5);
    BitMatrix a = random_matrix(16, 16, rng);
    BitMatrix b = random_matrix(16, 16, rng);
    OpCounter oc;
    matmul_recursive(a, b, k, &oc);
    CHECK(oc.mults == 7);
    // two levels: 49
    BitMatrix a2 = random_matrix(32, 32, rng);
    BitMatrix b2 = random_matrix(32, 32, rng);
    OpCounter oc2;
    matmul_recursive(a2, b2, k, &oc2);
    CHECK(oc2.mults == 49);
}

TEST_CASE("matmul_recursive rejects dimension mismatch") {
    WordMmBaseKernel k;
    BitMatrix a(4, 5), b(6, 4);
    CHECK_THROWS_AS(matmul_recursive(a, b, k), std::invalid_argument);
}

TEST_CASE("matmul_rect random shapes, both kernels") {
    PackedBaseKernel packed;
    WordMmBaseKernel wordmm;
    CounterRng rng(0xa6);
    for (int t = 0; t < 40; ++t) {
        std::size_t m = 1 + rng.next_below(70);
        std::size_t r = 1 + rng.next_below(70);
        std::size_t n = 1 + rng.next_below(70);
        BitMatrix a = random_matrix(m, r, rng);
        BitMatrix b = random_matrix(r, n, rng);
        BitMatrix want = oracle_matmul(a, b);
        CHECK(matmul_rect(a, b, wordmm) == want);
        if (t % 4 == 0) CHECK(matmul_rect(a, b, packed) == want);
    }
}

TEST_CASE("matmul_rect tall and wide extremes") {
    WordMmBaseKernel k;
    CounterRng rng(0xa7);
    // tall-thin times thin-wide (the hash-eval shape: m x cW times cW x B)
    BitMatrix a = random_matrix(192, 16, rng);
    BitMatrix b = random_matrix(16, 128, rng);
    CHECK(matmul_rect(a, b, k) == oracle_matmul(a, b));

    BitMatrix c = random_matrix(1, 256, rng);
    BitMatrix d = random_matrix(256, 1, rng);
    CHECK(matmul_rect(c, d, k) == oracle_matmul(c, d));
}

TEST_CASE("matmul_rect agrees with schoolbook") {
    WordMmBaseKernel k;
    CounterRng rng(0xa8);
    BitMatrix a = random_matrix(33, 47, rng);
    BitMatrix b = random_matrix(47, 29, rng);
    CHECK(matmul_rect(a, b, k) == matmul_schoolbook(a, b));
}
