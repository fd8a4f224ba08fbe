#include <doctest.h>

#include <cstdint>
#include <vector>

#include "linsketch/gf2.hpp"
#include "linsketch/rng.hpp"

using namespace linsketch;

namespace {

// Independent oracle: carry-less multiply by coefficient convolution over an
// explicit bit vector, no shifting of packed words involved.
std::vector<bool> to_bits(const Gf2Poly& p, std::size_t n) {
    std::vector<bool> v(n, false);
    for (std::size_t i = 0; i < n; ++i) v[i] = p.bit(int(i));
    return v;
}

Gf2Poly from_bits(const std::vector<bool>& v) {
    Gf2Poly p;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) p.set_bit(int(i));
    return p;
}

Gf2Poly oracle_clmul(const Gf2Poly& a, const Gf2Poly& b) {
    auto av = to_bits(a, 128), bv = to_bits(b, 128);
    std::vector<bool> cv(256, false);
    for (std::size_t i = 0; i < 128; ++i)
        for (std::size_t j = 0; j < 128; ++j)
            if (av[i] && bv[j]) cv[i + j] = !cv[i + j];
    return from_bits(cv);
}

// Independent oracle: polynomial remainder by textbook long division over an
// explicit bit vector.
Gf2Poly oracle_mod(const Gf2Poly& a, const Gf2Poly& m) {
    auto rv = to_bits(a, 256);
    int dm = m.degree();
    for (int i = 255; i >= dm; --i) {
        if (!rv[i]) continue;
        for (int j = 0; j <= dm; ++j)
            if (m.bit(j)) rv[i - dm + j] = !rv[i - dm + j];
    }
    return from_bits(rv);
}

std::uint64_t table_mul8(std::uint64_t a, std::uint64_t b) {
    Gf2Poly p = oracle_clmul(Gf2Poly(a), Gf2Poly(b));
    return oracle_mod(p, Gf2Poly(0x11b)).low_word();
}

}  // namespace

TEST_CASE("Gf2Poly basics") {
    Gf2Poly z;
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);

    Gf2Poly p(0b1011);
    CHECK(p.degree() == 3);
    CHECK(p.bit(0));
    CHECK(p.bit(1));
    CHECK(!p.bit(2));
    CHECK(p.bit(3));

    Gf2Poly high;
    high.set_bit(200);
    CHECK(high.degree() == 200);
    CHECK(high.shifted(55).degree() == 255);
    CHECK((Gf2Poly(1).shifted(64) == Gf2Poly::from_words(0, 1)));
}

TEST_CASE("Gf2Poly hex round-trip") {
    CHECK(Gf2Poly(0x11b).to_hex() == "11b");
    CHECK(Gf2Poly::from_hex("11b") == Gf2Poly(0x11b));
    CHECK(Gf2Poly().to_hex() == "0");
    Gf2Poly big = Gf2Poly::from_words(0x1b, 1);
    CHECK(big.to_hex() == "1000000000000001b");
    CHECK(Gf2Poly::from_hex(big.to_hex()) == big);
    CHECK_THROWS_AS(Gf2Poly::from_hex(""), std::invalid_argument);
    CHECK_THROWS_AS(Gf2Poly::from_hex("xy"), std::invalid_argument);
}

TEST_CASE("clmul small known values") {
    // (z + 1)(z + 1) = z^2 + 1
    CHECK(clmul(Gf2Poly(0b11), Gf2Poly(0b11)) == Gf2Poly(0b101));
    CHECK(clmul(Gf2Poly(1), Gf2Poly(0b1011)) == Gf2Poly(0b1011));
    CHECK(clmul(Gf2Poly(0), Gf2Poly(0b1011)).is_zero());
    // z^3 * z^4 = z^7
    CHECK(clmul(Gf2Poly(1 << 3), Gf2Poly(1 << 4)) == Gf2Poly(1 << 7));
}

TEST_CASE("clmul matches convolution oracle on random inputs") {
    CounterRng rng(0xc1);
    for (int t = 0; t < 500; ++t) {
        Gf2Poly a = Gf2Poly::from_words(rng.next(), rng.next() & 1);
        Gf2Poly b = Gf2Poly::from_words(rng.next(), rng.next() & 1);
        CHECK(clmul(a, b) == oracle_clmul(a, b));
    }
}

TEST_CASE("clmul ring laws") {
    CounterRng rng(0xc2);
    for (int t = 0; t < 200; ++t) {
        Gf2Poly a(rng.next() & 0xffffffff), b(rng.next() & 0xffffffff),
            c(rng.next() & 0xffffffff);
        CHECK(clmul(a, b) == clmul(b, a));
        CHECK(clmul(clmul(a, b), c) == clmul(a, clmul(b, c)));
        CHECK(clmul(a, b ^ c) == (clmul(a, b) ^ clmul(a, c)));
    }
}

TEST_CASE("poly_mod known values and oracle") {
    // z^2 mod (z^2 + z + 1) = z + 1
    CHECK(poly_mod(Gf2Poly(0b100), Gf2Poly(0b111)) == Gf2Poly(0b11));
    // degree below the modulus: unchanged
    CHECK(poly_mod(Gf2Poly(0b11), Gf2Poly(0b111)) == Gf2Poly(0b11));
    CHECK(poly_mod(Gf2Poly(0), Gf2Poly(0b111)).is_zero());
    CHECK_THROWS_AS(poly_mod(Gf2Poly(1), Gf2Poly(0)), std::invalid_argument);

    CounterRng rng(0xc3);
    for (int t = 0; t < 500; ++t) {
        Gf2Poly a = Gf2Poly::from_words(rng.next(), rng.next());
        Gf2Poly m(rng.next() | 1);
        Gf2Poly r = poly_mod(a, m);
        CHECK(r == oracle_mod(a, m));
        CHECK(r.degree() < m.degree());
    }
}

TEST_CASE("poly_gcd") {
    // gcd(z^2 + 1, z + 1) = z + 1 since z^2 + 1 = (z + 1)^2
    CHECK(poly_gcd(Gf2Poly(0b101), Gf2Poly(0b11)) == Gf2Poly(0b11));
    // coprime pair
    CHECK(poly_gcd(Gf2Poly(0b111), Gf2Poly(0b10)).degree() == 0);
    CounterRng rng(0xc4);
    for (int t = 0; t < 100; ++t) {
        Gf2Poly a(rng.next()), b(rng.next() | 1);
        Gf2Poly g = poly_gcd(a, b);
        CHECK(poly_mod(a, g).is_zero());
        CHECK(poly_mod(b, g).is_zero());
    }
}

TEST_CASE("is_irreducible known polynomials") {
    CHECK(is_irreducible(Gf2Poly(0b111)));    // z^2 + z + 1
    CHECK(!is_irreducible(Gf2Poly(0b100)));   // z^2
    CHECK(!is_irreducible(Gf2Poly(0b110)));   // z^2 + z = z(z+1)
    CHECK(is_irreducible(Gf2Poly(0b1011)));   // z^3 + z + 1
    CHECK(is_irreducible(Gf2Poly(0x11b)));
    CHECK(is_irreducible(Gf2Poly(0x11d)));
    CHECK(is_irreducible(Gf2Poly(0x171)));
    CHECK(!is_irreducible(Gf2Poly(0x101)));    // (z + 1)^8
    CHECK(!is_irreducible(Gf2Poly(0x11021)));  // CRC-CCITT, reducible
    CHECK(!is_irreducible(Gf2Poly(1)));        // constant
    CHECK(!is_irreducible(Gf2Poly(0)));
}

TEST_CASE("is_irreducible counts degree-8 irreducibles") {
    // There are exactly 30 monic irreducible polynomials of degree 8 over F_2.
    int count = 0;
    for (std::uint64_t low = 0; low < 256; ++low)
        if (is_irreducible(Gf2Poly(0x100 | low))) ++count;
    CHECK(count == 30);
}

TEST_CASE("shipped field moduli are irreducible") {
    for (unsigned w : {8u, 16u, 32u, 64u}) {
        FieldSpec f = FieldSpec::for_width(w);
        CHECK(f.W() == w);
        CHECK(f.modulus().degree() == int(w));
        CHECK(is_irreducible(f.modulus()));
    }
}

TEST_CASE("FieldSpec serialization") {
    FieldSpec f = FieldSpec::gf2_8();
    CHECK(f.to_string() == "8:11b");
    CHECK(FieldSpec::parse("8:11b") == f);
    FieldSpec g = FieldSpec::gf2_64();
    CHECK(FieldSpec::parse(g.to_string()) == g);
    CHECK_THROWS_AS(FieldSpec::parse("8"), std::invalid_argument);
    CHECK_THROWS_AS(FieldSpec(8, Gf2Poly(0b111)), std::invalid_argument);
    CHECK_THROWS_AS(FieldSpec(7, Gf2Poly(0x83)), std::invalid_argument);
}

TEST_CASE("field_mul matches full GF(2^8) oracle table") {
    FieldSpec f = FieldSpec::gf2_8();
    for (std::uint64_t a = 0; a < 256; ++a) {
        for (std::uint64_t b = 0; b < 256; ++b) {
            GfElem r = field_mul(GfElem(a, f), GfElem(b, f));
            CHECK(r.word() == table_mul8(a, b));
        }
    }
}

TEST_CASE("field_mul mismatched specs throws") {
    FieldSpec f8 = FieldSpec::gf2_8(), f16 = FieldSpec::gf2_16();
    CHECK_THROWS_AS(field_mul(GfElem(3, f8), GfElem(3, f16)),
                    std::invalid_argument);
}

TEST_CASE("field laws at each width") {
    for (unsigned w : {8u, 16u, 32u, 64u}) {
        FieldSpec f = FieldSpec::for_width(w);
        CounterRng rng(0xf0 + w);
        for (int t = 0; t < 50; ++t) {
            GfElem a(rng.next(), f), b(rng.next(), f), c(rng.next(), f);
            CHECK(field_mul(a, b).word() == field_mul(b, a).word());
            CHECK(field_mul(field_mul(a, b), c).word() ==
                  field_mul(a, field_mul(b, c)).word());
            CHECK(field_mul(a, GfElem(1, f)).word() == a.word());
            CHECK(field_mul(a, GfElem(0, f)).word() == 0);
        }
    }
}

TEST_CASE("field_pow and exhaustive GF(2^8) inverses") {
    FieldSpec f = FieldSpec::gf2_8();
    GfElem z(2, f);
    CHECK(field_pow(z, 0).word() == 1);
    CHECK(field_pow(z, 1).word() == 2);
    CHECK(field_pow(z, 2).word() == 4);
    // The multiplicative group has order 255.
    for (std::uint64_t a = 1; a < 256; ++a) {
        GfElem e(a, f);
        CHECK(field_pow(e, 255).word() == 1);
        GfElem inv = field_pow(e, 254);
        CHECK(field_mul(e, inv).word() == 1);
    }
}

TEST_CASE("field_pow matches repeated multiplication") {
    FieldSpec f = FieldSpec::gf2_64();
    CounterRng rng(0xf7);
    for (int t = 0; t < 20; ++t) {
        GfElem a(rng.next(), f);
        GfElem acc(1, f);
        for (unsigned e = 0; e < 10; ++e) {
            CHECK(field_pow(a, e).word() == acc.word());
            acc = field_mul(acc, a);
        }
    }
}
