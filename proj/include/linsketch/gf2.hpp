#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace linsketch {

/// Polynomial over F_2 with degree up to 255, coefficient of z^i stored at
/// bit i. Big enough to hold any product of two degree-<=64 operands plus
/// the degree-64 field moduli.
class Gf2Poly {
  public:
    static constexpr int kWords = 4;

    Gf2Poly() : w_{} {}

    explicit Gf2Poly(std::uint64_t low) : w_{} { w_[0] = low; }

    static Gf2Poly from_words(std::uint64_t w0, std::uint64_t w1,
                              std::uint64_t w2 = 0, std::uint64_t w3 = 0) {
        Gf2Poly p;
        p.w_ = {w0, w1, w2, w3};
        return p;
    }

    bool is_zero() const {
        return (w_[0] | w_[1] | w_[2] | w_[3]) == 0;
    }

    /// Degree of the polynomial, or -1 for the zero polynomial.
    int degree() const {
        for (int i = kWords - 1; i >= 0; --i) {
            if (w_[i]) return i * 64 + 63 - std::countl_zero(w_[i]);
        }
        return -1;
    }

    bool bit(int i) const {
        if (i < 0 || i >= kWords * 64) return false;
        return (w_[i / 64] >> (i % 64)) & 1;
    }

    void set_bit(int i) { w_[i / 64] |= std::uint64_t(1) << (i % 64); }

    Gf2Poly operator^(const Gf2Poly& o) const {
        Gf2Poly r;
        for (int i = 0; i < kWords; ++i) r.w_[i] = w_[i] ^ o.w_[i];
        return r;
    }

    Gf2Poly& operator^=(const Gf2Poly& o) {
        for (int i = 0; i < kWords; ++i) w_[i] ^= o.w_[i];
        return *this;
    }

    bool operator==(const Gf2Poly& o) const { return w_ == o.w_; }

    /// Shift by s bits towards higher degrees. The caller must keep the
    /// result within 256 bits.
    Gf2Poly shifted(int s) const {
        Gf2Poly r;
        int wq = s / 64, wr = s % 64;
        for (int i = kWords - 1; i >= wq; --i) {
            std::uint64_t v = w_[i - wq] << wr;
            if (wr && i - wq - 1 >= 0) v |= w_[i - wq - 1] >> (64 - wr);
            r.w_[i] = v;
        }
        return r;
    }

    std::uint64_t low_word() const { return w_[0]; }

    std::string to_hex() const {
        std::ostringstream os;
        bool started = false;
        for (int i = kWords - 1; i >= 0; --i) {
            if (!started && w_[i] == 0 && i > 0) continue;
            if (started) {
                os.width(16);
                os.fill('0');
            }
            os << std::hex << w_[i];
            started = true;
        }
        return os.str();
    }

    static Gf2Poly from_hex(const std::string& s) {
        Gf2Poly p;
        if (s.empty() || s.size() > 64)
            throw std::invalid_argument("bad hex polynomial: " + s);
        int bit = 0;
        for (auto it = s.rbegin(); it != s.rend(); ++it, bit += 4) {
            char c = *it;
            int v;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
            else throw std::invalid_argument("bad hex polynomial: " + s);
            p.w_[bit / 64] |= std::uint64_t(v) << (bit % 64);
        }
        return p;
    }

  private:
    std::array<std::uint64_t, kWords> w_;
};

/// Carry-less product in F_2[z], by shift-and-XOR over the words of `a`.
inline Gf2Poly clmul(const Gf2Poly& a, const Gf2Poly& b) {
    Gf2Poly r;
    int da = a.degree();
    for (int i = 0; i <= da; ++i) {
        if (a.bit(i)) r ^= b.shifted(i);
    }
    return r;
}

/// Remainder of `a` modulo `m` in F_2[z].
inline Gf2Poly poly_mod(const Gf2Poly& a, const Gf2Poly& m) {
    if (m.is_zero()) throw std::invalid_argument("poly_mod: zero modulus");
    Gf2Poly r = a;
    int dm = m.degree();
    for (int dr = r.degree(); dr >= dm; dr = r.degree()) {
        r ^= m.shifted(dr - dm);
    }
    return r;
}

inline Gf2Poly poly_gcd(Gf2Poly a, Gf2Poly b) {
    while (!b.is_zero()) {
        Gf2Poly r = poly_mod(a, b);
        a = b;
        b = r;
    }
    return a;
}

namespace detail {
/// f(z)^2 = f(z^2) over F_2: spread each coefficient bit i to bit 2i.
inline Gf2Poly poly_square_mod(const Gf2Poly& f, const Gf2Poly& m) {
    Gf2Poly sq;
    int d = f.degree();
    for (int i = 0; i <= d; ++i) {
        if (f.bit(i)) sq.set_bit(2 * i);
    }
    return poly_mod(sq, m);
}

inline std::vector<int> prime_factors(int n) {
    std::vector<int> ps;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}
}  // namespace detail

/// Irreducibility over F_2 via the standard criterion: m of degree n is
/// irreducible iff z^(2^n) = z (mod m) and gcd(z^(2^(n/p)) - z, m) = 1 for
/// every prime p dividing n.
inline bool is_irreducible(const Gf2Poly& m) {
    int n = m.degree();
    if (n < 1) return false;
    if (n == 1) return true;
    if (!m.bit(0)) return false;  // divisible by z

    Gf2Poly z;
    z.set_bit(1);
    // x_i = z^(2^i) mod m, computed by repeated squaring.
    Gf2Poly x = poly_mod(z, m);
    std::vector<Gf2Poly> iterates(n + 1);
    iterates[0] = x;
    for (int i = 1; i <= n; ++i) {
        x = detail::poly_square_mod(x, m);
        iterates[i] = x;
    }
    if (!(iterates[n] == poly_mod(z, m))) return false;
    for (int p : detail::prime_factors(n)) {
        Gf2Poly g = poly_gcd(iterates[n / p] ^ poly_mod(z, m), m);
        if (g.degree() != 0) return false;
    }
    return true;
}

/// Parameters of GF(2^W): the word size and an irreducible degree-W modulus.
class FieldSpec {
  public:
    FieldSpec(unsigned W, Gf2Poly modulus) : w_(W), mod_(std::move(modulus)) {
        if (W != 8 && W != 16 && W != 32 && W != 64)
            throw std::invalid_argument("FieldSpec: W must be 8, 16, 32 or 64");
        if (mod_.degree() != int(W))
            throw std::invalid_argument("FieldSpec: modulus degree != W");
    }

    unsigned W() const { return w_; }
    const Gf2Poly& modulus() const { return mod_; }

    std::uint64_t word_mask() const {
        return w_ == 64 ? ~std::uint64_t(0)
                        : (std::uint64_t(1) << w_) - 1;
    }

    bool operator==(const FieldSpec& o) const {
        return w_ == o.w_ && mod_ == o.mod_;
    }

    /// Textual form `W:hex-modulus`, e.g. `8:11b`.
    std::string to_string() const {
        return std::to_string(w_) + ":" + mod_.to_hex();
    }

    static FieldSpec parse(const std::string& s) {
        auto pos = s.find(':');
        if (pos == std::string::npos)
            throw std::invalid_argument("FieldSpec: expected W:hex, got " + s);
        unsigned W = unsigned(std::stoul(s.substr(0, pos)));
        return FieldSpec(W, Gf2Poly::from_hex(s.substr(pos + 1)));
    }

    // Shipped default moduli, one per supported width.
    static FieldSpec gf2_8() { return FieldSpec(8, Gf2Poly(0x11b)); }
    static FieldSpec gf2_16() { return FieldSpec(16, Gf2Poly(0x1002b)); }
    static FieldSpec gf2_32() { return FieldSpec(32, Gf2Poly(0x10000008dULL)); }
    static FieldSpec gf2_64() {
        return FieldSpec(64, Gf2Poly::from_words(0x1b, 1));
    }
    static FieldSpec for_width(unsigned W) {
        switch (W) {
            case 8: return gf2_8();
            case 16: return gf2_16();
            case 32: return gf2_32();
            case 64: return gf2_64();
        }
        throw std::invalid_argument("FieldSpec: unsupported width");
    }

  private:
    unsigned w_;
    Gf2Poly mod_;
};

/// Element of GF(2^W), a W-bit coefficient word tied to a FieldSpec.
class GfElem {
  public:
    GfElem(std::uint64_t word, const FieldSpec& spec)
        : word_(word & spec.word_mask()), spec_(&spec) {}

    std::uint64_t word() const { return word_; }
    const FieldSpec& spec() const { return *spec_; }

  private:
    std::uint64_t word_;
    const FieldSpec* spec_;
};

inline GfElem field_mul(const GfElem& a, const GfElem& b) {
    if (!(a.spec() == b.spec()))
        throw std::invalid_argument("field_mul: mismatched FieldSpec");
    Gf2Poly p = clmul(Gf2Poly(a.word()), Gf2Poly(b.word()));
    return GfElem(poly_mod(p, a.spec().modulus()).low_word(), a.spec());
}

inline GfElem field_pow(const GfElem& a, std::uint64_t e) {
    GfElem r(1, a.spec());
    GfElem base = a;
    while (e) {
        if (e & 1) r = field_mul(r, base);
        base = field_mul(base, base);
        e >>= 1;
    }
    return r;
}

}  // namespace linsketch
