// Exact sign evaluation for small polynomial expressions over doubles.
//
// Every finite double is a dyadic rational, so the sign of
//     sum_i  c_i * a_i * b_i        (a_i, b_i doubles, c_i integers)
// is a well defined integer computation.  sign_sum() first evaluates the
// expression in floating point with a forward error bound; only when the
// result is smaller than the bound does it fall back to exact integer
// arithmetic on the unpacked mantissas.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace segdim {
namespace exact {

// Fixed-capacity unsigned big integer, little-endian limbs.
// Capacity (512 bits) covers products of two doubles times a 63-bit
// coefficient, shifted by exponent spreads up to ~370 bits; anything
// larger throws instead of silently wrapping.
class BigUint {
public:
    static constexpr int kLimbs = 8;

    BigUint() : limb_{} {}

    explicit BigUint(std::uint64_t v) : limb_{} { limb_[0] = v; }

    bool is_zero() const {
        for (auto w : limb_)
            if (w != 0) return false;
        return true;
    }

    void mul_u64(std::uint64_t m) {
        unsigned __int128 carry = 0;
        for (int i = 0; i < kLimbs; ++i) {
            unsigned __int128 cur = (unsigned __int128)limb_[i] * m + carry;
            limb_[i] = (std::uint64_t)cur;
            carry = cur >> 64;
        }
        if (carry != 0) throw std::overflow_error("BigUint::mul_u64 overflow");
    }

    void shl(int bits) {
        if (bits < 0) throw std::invalid_argument("BigUint::shl negative shift");
        if (bits == 0) return;
        int words = bits / 64, rem = bits % 64;
        if (words >= kLimbs) {
            if (!is_zero()) throw std::overflow_error("BigUint::shl overflow");
            return;
        }
        for (int i = kLimbs - words; i < kLimbs; ++i)
            if (limb_[i] != 0) throw std::overflow_error("BigUint::shl overflow");
        if (rem != 0 && (limb_[kLimbs - 1 - words] >> (64 - rem)) != 0)
            throw std::overflow_error("BigUint::shl overflow");
        for (int i = kLimbs - 1; i >= 0; --i) {
            int src = i - words;
            std::uint64_t v = 0;
            if (src >= 0) {
                v = limb_[src] << rem;
                if (rem != 0 && src - 1 >= 0) v |= limb_[src - 1] >> (64 - rem);
            }
            limb_[i] = v;
        }
    }

    void add(const BigUint& o) {
        unsigned __int128 carry = 0;
        for (int i = 0; i < kLimbs; ++i) {
            unsigned __int128 cur = (unsigned __int128)limb_[i] + o.limb_[i] + carry;
            limb_[i] = (std::uint64_t)cur;
            carry = cur >> 64;
        }
        if (carry != 0) throw std::overflow_error("BigUint::add overflow");
    }

    // this -= o; requires *this >= o
    void sub(const BigUint& o) {
        unsigned __int128 borrow = 0;
        for (int i = 0; i < kLimbs; ++i) {
            unsigned __int128 cur =
                (unsigned __int128)limb_[i] - o.limb_[i] - borrow;
            limb_[i] = (std::uint64_t)cur;
            borrow = (cur >> 64) != 0 ? 1 : 0;
        }
        if (borrow != 0) throw std::logic_error("BigUint::sub underflow");
    }

    int cmp(const BigUint& o) const {
        for (int i = kLimbs - 1; i >= 0; --i) {
            if (limb_[i] != o.limb_[i]) return limb_[i] < o.limb_[i] ? -1 : 1;
        }
        return 0;
    }

private:
    std::array<std::uint64_t, kLimbs> limb_;
};

// Signed accumulator on top of BigUint.
class BigSigned {
public:
    BigSigned() : sign_(0) {}

    void add(int sign, const BigUint& mag) {
        if (sign == 0 || mag.is_zero()) return;
        if (sign_ == 0) {
            mag_ = mag;
            sign_ = sign;
            return;
        }
        if (sign_ == sign) {
            mag_.add(mag);
            return;
        }
        int c = mag_.cmp(mag);
        if (c == 0) {
            mag_ = BigUint();
            sign_ = 0;
        } else if (c > 0) {
            mag_.sub(mag);
        } else {
            BigUint tmp = mag;
            tmp.sub(mag_);
            mag_ = tmp;
            sign_ = sign;
        }
    }

    int sign() const { return sign_; }

private:
    BigUint mag_;
    int sign_;
};

// One addend of a sign_sum expression: value = coeff * a * b.
struct Term {
    double a;
    double b;
    std::int64_t coeff;
};

// x = mant * 2^exp with |mant| in [2^52, 2^53); returns false for x == 0.
inline bool split_double(double x, std::int64_t& mant, int& exp) {
    if (x == 0.0) return false;
    int e;
    double f = std::frexp(x, &e);
    mant = (std::int64_t)std::ldexp(f, 53);
    exp = e - 53;
    return true;
}

inline int sign_sum_exact(std::span<const Term> terms) {
    // gather nonzero addends as (sign, |coeff|, |ma|, |mb|, e)
    struct Add {
        int sign;
        std::uint64_t c, ma, mb;
        int e;
    };
    std::array<Add, 24> adds;
    int n = 0;
    int emin = 0;
    bool any = false;
    for (const Term& t : terms) {
        if (t.coeff == 0) continue;
        std::int64_t ma, mb;
        int ea, eb;
        if (!split_double(t.a, ma, ea)) continue;
        if (!split_double(t.b, mb, eb)) continue;
        if (n == (int)adds.size())
            throw std::invalid_argument("sign_sum: too many terms");
        int s = 1;
        std::int64_t c = t.coeff;
        if (c < 0) { s = -s; c = -c; }
        if (ma < 0) { s = -s; ma = -ma; }
        if (mb < 0) { s = -s; mb = -mb; }
        adds[n] = {s, (std::uint64_t)c, (std::uint64_t)ma, (std::uint64_t)mb,
                   ea + eb};
        if (!any || adds[n].e < emin) emin = adds[n].e;
        any = true;
        ++n;
    }
    if (!any) return 0;
    BigSigned acc;
    for (int i = 0; i < n; ++i) {
        BigUint v(adds[i].ma);
        v.mul_u64(adds[i].mb);
        v.mul_u64(adds[i].c);
        v.shl(adds[i].e - emin);
        acc.add(adds[i].sign, v);
    }
    return acc.sign();
}

// Sign of sum(c_i * a_i * b_i), exact.  Doubles must be finite.
inline int sign_sum(std::span<const Term> terms) {
    double s = 0.0, m = 0.0;
    for (const Term& t : terms) {
        double v = (double)t.coeff * t.a * t.b;
        s += v;
        m += std::fabs(v);
    }
    // |computed - true| <= m * (3 + nterms) * eps; 2^-48 is a safe cover
    // for up to 24 terms.
    double err = m * 0x1p-48;
    if (s > err) return 1;
    if (s < -err) return -1;
    if (m == 0.0) return 0;
    return sign_sum_exact(terms);
}

inline int sign_sum(std::initializer_list<Term> terms) {
    return sign_sum(std::span<const Term>(terms.begin(), terms.size()));
}

} // namespace exact
} // namespace segdim
