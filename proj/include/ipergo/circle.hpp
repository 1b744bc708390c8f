#pragma once

// Exact and high-precision arithmetic on the unit circle, plus numerically
// stable products of near-unit complex numbers in log-polar form.
//
// Angles are stored as fractions of a full turn (the point is e^{2*pi*i*t}),
// never as radians: rational points stay exact and taking the n-th power of a
// point is integer arithmetic on the angle. A FixedPointAngle holds a P-bit
// fixed-point fraction; multiplying it by an integer n is exact mod 1 at P
// bits, so orbits like t -> 10^j * t mod 1 never lose digits. The represented
// real angle is within 2^-P of the intended one; experiments must keep
// n_max * 2^-P below their tolerance.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <mpfr.h>

#include "common.hpp"

namespace ipergo {

// ---------------------------------------------------------------------------
// RationalAngle: the circle point num/den of a turn, gcd(num,den)=1,
// 0 <= num < den. den = 1 encodes the point 1.

class RationalAngle {
  public:
    RationalAngle() : turns_(0) {}
    RationalAngle(const BigInt& num, const BigInt& den) : turns_(num, den) {
        if (den == 0) throw std::invalid_argument("RationalAngle: zero denominator");
        turns_.canonicalize();
        reduce_mod1();
    }
    explicit RationalAngle(const BigRat& turns) : turns_(turns) {
        turns_.canonicalize();
        reduce_mod1();
    }

    const BigInt num() const { return turns_.get_num(); }
    const BigInt den() const { return turns_.get_den(); }
    const BigRat& turns() const { return turns_; }

    bool is_one() const { return turns_ == 0; }        // the circle point 1
    bool is_half_turn() const { return turns_ * 2 == 1; }

    // signed representative in (-1/2, 1/2]
    BigRat signed_turns() const {
        if (turns_ * 2 > 1) return turns_ - 1;
        return turns_;
    }

    double signed_turns_double() const { return signed_turns().get_d(); }

    bool operator==(const RationalAngle& o) const { return turns_ == o.turns_; }

  private:
    void reduce_mod1() {
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), turns_.get_num().get_mpz_t(), turns_.get_den().get_mpz_t());
        turns_ -= q;
    }
    BigRat turns_;  // in [0,1)
};

// ---------------------------------------------------------------------------
// FixedPointAngle: frac/2^bits of a turn, 0 <= frac < 2^bits.

class FixedPointAngle {
  public:
    explicit FixedPointAngle(unsigned bits = kDefaultPrecisionBits) : bits_(bits), frac_(0) {}
    FixedPointAngle(const BigInt& frac, unsigned bits) : bits_(bits), frac_(frac) {
        BigInt m = modulus();
        mpz_fdiv_r(frac_.get_mpz_t(), frac_.get_mpz_t(), m.get_mpz_t());
    }

    static FixedPointAngle from_turns_double(double t, unsigned bits = kDefaultPrecisionBits) {
        if (bits < 64) throw std::invalid_argument("fixed-point angles need >= 64 bits");
        t -= std::floor(t);
        BigInt f;
        mpz_set_d(f.get_mpz_t(), std::ldexp(t, 62));
        f <<= (bits - 62);
        return FixedPointAngle(f, bits);
    }

    // floor(sqrt(k) * 2^bits) mod 1; e.g. k=2 gives the angle sqrt(2)-1.
    static FixedPointAngle from_sqrt(unsigned long k, unsigned bits = kDefaultPrecisionBits) {
        BigInt s = k;
        s <<= 2 * bits;
        BigInt r;
        mpz_sqrt(r.get_mpz_t(), s.get_mpz_t());
        return FixedPointAngle(r, bits);
    }

    // (sqrt(5)-1)/2 = 0.618033..., the golden rotation.
    static FixedPointAngle golden(unsigned bits = kDefaultPrecisionBits) {
        BigInt five = 5;
        five <<= 2 * bits;
        BigInt r;
        mpz_sqrt(r.get_mpz_t(), five.get_mpz_t());
        BigInt one = BigInt(1) << bits;
        return FixedPointAngle((r - one) >> 1, bits);
    }

    // the angle whose argument is q radians (q rational), i.e. q/(2*pi) turns
    static FixedPointAngle from_radians(const BigRat& q, unsigned bits = kDefaultPrecisionBits) {
        mpfr_t pi, val, qq;
        mpfr_init2(pi, bits + 64);
        mpfr_init2(val, bits + 64);
        mpfr_init2(qq, bits + 64);
        mpfr_const_pi(pi, MPFR_RNDN);
        mpfr_set_q(qq, q.get_mpq_t(), MPFR_RNDN);
        mpfr_div(val, qq, pi, MPFR_RNDN);
        mpfr_div_ui(val, val, 2, MPFR_RNDN);  // q / (2 pi)
        mpfr_frac(val, val, MPFR_RNDN);
        mpfr_mul_2ui(val, val, bits, MPFR_RNDN);
        BigInt f;
        mpfr_get_z(f.get_mpz_t(), val, MPFR_RNDD);
        mpfr_clears(pi, val, qq, static_cast<mpfr_ptr>(nullptr));
        return FixedPointAngle(f, bits);
    }

    unsigned bits() const { return bits_; }
    const BigInt& frac() const { return frac_; }
    BigInt modulus() const { return BigInt(1) << bits_; }

    bool is_one() const { return frac_ == 0; }
    bool is_half_turn() const { return frac_ == (BigInt(1) << (bits_ - 1)); }

    // signed representative in (-1/2, 1/2] as a dyadic rational
    BigRat signed_turns() const {
        BigInt half = BigInt(1) << (bits_ - 1);
        BigInt num = frac_;
        if (frac_ > half) num -= modulus();
        BigRat q(num, modulus());
        q.canonicalize();
        return q;
    }

    double signed_turns_double() const { return signed_turns().get_d(); }

    bool operator==(const FixedPointAngle& o) const {
        return bits_ == o.bits_ && frac_ == o.frac_;
    }

  private:
    unsigned bits_;
    BigInt frac_;
};

// ---------------------------------------------------------------------------
// AngleValue: either exact rational or P-bit fixed point.

using AngleValue = std::variant<RationalAngle, FixedPointAngle>;

inline bool angle_is_one(const AngleValue& a) {
    return std::visit([](const auto& x) { return x.is_one(); }, a);
}
inline bool angle_is_half_turn(const AngleValue& a) {
    return std::visit([](const auto& x) { return x.is_half_turn(); }, a);
}
inline double angle_signed_turns(const AngleValue& a) {
    return std::visit([](const auto& x) { return x.signed_turns_double(); }, a);
}
inline BigRat angle_signed_turns_exact(const AngleValue& a) {
    return std::visit([](const auto& x) { return x.signed_turns(); }, a);
}
// angle as an exact rational in [0,1) (fixed-point angles are dyadic)
inline BigRat angle_turns_exact(const AngleValue& a) {
    if (std::holds_alternative<RationalAngle>(a)) return std::get<RationalAngle>(a).turns();
    const auto& f = std::get<FixedPointAngle>(a);
    BigRat q(f.frac(), f.modulus());
    q.canonicalize();
    return q;
}

// k * angle mod 1, exact in both representations; k may be negative or huge.
inline RationalAngle angle_scale(const RationalAngle& a, const BigInt& k) {
    return RationalAngle(k * a.num(), a.den());
}
inline FixedPointAngle angle_scale(const FixedPointAngle& a, const BigInt& k) {
    return FixedPointAngle(k * a.frac(), a.bits());
}
inline AngleValue angle_scale(const AngleValue& a, const BigInt& k) {
    return std::visit([&](const auto& x) -> AngleValue { return angle_scale(x, k); }, a);
}

// The circle point a^n for n >= 0 (a big integer is fine: the angle is
// multiplied by n mod 1 with no intermediate rounding).
template <typename A>
inline A angle_pow(const A& a, const BigInt& n) {
    if (n < 0) throw std::invalid_argument("angle_pow: negative exponent");
    return angle_scale(a, n);
}

inline Complex angle_point(const AngleValue& a) {
    double t = angle_signed_turns(a);
    return {std::cos(2 * kPi * t), std::sin(2 * kPi * t)};
}

// exact sum of two circle points' angles; mixed representations promote to
// fixed point at the larger precision (rational part floored at 2^-bits)
inline AngleValue angle_add(const AngleValue& a, const AngleValue& b) {
    if (std::holds_alternative<RationalAngle>(a) && std::holds_alternative<RationalAngle>(b))
        return RationalAngle(std::get<RationalAngle>(a).turns() +
                             std::get<RationalAngle>(b).turns());
    unsigned bits = kDefaultPrecisionBits;
    if (auto* f = std::get_if<FixedPointAngle>(&a)) bits = f->bits();
    if (auto* g = std::get_if<FixedPointAngle>(&b))
        bits = std::holds_alternative<FixedPointAngle>(a) ? std::max(bits, g->bits()) : g->bits();
    auto to_frac = [&](const AngleValue& v) -> BigInt {
        if (auto* f = std::get_if<FixedPointAngle>(&v)) return f->frac() << (bits - f->bits());
        const auto& r = std::get<RationalAngle>(v);
        return (r.num() << bits) / r.den();
    };
    return FixedPointAngle(to_frac(a) + to_frac(b), bits);
}

// ---------------------------------------------------------------------------
// LogPolar: (log r, wrapped arg, unwrapped arg). The unwrapped argument of a
// product is the plain sum of factor arguments with no modular reduction,
// which is what the divergence test needs. log_r = -inf encodes exact zero.

struct LogPolar {
    double log_r = 0.0;                      // -inf iff value is exactly 0
    double arg_wrapped = 0.0;                // in (-pi, pi]
    double arg_unwrapped = 0.0;              // running sum, no wrap

    static LogPolar one() { return {0.0, 0.0, 0.0}; }
    static LogPolar zero() {
        return {-std::numeric_limits<double>::infinity(), 0.0, 0.0};
    }
    static LogPolar from_complex(Complex z) {
        if (z == Complex{0, 0}) return zero();
        double a = std::arg(z);
        return {std::log(std::abs(z)), a, a};
    }

    bool is_zero() const { return std::isinf(log_r) && log_r < 0; }
    double abs() const { return is_zero() ? 0.0 : std::exp(log_r); }
    Complex value() const {
        if (is_zero()) return {0, 0};
        double r = std::exp(log_r);
        return {r * std::cos(arg_wrapped), r * std::sin(arg_wrapped)};
    }
};

inline double wrap_to_pi(double a) {
    a = std::fmod(a, 2 * kPi);
    if (a > kPi) a -= 2 * kPi;
    if (a <= -kPi) a += 2 * kPi;
    return a;
}

inline LogPolar logpolar_mul(const LogPolar& x, const LogPolar& y) {
    if (x.is_zero() || y.is_zero()) return LogPolar::zero();
    LogPolar r;
    r.log_r = x.log_r + y.log_r;
    r.arg_unwrapped = x.arg_unwrapped + y.arg_unwrapped;
    r.arg_wrapped = wrap_to_pi(x.arg_wrapped + y.arg_wrapped);
    return r;
}

// Product of a family; empty product is 1, any exact zero absorbs.
template <typename It>
inline LogPolar logpolar_product(It first, It last) {
    LogPolar acc = LogPolar::one();
    for (; first != last; ++first) {
        if (first->is_zero()) return LogPolar::zero();
        acc = logpolar_mul(acc, *first);
    }
    return acc;
}
inline LogPolar logpolar_product(const std::vector<LogPolar>& zs) {
    return logpolar_product(zs.begin(), zs.end());
}

// (1 + a)/2 for a circle point a with argument phi in (-pi, pi]:
// equals cos(phi/2) * e^{i phi/2}; phi = pi gives the exact zero.
inline LogPolar half_sum(const AngleValue& a) {
    if (angle_is_half_turn(a)) return LogPolar::zero();
    double t = angle_signed_turns(a);     // in (-1/2, 1/2)
    double half_arg = kPi * t;            // phi/2 in (-pi/2, pi/2)
    double r = std::cos(half_arg);        // > 0 on that branch
    LogPolar z;
    z.log_r = std::log(r);
    z.arg_wrapped = half_arg;
    z.arg_unwrapped = half_arg;
    return z;
}
inline LogPolar half_sum(const RationalAngle& a) { return half_sum(AngleValue(a)); }
inline LogPolar half_sum(const FixedPointAngle& a) { return half_sum(AngleValue(a)); }

}  // namespace ipergo
