#pragma once

// Outward-rounded interval arithmetic on MPFR reals. Every operation rounds
// the lower endpoint toward -inf and the upper toward +inf, so the true value
// of an expression always lies inside the computed interval.

#include <string>
#include <utility>

#include <mpfr.h>

#include "sigmalab/arith.hpp"

namespace sigmalab {

class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
    BigFloat& operator=(BigFloat o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr get() noexcept { return v_; }
    mpfr_srcptr get() const noexcept { return v_; }
    mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }
    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
    /// Scientific notation with `digits` significant digits.
    std::string to_string(int digits = 20, mpfr_rnd_t rnd = MPFR_RNDN) const;

private:
    mpfr_t v_;
};

class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 256) : lo_(prec), hi_(prec) {}

    static Interval from_int(long v, mpfr_prec_t prec);
    static Interval from_bigint(const BigInt& v, mpfr_prec_t prec);
    static Interval from_rational(const Rational& v, mpfr_prec_t prec);
    /// Decimal string such as "4.4" or "1e6", enclosed exactly.
    static Interval from_decimal(const std::string& text, mpfr_prec_t prec);
    static Interval hull(const BigFloat& lo, const BigFloat& hi);
    static Interval pi(mpfr_prec_t prec);
    static Interval euler_e(mpfr_prec_t prec);

    const BigFloat& lo() const noexcept { return lo_; }
    const BigFloat& hi() const noexcept { return hi_; }
    mpfr_prec_t precision() const noexcept { return lo_.precision(); }

    bool positive() const { return mpfr_sgn(lo_.get()) > 0; }
    bool negative() const { return mpfr_sgn(hi_.get()) < 0; }
    bool contains_zero() const { return !positive() && !negative(); }
    /// Strictly greater everywhere: lo(*this) > hi(o).
    bool certainly_greater(const Interval& o) const { return mpfr_greater_p(lo_.get(), o.hi_.get()); }

    /// Midpoint in scientific notation.
    std::string to_string(int digits = 20) const;
    double mid_double() const;
    /// Relative width (hi - lo) / |mid|, as a double.
    double relative_width() const;

    friend Interval operator+(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);
    friend Interval operator/(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a);

private:
    BigFloat lo_, hi_;
};

Interval log(const Interval& x);   // requires x > 0
Interval exp(const Interval& x);
Interval sqrt(const Interval& x);  // requires x >= 0
Interval abs(const Interval& x);
Interval max(const Interval& a, const Interval& b);
Interval pow(const Interval& base, unsigned long k);
/// base^y for base > 0.
Interval pow(const Interval& base, const Interval& y);

} // namespace sigmalab
