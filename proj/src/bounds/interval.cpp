#include "sigmalab/interval.hpp"

#include <cmath>
#include <stdexcept>

namespace sigmalab {

std::string BigFloat::to_string(int digits, mpfr_rnd_t rnd) const {
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(std::max(1, digits - 1)) + "R*e";
    if (mpfr_asprintf(&buf, fmt.c_str(), rnd, v_) < 0) throw std::runtime_error("mpfr_asprintf failed");
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

namespace {

mpfr_prec_t common_prec(const Interval& a, const Interval& b) { return std::max(a.precision(), b.precision()); }

template <class Op>
Interval apply_bounds(mpfr_prec_t prec, Op op) {
    BigFloat lo(prec), hi(prec);
    op(lo.get(), MPFR_RNDD);
    op(hi.get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

} // namespace

Interval Interval::hull(const BigFloat& lo, const BigFloat& hi) {
    if (mpfr_nan_p(lo.get()) || mpfr_nan_p(hi.get())) throw std::domain_error("interval: NaN endpoint");
    if (mpfr_greater_p(lo.get(), hi.get())) throw std::logic_error("interval: lo > hi");
    Interval r(std::max(lo.precision(), hi.precision()));
    mpfr_set(r.lo_.get(), lo.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), hi.get(), MPFR_RNDU);
    return r;
}

Interval Interval::from_int(long v, mpfr_prec_t prec) {
    return apply_bounds(prec, [&](mpfr_ptr out, mpfr_rnd_t rnd) { mpfr_set_si(out, v, rnd); });
}

Interval Interval::from_bigint(const BigInt& v, mpfr_prec_t prec) {
    return apply_bounds(prec, [&](mpfr_ptr out, mpfr_rnd_t rnd) { mpfr_set_z(out, v.get_mpz_t(), rnd); });
}

Interval Interval::from_rational(const Rational& v, mpfr_prec_t prec) {
    return apply_bounds(prec, [&](mpfr_ptr out, mpfr_rnd_t rnd) { mpfr_set_q(out, v.raw().get_mpq_t(), rnd); });
}

Interval Interval::from_decimal(const std::string& text, mpfr_prec_t prec) {
    return apply_bounds(prec, [&](mpfr_ptr out, mpfr_rnd_t rnd) {
        if (mpfr_set_str(out, text.c_str(), 10, rnd) != 0)
            throw std::invalid_argument("interval: cannot parse '" + text + "'");
    });
}

Interval Interval::pi(mpfr_prec_t prec) {
    return apply_bounds(prec, [](mpfr_ptr out, mpfr_rnd_t rnd) { mpfr_const_pi(out, rnd); });
}

Interval Interval::euler_e(mpfr_prec_t prec) { return exp(from_int(1, prec)); }

std::string Interval::to_string(int digits) const {
    BigFloat mid(precision() + 2);
    mpfr_add(mid.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
    return mid.to_string(digits);
}

double Interval::mid_double() const { return 0.5 * (lo_.to_double() + hi_.to_double()); }

double Interval::relative_width() const {
    BigFloat w(precision());
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    double mid = std::abs(mid_double());
    return mid == 0 ? w.to_double(MPFR_RNDU) : w.to_double(MPFR_RNDU) / mid;
}

Interval operator+(const Interval& a, const Interval& b) {
    BigFloat lo(common_prec(a, b)), hi(common_prec(a, b));
    mpfr_add(lo.get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_add(hi.get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval operator-(const Interval& a, const Interval& b) {
    BigFloat lo(common_prec(a, b)), hi(common_prec(a, b));
    mpfr_sub(lo.get(), a.lo().get(), b.hi().get(), MPFR_RNDD);
    mpfr_sub(hi.get(), a.hi().get(), b.lo().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval operator-(const Interval& a) {
    BigFloat lo(a.precision()), hi(a.precision());
    mpfr_neg(lo.get(), a.hi().get(), MPFR_RNDD);
    mpfr_neg(hi.get(), a.lo().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval operator*(const Interval& a, const Interval& b) {
    const mpfr_prec_t prec = common_prec(a, b);
    BigFloat lo(prec), hi(prec), t(prec);
    mpfr_set_inf(lo.get(), 1);
    mpfr_set_inf(hi.get(), -1);
    for (const BigFloat* x : {&a.lo(), &a.hi()})
        for (const BigFloat* y : {&b.lo(), &b.hi()}) {
            mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
            mpfr_min(lo.get(), lo.get(), t.get(), MPFR_RNDD);
            mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
            mpfr_max(hi.get(), hi.get(), t.get(), MPFR_RNDU);
        }
    return Interval::hull(lo, hi);
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw std::domain_error("interval: division by an interval containing zero");
    const mpfr_prec_t prec = b.precision();
    BigFloat lo(prec), hi(prec);
    mpfr_ui_div(lo.get(), 1, b.hi().get(), MPFR_RNDD);
    mpfr_ui_div(hi.get(), 1, b.lo().get(), MPFR_RNDU);
    return a * Interval::hull(lo, hi);
}

Interval log(const Interval& x) {
    if (!x.positive()) throw std::domain_error("interval: log of a non-positive interval");
    BigFloat lo(x.precision()), hi(x.precision());
    mpfr_log(lo.get(), x.lo().get(), MPFR_RNDD);
    mpfr_log(hi.get(), x.hi().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval exp(const Interval& x) {
    BigFloat lo(x.precision()), hi(x.precision());
    mpfr_exp(lo.get(), x.lo().get(), MPFR_RNDD);
    mpfr_exp(hi.get(), x.hi().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval sqrt(const Interval& x) {
    if (x.negative() || mpfr_sgn(x.lo().get()) < 0) throw std::domain_error("interval: sqrt of a negative interval");
    BigFloat lo(x.precision()), hi(x.precision());
    mpfr_sqrt(lo.get(), x.lo().get(), MPFR_RNDD);
    mpfr_sqrt(hi.get(), x.hi().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval abs(const Interval& x) {
    if (x.positive()) return x;
    if (x.negative()) return -x;
    BigFloat lo(x.precision()), hi(x.precision());
    mpfr_set_zero(lo.get(), 1);
    mpfr_abs(hi.get(), x.lo().get(), MPFR_RNDU);
    mpfr_max(hi.get(), hi.get(), x.hi().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval max(const Interval& a, const Interval& b) {
    const mpfr_prec_t prec = common_prec(a, b);
    BigFloat lo(prec), hi(prec);
    mpfr_max(lo.get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_max(hi.get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval pow(const Interval& base, unsigned long k) {
    if (k == 0) return Interval::from_int(1, base.precision());
    Interval mag = abs(base);
    BigFloat lo(base.precision()), hi(base.precision());
    mpfr_pow_ui(lo.get(), mag.lo().get(), k, MPFR_RNDD);
    mpfr_pow_ui(hi.get(), mag.hi().get(), k, MPFR_RNDU);
    Interval even = Interval::hull(lo, hi);
    if (k % 2 == 0 || base.positive() || mpfr_zero_p(base.lo().get())) return even;
    if (base.negative()) return -even;
    // Odd power of an interval straddling zero: monotone, evaluate endpoints.
    mpfr_pow_ui(lo.get(), base.lo().get(), k, MPFR_RNDD);
    mpfr_pow_ui(hi.get(), base.hi().get(), k, MPFR_RNDU);
    return Interval::hull(lo, hi);
}

Interval pow(const Interval& base, const Interval& y) {
    if (!base.positive()) throw std::domain_error("interval: real power of a non-positive base");
    return exp(y * log(base));
}

} // namespace sigmalab
