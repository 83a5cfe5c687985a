#include "sigmalab/bounds.hpp"

#include <map>
#include <stdexcept>

namespace sigmalab {

namespace {

Interval point_hi(const Interval& x) { return Interval::hull(x.hi(), x.hi()); }

Interval exact(long v, mpfr_prec_t prec) { return Interval::from_int(v, prec); }

Interval decimal(const char* text, mpfr_prec_t prec) { return Interval::from_decimal(text, prec); }

// |log a| for a nonzero integer, principal branch for a < 0.
Interval abs_log(const BigInt& a, mpfr_prec_t prec) {
    BigInt m = abs(a);
    Interval re = log(Interval::from_bigint(m, prec));
    if (sgn(a) > 0) return abs(re);
    Interval pi = Interval::pi(prec);
    return sqrt(re * re + pi * pi);
}

} // namespace

Interval matveev_c0(mpfr_prec_t prec) {
    return exact(1, prec) + log(exact(3, prec)) - log(exact(2, prec));
}

Interval matveev_c1(unsigned n, mpfr_prec_t prec) {
    if (n < 1) throw std::invalid_argument("matveev_c1: n must be >= 1");
    const long ln = static_cast<long>(n);
    BigInt fact;
    mpz_fac_ui(fact.get_mpz_t(), n);
    Interval e = Interval::euler_e(prec);
    Interval v = exact(16, prec) / Interval::from_bigint(fact, prec);
    v = v * pow(e, n);
    v = v * exact(2 * ln + 3, prec) * exact(ln + 2, prec);
    v = v * pow(exact(4 * (ln + 1), prec), n + 1);
    v = v * (e * exact(ln, prec) / exact(2, prec));
    v = v * (decimal("4.4", prec) * exact(ln, prec) + decimal("5.5", prec) * log(exact(ln, prec)) + exact(7, prec));
    return v;
}

LinearFormInstance LinearFormInstance::make(std::vector<BigInt> a, std::vector<BigInt> b, mpfr_prec_t prec) {
    if (a.empty() || a.size() != b.size())
        throw std::invalid_argument("linear form: a and b must be nonempty and of equal length");
    LinearFormInstance inst;
    inst.a_values = std::move(a);
    inst.b_coeffs = std::move(b);
    const Interval floor_a = decimal("0.16", prec);
    for (const auto& aj : inst.a_values) {
        if (aj == 0) throw std::invalid_argument("linear form: a_j must be nonzero");
        inst.A_list.push_back(point_hi(max(floor_a, abs_log(aj, prec))));
    }
    const std::size_t n = inst.n();
    Interval B = exact(1, prec);
    for (std::size_t j = 0; j + 1 < n; ++j)
        B = max(B, Interval::from_bigint(abs(inst.b_coeffs[j]), prec) * inst.A_list[j] / inst.A_list[n - 1]);
    B = max(B, Interval::from_bigint(abs(inst.b_coeffs[n - 1]), prec));
    inst.B = point_hi(B);
    Interval omega = exact(1, prec);
    for (const auto& A : inst.A_list) omega = omega * A;
    inst.Omega = omega;
    return inst;
}

void LinearFormInstance::validate() const {
    if (a_values.empty() || a_values.size() != b_coeffs.size() || A_list.size() != a_values.size())
        throw std::invalid_argument("linear form: inconsistent lengths");
    const mpfr_prec_t prec = A_list.front().precision();
    const Interval floor_a = Interval::from_decimal("0.16", prec);
    Interval omega = exact(1, prec);
    for (std::size_t j = 0; j < n(); ++j) {
        if (a_values[j] == 0) throw std::invalid_argument("linear form: a_j must be nonzero");
        if (floor_a.certainly_greater(A_list[j]) || abs_log(a_values[j], prec).certainly_greater(A_list[j]))
            throw std::invalid_argument("linear form: A_" + std::to_string(j + 1) + " below max(0.16, |log a_j|)");
        omega = omega * A_list[j];
    }
    if (exact(1, prec).certainly_greater(B)) throw std::invalid_argument("linear form: B < 1");
    if (omega.certainly_greater(Omega) || Omega.certainly_greater(omega))
        throw std::invalid_argument("linear form: Omega differs from the product of A_j");
}

Interval matveev_lower_bound(const LinearFormInstance& inst, mpfr_prec_t prec) {
    const unsigned n = static_cast<unsigned>(inst.n());
    Interval factor = max(exact(1, prec), exact(n, prec) / exact(6, prec));
    return -(matveev_c1(n, prec) * (matveev_c0(prec) + log(inst.B)) * factor * inst.Omega);
}

bool linear_form_vanishes(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("linear form: a and b must have equal length");
    BigInt imaginary = 0;
    std::map<BigInt, BigInt> exponent_sum;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] == 0) throw std::invalid_argument("linear form: a_j must be nonzero");
        if (sgn(a[j]) < 0) imaginary += b[j];
        for (const auto& pp : factorize(BigInt(abs(a[j]))).factors())
            exponent_sum[pp.prime] += b[j] * pp.exponent;
    }
    if (imaginary != 0) return false;
    for (const auto& [p, e] : exponent_sum)
        if (e != 0) return false;
    return true;
}

MatveevEvaluation evaluate_matveev(const LinearFormInstance& inst, mpfr_prec_t prec, mpfr_prec_t max_prec) {
    inst.validate();
    MatveevEvaluation out;
    out.bound = matveev_lower_bound(inst, prec);
    out.precision_used = prec;
    if (linear_form_vanishes(inst.a_values, inst.b_coeffs)) {
        out.lambda_zero = true;
        return out;
    }
    for (mpfr_prec_t p = prec; p <= max_prec; p *= 2) {
        Interval re = exact(0, p);
        BigInt k = 0;
        for (std::size_t j = 0; j < inst.n(); ++j) {
            re = re + Interval::from_bigint(inst.b_coeffs[j], p) * log(Interval::from_bigint(abs(inst.a_values[j]), p));
            if (sgn(inst.a_values[j]) < 0) k += inst.b_coeffs[j];
        }
        Interval im = Interval::from_bigint(k, p) * Interval::pi(p);
        Interval norm2 = re * re + im * im;
        if (norm2.positive()) {
            out.log_abs_lambda = log(norm2) / exact(2, p);
            out.precision_used = p;
            out.holds = out.log_abs_lambda->certainly_greater(out.bound);
            return out;
        }
    }
    throw std::runtime_error("matveev: Lambda != 0 but not separated from zero at " + std::to_string(max_prec) +
                             " bits");
}

} // namespace sigmalab
