#include "sigmalab/cyclotomic.hpp"

#include <stdexcept>

namespace sigmalab {

namespace {

std::vector<unsigned> divisors(unsigned n) {
    std::vector<unsigned> small, large;
    for (unsigned d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        small.push_back(d);
        if (d * d != n) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

std::vector<unsigned> prime_divisors(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

int moebius(unsigned n) {
    int mu = 1;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        mu = -mu;
    }
    if (n > 1) mu = -mu;
    return mu;
}

bool has_order_exactly(const BigInt& a, const BigInt& q, unsigned n) {
    BigInt r;
    BigInt exp = n;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), exp.get_mpz_t(), q.get_mpz_t());
    if (r != 1) return false;
    for (unsigned p : prime_divisors(n)) {
        exp = n / p;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), exp.get_mpz_t(), q.get_mpz_t());
        if (r == 1) return false;
    }
    return true;
}

} // namespace

BigInt cyclotomic_value(const BigInt& a, unsigned n) {
    if (n < 1) throw std::invalid_argument("cyclotomic_value: n must be >= 1");
    if (a < 2) throw std::invalid_argument("cyclotomic_value: a must be >= 2");
    BigInt num = 1, den = 1, term;
    for (unsigned d : divisors(n)) {
        int mu = moebius(n / d);
        if (mu == 0) continue;
        mpz_pow_ui(term.get_mpz_t(), a.get_mpz_t(), d);
        term -= 1;
        (mu > 0 ? num : den) *= term;
    }
    mpz_divexact(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return num;
}

Factorization factorize_repunit(const BigInt& a, unsigned e) {
    if (a < 2) throw std::invalid_argument("factorize_repunit: a must be >= 2");
    if (e < 1) throw std::invalid_argument("factorize_repunit: e must be >= 1");
    Factorization result;
    for (unsigned d : divisors(e))
        if (d > 1) result = result * factorize(cyclotomic_value(a, d));
    return result;
}

std::uint64_t multiplicative_order(const BigInt& a, const BigInt& q) {
    if (!is_prime(q)) throw std::invalid_argument("multiplicative_order: modulus must be prime");
    if (mpz_divisible_p(a.get_mpz_t(), q.get_mpz_t()))
        throw std::invalid_argument("multiplicative_order: base divisible by modulus");
    std::uint64_t order = to_u64(q) - 1;
    BigInt r, exp;
    for (const auto& pp : factorize(from_u64(order)).factors()) {
        std::uint64_t p = to_u64(pp.prime);
        for (unsigned i = 0; i < pp.exponent; ++i) {
            exp = from_u64(order / p);
            mpz_powm(r.get_mpz_t(), a.get_mpz_t(), exp.get_mpz_t(), q.get_mpz_t());
            if (r != 1) break;
            order /= p;
        }
    }
    return order;
}

std::optional<BigInt> zsigmondy_primitive(const BigInt& a, unsigned n) {
    if (a < 2) throw std::invalid_argument("zsigmondy: a must be >= 2");
    if (n < 2) throw std::invalid_argument("zsigmondy: n must be >= 2");
    // Every prime of order exactly n divides Phi_n(a); the remaining primes
    // dividing Phi_n(a) divide n.
    for (const auto& pp : factorize(cyclotomic_value(a, n)).factors())
        if (has_order_exactly(a, pp.prime, n)) return pp.prime;
    return std::nullopt;
}

Lemma22Report check_lemma22(const BigInt& a, unsigned e) {
    if (a < 2) throw std::invalid_argument("check_lemma22: a must be >= 2");
    if (e < 3) throw std::invalid_argument("check_lemma22: e must be >= 3");
    Lemma22Report report;
    report.a = a;
    report.e = e;
    auto f = factorize_repunit(a, e);
    report.omega_count = omega(f);
    report.required = prime_divisors(e).size() - 1;
    for (const auto& pp : f.factors()) {
        if (mpz_fdiv_ui(pp.prime.get_mpz_t(), e) == 1) {
            report.witness = pp.prime;
            break;
        }
    }
    report.holds = report.omega_count >= report.required && report.witness.has_value();
    return report;
}

} // namespace sigmalab
