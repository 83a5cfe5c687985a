#include "sigmalab/cyclotomic.hpp"

#include <numeric>

namespace sigmalab {

namespace {

bool all_factors_in(BigInt value, std::span<const BigInt> primes) {
    for (const auto& q : primes) {
        if (value == 1) break;
        if (mpz_divisible_p(value.get_mpz_t(), q.get_mpz_t())) remove_factor(value, q);
    }
    return value == 1;
}

// (p^d - 1)/(p^l - 1) with l = gcd(d, 2).
BigInt reduced_repunit(const BigInt& p, unsigned d) {
    unsigned l = std::gcd(d, 2u);
    BigInt num, den;
    mpz_pow_ui(num.get_mpz_t(), p.get_mpz_t(), d);
    mpz_pow_ui(den.get_mpz_t(), p.get_mpz_t(), l);
    num -= 1;
    den -= 1;
    mpz_divexact(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return num;
}

} // namespace

std::string to_string(FactorClass c) {
    switch (c) {
    case FactorClass::U1: return "U1";
    case FactorClass::U2: return "U2";
    case FactorClass::U3: return "U3";
    case FactorClass::U4: return "U4";
    }
    return "?";
}

std::vector<ClassifiedFactor> classify_factors(const Factorization& n, std::span<const BigInt> q_all, std::size_t s) {
    if (s > q_all.size()) throw std::invalid_argument("classify: split index exceeds number of q primes");
    for (std::size_t i = 0; i < q_all.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (q_all[i] == q_all[j]) throw std::invalid_argument("classify: q primes must be distinct");
    const auto head = q_all.subspan(0, s);
    const auto tail = q_all.subspan(s);

    std::vector<ClassifiedFactor> out;
    for (const auto& pp : n.factors()) {
        ClassifiedFactor cf{pp.prime, pp.exponent, FactorClass::U4, std::nullopt};
        const unsigned e = pp.exponent + 1;
        if (e == 2) {
            cf.cls = FactorClass::U1;
            out.push_back(std::move(cf));
            continue;
        }
        std::vector<unsigned> ds;
        for (unsigned d = 3; d <= e; ++d)
            if (e % d == 0) ds.push_back(d);
        std::vector<BigInt> values;
        for (unsigned d : ds) values.push_back(reduced_repunit(pp.prime, d));

        for (std::size_t i = 0; i < ds.size() && !cf.witness_d; ++i)
            if (!head.empty() && all_factors_in(values[i], head)) {
                cf.cls = FactorClass::U2;
                cf.witness_d = ds[i];
            }
        for (std::size_t i = 0; i < ds.size() && !cf.witness_d; ++i)
            if (!tail.empty() && all_factors_in(values[i], tail)) {
                cf.cls = FactorClass::U3;
                cf.witness_d = ds[i];
            }
        out.push_back(std::move(cf));
    }
    return out;
}

} // namespace sigmalab
