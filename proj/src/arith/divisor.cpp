#include "sigmalab/arith.hpp"

#include <stdexcept>

namespace sigmalab {

BigInt repunit(const BigInt& p, unsigned e) {
    if (p < 2) throw std::invalid_argument("repunit: base must be >= 2, got " + p.get_str());
    if (e < 1) throw std::invalid_argument("repunit: length must be >= 1");
    BigInt power;
    mpz_pow_ui(power.get_mpz_t(), p.get_mpz_t(), e);
    power -= 1;
    BigInt base_minus_one = p - 1;
    mpz_divexact(power.get_mpz_t(), power.get_mpz_t(), base_minus_one.get_mpz_t());
    return power;
}

BigInt sigma(const Factorization& f) {
    BigInt result = 1;
    for (const auto& pp : f.factors()) result *= repunit(pp.prime, pp.exponent + 1);
    return result;
}

BigInt sigma(const BigInt& n) { return sigma(factorize(n)); }

std::uint64_t sigma_from_factors(const SmallFactors& f, bool& overflow) {
    using u128 = unsigned __int128;
    overflow = false;
    u128 result = 1;
    for (auto [p, e] : f) {
        u128 term = 1, power = 1;
        for (unsigned i = 0; i < e; ++i) {
            power *= p;
            term += power;
            if (term >> 64) {
                overflow = true;
                return 0;
            }
        }
        result *= term;
        if (result >> 64) {
            overflow = true;
            return 0;
        }
    }
    return static_cast<std::uint64_t>(result);
}

bool sigma_u64(std::uint64_t n, std::uint64_t& out) {
    bool overflow = false;
    out = sigma_from_factors(factorize_u64(n), overflow);
    return !overflow;
}

std::size_t omega(const Factorization& f) noexcept { return f.factors().size(); }

std::size_t omega_s(const Factorization& f) noexcept {
    std::size_t count = 0;
    for (const auto& pp : f.factors())
        if (pp.exponent == 1) ++count;
    return count;
}

Rational abundancy_prime_power(const BigInt& p, unsigned e) {
    BigInt power;
    mpz_pow_ui(power.get_mpz_t(), p.get_mpz_t(), e);
    return Rational(repunit(p, e + 1), power);
}

Rational abundancy(const Factorization& f) { return Rational(sigma(f), f.value()); }

} // namespace sigmalab
