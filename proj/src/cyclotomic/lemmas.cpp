#include "sigmalab/cyclotomic.hpp"

#include <cmath>
#include <numeric>

namespace sigmalab {

ResidueBoundReport residue_bound_check(std::uint64_t p0, unsigned f, unsigned e, std::uint64_t p1, std::uint64_t p2) {
    if (!is_prime_u64(p0) || !is_prime_u64(p1) || !is_prime_u64(p2))
        throw std::invalid_argument("residue bound: p0, p1, p2 must be prime");
    if (p0 == p1 || p0 == p2 || p1 == p2) throw std::invalid_argument("residue bound: primes must be distinct");
    if (e < 1 || f < 1) throw std::invalid_argument("residue bound: e and f must be >= 1");

    BigInt modulus, r;
    mpz_ui_pow_ui(modulus.get_mpz_t(), p0, f);
    for (std::uint64_t p : {p1, p2}) {
        BigInt base = from_u64(p), exp = e;
        mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), modulus.get_mpz_t());
        if (r != 1)
            throw InapplicableInstance("residue bound: " + std::to_string(p) + "^" + std::to_string(e) +
                                       " is not 1 mod " + modulus.get_str());
    }

    ResidueBoundReport rep;
    const double log_p0 = std::log(static_cast<double>(p0));
    rep.h1 = f * log_p0 / std::log(static_cast<double>(p1));
    rep.h2 = f * log_p0 / std::log(static_cast<double>(p2));
    rep.lhs = 0.5 * rep.h1 * rep.h2;
    rep.rhs = std::gcd<std::uint64_t>(e, p0 - 1);
    rep.holds = rep.lhs <= static_cast<double>(rep.rhs) * (1 + kResidueGuard);

    std::uint64_t phi = p0 - 1;
    for (unsigned i = 1; i < f; ++i) phi *= p0;
    rep.group_bound = std::gcd<std::uint64_t>(e, phi);
    rep.holds_group_bound = rep.lhs <= static_cast<double>(rep.group_bound) * (1 + kResidueGuard);
    return rep;
}

GapReport gap_check(std::span<const std::uint64_t> primes, unsigned e, unsigned s) {
    if (static_cast<std::uint64_t>(e) <= 3ull * s * s)
        throw std::invalid_argument("gap check: requires e > 3 s^2");
    GapReport rep;
    BigInt lhs, rhs;
    for (std::size_t j = 0; j + 1 < primes.size(); ++j) {
        if (primes[j + 1] <= primes[j]) throw std::invalid_argument("gap check: primes must be strictly increasing");
        mpz_ui_pow_ui(lhs.get_mpz_t(), primes[j + 1], 8);
        mpz_ui_pow_ui(rhs.get_mpz_t(), primes[j], 9);
        double ratio = std::log(static_cast<double>(primes[j + 1])) / std::log(static_cast<double>(primes[j]));
        if (j == 0 || ratio < rep.min_ratio) rep.min_ratio = ratio;
        if (lhs <= rhs && rep.holds) {
            rep.holds = false;
            rep.first_violation = j;
        }
    }
    return rep;
}

std::map<std::size_t, std::vector<std::uint64_t>> partition_by_dominant_prime(std::span<const SiePrime> sie,
                                                                               std::span<const BigInt> q_primes,
                                                                               std::size_t subset_size) {
    std::map<std::size_t, std::vector<std::uint64_t>> out;
    BigInt power;
    for (const auto& sp : sie) {
        for (auto [i, a] : sp.exponents) {
            // q_i^{a_i} >= repunit^{1/k}  <=>  q_i^{a_i k} >= repunit
            mpz_pow_ui(power.get_mpz_t(), q_primes[i - 1].get_mpz_t(), static_cast<unsigned long>(a) * subset_size);
            if (power >= sp.certificate) {
                out[i].push_back(sp.p);
                break;
            }
        }
    }
    for (auto& [i, list] : out) std::sort(list.begin(), list.end());
    return out;
}

} // namespace sigmalab
