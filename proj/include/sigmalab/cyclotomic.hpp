#pragma once

// Cyclotomic smoothness sets S_{I,e}, primitive prime divisors and the
// elementary lemmas about repunit values p^e-1 / p-1.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigmalab/arith.hpp"

namespace sigmalab {

/// Query for the primes p <= limit with repunit(p, e) = prod_{i in I} q_i^{a_i}, all a_i >= 1.
/// Indices in `subset` are 1-based into `q_primes`.
struct SieSpec {
    std::vector<BigInt> q_primes;
    std::vector<std::size_t> subset;
    unsigned e = 2;
    std::uint64_t limit = 2;

    /// Throws std::invalid_argument if an invariant is broken.
    void validate() const;
    BigInt q_max_subset() const;
    BigInt q_max() const;
};

struct SiePrime {
    std::uint64_t p = 0;
    unsigned e = 0;
    /// (1-based index into q_primes, exponent a_i >= 1), ordered by index.
    std::vector<std::pair<std::size_t, unsigned>> exponents;
    BigInt certificate;  // repunit(p, e)

    /// Rebuilds prod q_i^{a_i} and compares with repunit(p, e).
    bool revalidate(std::span<const BigInt> q_primes) const;

    friend bool operator==(const SiePrime&, const SiePrime&) = default;
};

/// Primary scan: walk primes p <= limit and test smoothness by division.
std::vector<SiePrime> enumerate_sie(const SieSpec& spec, unsigned workers = 1);

/// Cross-check: generate products prod q_i^{a_i} <= repunit(limit, e) and invert p -> repunit(p, e).
std::vector<SiePrime> enumerate_sie_by_products(const SieSpec& spec);

struct SieKey {
    std::vector<std::size_t> subset;
    unsigned e = 0;
    auto operator<=>(const SieKey&) const = default;
};

/// S_{I,e} for every nonempty I and 2 <= e <= e_max. Rejects more than 20 q-primes.
std::map<SieKey, std::vector<SiePrime>> enumerate_s_union(std::span<const BigInt> q_primes, std::uint64_t limit,
                                                           unsigned e_max, unsigned workers = 1);

// Cyclotomic values -----------------------------------------------------------------

/// Phi_n(a) evaluated exactly (n >= 1).
BigInt cyclotomic_value(const BigInt& a, unsigned n);

/// Factorization of (a^e - 1)/(a - 1), assembled from the factorizations of Phi_d(a), d | e, d > 1.
Factorization factorize_repunit(const BigInt& a, unsigned e);

/// Multiplicative order of a modulo the prime q (a not divisible by q).
std::uint64_t multiplicative_order(const BigInt& a, const BigInt& q);

/// Smallest prime q | a^n - 1 with ord_q(a) = n, if any.
std::optional<BigInt> zsigmondy_primitive(const BigInt& a, unsigned n);

struct Lemma22Report {
    BigInt a;
    unsigned e = 0;
    std::size_t omega_count = 0;
    std::size_t required = 0;
    std::optional<BigInt> witness;  // a prime factor congruent to 1 mod e
    bool holds = false;
};

Lemma22Report check_lemma22(const BigInt& a, unsigned e);

struct ResidueBoundReport {
    double h1 = 0, h2 = 0;
    double lhs = 0;             // H1 * H2 / 2
    std::uint64_t rhs = 0;      // gcd(e, p0 - 1)
    std::uint64_t group_bound = 0;  // gcd(e, phi(p0^f)), the order bound the counting argument gives
    bool holds = false;         // lhs <= rhs within the guard band
    bool holds_group_bound = false;
};

/// Thrown when the congruence hypothesis p_i^e = 1 mod p0^f fails for a tuple.
struct InapplicableInstance : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kResidueGuard = 1e-9;

ResidueBoundReport residue_bound_check(std::uint64_t p0, unsigned f, unsigned e, std::uint64_t p1, std::uint64_t p2);

struct GapReport {
    bool holds = true;
    std::optional<std::size_t> first_violation;  // index j with log p_{j+1} <= 9/8 log p_j
    double min_ratio = 0;                         // min log p_{j+1} / log p_j (0 if fewer than 2 primes)
};

/// Checks log p_{j+1} > (9/8) log p_j (exactly, as p_{j+1}^8 > p_j^9) along a sorted list
/// whose members share a dominant prime power with exponent e > 3 s^2. Rejects e <= 3 s^2.
GapReport gap_check(std::span<const std::uint64_t> primes, unsigned e, unsigned s);

/// Splits S_{I,e} into the classes S_{I,e,i}: p goes to the first i with q_i^{a_i} >= repunit(p,e)^{1/|I|}.
std::map<std::size_t, std::vector<std::uint64_t>> partition_by_dominant_prime(std::span<const SiePrime> sie,
                                                                               std::span<const BigInt> q_primes,
                                                                               std::size_t subset_size);

enum class FactorClass { U1, U2, U3, U4 };
std::string to_string(FactorClass c);

struct ClassifiedFactor {
    BigInt p;
    unsigned exponent_in_n = 0;
    FactorClass cls = FactorClass::U4;
    std::optional<unsigned> witness_d;
};

/// Assigns each prime power p^{e-1} || N to U1..U4 with respect to q_1..q_s | q_{s+1}..q_k.
std::vector<ClassifiedFactor> classify_factors(const Factorization& n, std::span<const BigInt> q_all, std::size_t s);

} // namespace sigmalab
