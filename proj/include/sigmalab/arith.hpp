#pragma once

// Exact integer and rational arithmetic: factorization, divisor sums,
// abundancy and prime-factor counts.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace sigmalab {

using BigInt = mpz_class;

struct PrimePower {
    BigInt prime;
    unsigned exponent = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Canonical factorization of a positive integer. Primes are strictly
/// increasing, every exponent is at least one, and the product of the
/// listed prime powers equals value(). The empty list represents 1.
class Factorization {
public:
    Factorization() : value_(1) {}

    /// Builds a factorization from prime powers in any order, merging repeats.
    /// Throws std::invalid_argument if an entry is not prime or has exponent 0.
    static Factorization from_prime_powers(std::vector<PrimePower> factors);

    /// Parses "p1^e1*p2^e2" (exponent optional, "1" for the empty product).
    static Factorization parse(std::string_view text);

    const BigInt& value() const noexcept { return value_; }
    std::span<const PrimePower> factors() const& noexcept { return factors_; }
    std::vector<PrimePower> factors() && { return std::move(factors_); }
    bool is_one() const noexcept { return factors_.empty(); }

    /// Exponent of `p` in the factorization, 0 if absent.
    unsigned exponent_of(const BigInt& p) const;

    bool is_square() const noexcept;

    Factorization operator*(const Factorization& other) const;

    std::string to_string() const;

    friend bool operator==(const Factorization& a, const Factorization& b) {
        return a.factors_ == b.factors_;
    }

private:
    BigInt value_;
    std::vector<PrimePower> factors_;
};

/// Rational number kept in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(long n) : q_(n) {}
    Rational(const BigInt& num, const BigInt& den);
    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    BigInt numerator() const { return q_.get_num(); }
    BigInt denominator() const { return q_.get_den(); }
    const mpq_class& raw() const noexcept { return q_; }

    double to_double() const { return q_.get_d(); }
    std::string to_string() const { return q_.get_str(); }
    static Rational parse(std::string_view text);

    Rational operator+(const Rational& o) const { return Rational(mpq_class(q_ + o.q_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(q_ - o.q_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(q_ * o.q_)); }
    Rational operator/(const Rational& o) const;

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend auto operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    mpq_class q_{0};
};

// Primality ------------------------------------------------------------------

bool is_prime_u64(std::uint64_t n);
bool is_prime(const BigInt& n);

/// Largest prime strictly below `bound`, or 0 if none.
BigInt prev_prime(const BigInt& bound);

/// All primes <= limit (simple sieve; limit is expected to stay small).
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

// Factorization --------------------------------------------------------------

/// Factors n >= 1. Throws std::domain_error for n <= 0.
Factorization factorize(const BigInt& n);
Factorization factorize(std::uint64_t n);

/// Word-sized fast path used by the search loops.
using SmallFactors = std::vector<std::pair<std::uint64_t, unsigned>>;
SmallFactors factorize_u64(std::uint64_t n);

// Divisor arithmetic -----------------------------------------------------------

BigInt sigma(const Factorization& f);
BigInt sigma(const BigInt& n);

/// sigma for word-sized input. Returns false on overflow of 64 bits.
bool sigma_u64(std::uint64_t n, std::uint64_t& out);
std::uint64_t sigma_from_factors(const SmallFactors& f, bool& overflow);

/// (p^e - 1)/(p - 1). Requires p >= 2, e >= 1; throws std::invalid_argument.
BigInt repunit(const BigInt& p, unsigned e);

std::size_t omega(const Factorization& f) noexcept;
std::size_t omega_s(const Factorization& f) noexcept;

/// sigma(N)/N in lowest terms.
Rational abundancy(const Factorization& f);

/// sigma(p^e)/p^e for a prime power (e may be 0).
Rational abundancy_prime_power(const BigInt& p, unsigned e);

/// Exponent of p in n, dividing it out of n.
unsigned remove_factor(BigInt& n, const BigInt& p);

std::uint64_t to_u64(const BigInt& n);
BigInt from_u64(std::uint64_t n);
bool fits_u64(const BigInt& n);

} // namespace sigmalab
