#pragma once

// Explicit effective bounds: Matveev's linear-forms constant, the Siegel
// relation bound with an exact multiplicative-relation finder, the C23 / delta
// recurrences and the C24 recursion.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sigmalab/arith.hpp"
#include "sigmalab/interval.hpp"

namespace sigmalab {

inline constexpr mpfr_prec_t kDefaultPrecision = 256;

// Matveev ---------------------------------------------------------------------

Interval matveev_c1(unsigned n, mpfr_prec_t prec = kDefaultPrecision);

/// C0 = 1 + log 3 - log 2.
Interval matveev_c0(mpfr_prec_t prec = kDefaultPrecision);

/// Lambda = sum b_j log a_j with a_j nonzero integers. Logs of negative a_j are
/// principal complex logs, log|a| + i*pi.
struct LinearFormInstance {
    std::vector<BigInt> a_values;
    std::vector<BigInt> b_coeffs;
    std::vector<Interval> A_list;  // point intervals, A_j >= max(0.16, |log a_j|)
    Interval B;
    Interval Omega;

    /// Builds the instance with the smallest admissible A_j, rounded upward.
    static LinearFormInstance make(std::vector<BigInt> a, std::vector<BigInt> b,
                                   mpfr_prec_t prec = kDefaultPrecision);

    std::size_t n() const noexcept { return a_values.size(); }
    void validate() const;
};

struct MatveevEvaluation {
    bool lambda_zero = false;
    Interval bound;                      // right-hand side, a negative number
    std::optional<Interval> log_abs_lambda;
    mpfr_prec_t precision_used = 0;      // after escalation
    bool holds = true;                   // lambda_zero or log|Lambda| > bound
};

/// -C1(n)(C0 + log B) max(1, n/6) Omega.
Interval matveev_lower_bound(const LinearFormInstance& inst, mpfr_prec_t prec = kDefaultPrecision);

/// Exact test of sum b_j log a_j == 0 via factorization exponents and the
/// count of negative terms.
bool linear_form_vanishes(const std::vector<BigInt>& a, const std::vector<BigInt>& b);

/// Evaluates both sides. When Lambda != 0 but its enclosure still contains
/// zero, precision is doubled up to `max_prec`; std::runtime_error beyond that.
MatveevEvaluation evaluate_matveev(const LinearFormInstance& inst, mpfr_prec_t prec = kDefaultPrecision,
                                   mpfr_prec_t max_prec = 1 << 16);

// Siegel and multiplicative relations --------------------------------------------

/// ceil(((s+1)^{1/2} A)^s). Requires s >= 1 and A >= 1.
BigInt siegel_bound(unsigned s, const BigInt& A);

struct FactoredRational {
    Factorization num, den;
    static FactoredRational from_rational(const Rational& r);  // r > 0
    Rational value() const;
};

/// Nonzero integer b with prod r_j^{b_j} == 1, or nullopt when the values are
/// multiplicatively independent. The result has the smallest max-norm among
/// the kernel basis candidates (and the exhaustive search for small inputs)
/// and its first nonzero entry is positive.
std::optional<std::vector<BigInt>> find_multiplicative_relation(const std::vector<FactoredRational>& values);
std::optional<std::vector<BigInt>> find_multiplicative_relation(const std::vector<Rational>& values);

/// Brute force over |b_j| <= bound, smallest max-norm first.
std::optional<std::vector<BigInt>> exhaustive_relation(const std::vector<FactoredRational>& values, unsigned bound);

bool relation_holds(const std::vector<FactoredRational>& values, const std::vector<BigInt>& b);

// Lower-bound recurrences ---------------------------------------------------------

/// C23(1) = 1, C23(i+1) = (2(i+1))^{2^i} C23(i). Requires 1 <= s <= 12.
BigInt c23(unsigned s);

struct DeltaQuery {
    unsigned s = 0;
    BigInt n = 1;
    BigInt d = 1;
    std::vector<BigInt> primes;  // odd, nondecreasing, size s

    void validate() const;
};

/// 1 / (C23(s) n^{2^s} prod (p_i - 1)^{2^s - 2^{s-i}}). Rejects s = 0.
Rational delta_lower_bound(const DeltaQuery& q);

struct DeltaInstance {
    std::vector<BigInt> primes;
    BigInt m;
    std::vector<unsigned> exponents;        // e_i defining n/d
    Rational target;                        // n/d = h(m prod p_i^{e_i})
    std::optional<Rational> min_gap;        // smallest positive n/d - prod h(p_i^{e'_i})
    std::vector<unsigned> witness;          // the e' attaining min_gap
    Rational bound;                         // delta_lower_bound for (s, n, d, primes)
    bool holds = true;
};

struct DeltaOracleReport {
    std::size_t instances = 0;
    std::size_t violations = 0;
    std::optional<DeltaInstance> tightest;  // smallest min_gap / bound ratio
    std::vector<DeltaInstance> failures;
};

/// Exhaustive check of the delta lower bound on instances built from every
/// m in `m_candidates` and every exponent tuple in [0, exponent_cap]^s.
/// Requires s <= 3, odd primes <= 13, exponent_cap <= 6, every prime factor of
/// each m above p_s (so m = 1 is rejected).
DeltaOracleReport delta_oracle(const std::vector<BigInt>& primes, unsigned exponent_cap,
                               const std::vector<BigInt>& m_candidates);

enum class C24Mode { enumerate, monotone };

struct C24Options {
    C24Mode mode = C24Mode::enumerate;
    std::uint64_t budget = 2'000'000;      // prime multisets per step (enumerate)
    std::uint64_t max_prime_limit = 10'000'000;
    unsigned max_threshold_bits = 4096;    // monotone mode
    unsigned workers = 1;
};

struct C24Step {
    unsigned s = 0;
    Rational value;
    Rational threshold;                    // 2n / C24(s-1, n), s >= 1
    std::vector<BigInt> minimizer;         // primes attaining the delta minimum
    bool halved = false;                   // value came from C24(s-1, n)/2
};

/// C24(0, n) = 1/n, C24(s+1, n) = min(C24(s, n)/2, min delta over multisets of
/// s+1 odd primes below 2n / C24(s, n)). Returns all steps 0..s.
std::vector<C24Step> c24_table(unsigned s, const BigInt& n, const C24Options& opt = {});
Rational c24(unsigned s, const BigInt& n, const C24Options& opt = {});

/// exp(C (log Q / log log Q)^{1/(2k+4)}). Requires Q >= 16, C > 0.
Interval threshold_small_prime(const Interval& C, unsigned k, const Interval& Q);

// Reports ------------------------------------------------------------------------

enum class BoundKind { matveev_c1, matveev_lower, siegel, c23, delta_lower, c24, threshold };
std::string to_string(BoundKind k);

struct BoundReport {
    BoundKind kind;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::variant<BigInt, Rational, Interval> value;
    mpfr_prec_t precision_bits = 0;
};

} // namespace sigmalab
