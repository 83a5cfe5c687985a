#include "sigmalab/bounds.hpp"

#include <algorithm>
#include <stdexcept>

namespace sigmalab {

namespace {

constexpr std::size_t kStoredFailures = 100;

BigInt pow_big(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

BigInt ceil_of(const Rational& r) {
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), r.numerator().get_mpz_t(), r.denominator().get_mpz_t());
    return q;
}

// Number of nondecreasing k-tuples from n items, saturating at `cap`.
std::uint64_t multiset_count(std::uint64_t n, unsigned k, std::uint64_t cap) {
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), n + k - 1, k);
    return c > cap ? cap + 1 : to_u64(c);
}

} // namespace

BigInt c23(unsigned s) {
    if (s < 1 || s > 12) throw std::invalid_argument("c23: s must lie in [1, 12]");
    BigInt c = 1;
    for (unsigned i = 1; i < s; ++i) c *= pow_big(BigInt(2 * (i + 1)), 1ul << i);
    return c;
}

void DeltaQuery::validate() const {
    if (primes.size() != s)
        throw std::invalid_argument("delta: expected " + std::to_string(s) + " primes, got " +
                                    std::to_string(primes.size()));
    if (n < 1) throw std::invalid_argument("delta: n must be positive");
    if (d < 1 || mpz_even_p(d.get_mpz_t())) throw std::invalid_argument("delta: d must be a positive odd integer");
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (primes[i] == 2 || !is_prime(primes[i]))
            throw std::invalid_argument("delta: " + primes[i].get_str() + " is not an odd prime");
        if (i > 0 && primes[i] < primes[i - 1]) throw std::invalid_argument("delta: primes must be nondecreasing");
    }
}

Rational delta_lower_bound(const DeltaQuery& q) {
    if (q.s == 0) throw std::invalid_argument("delta: s must be >= 1 (use c24 for the base case)");
    q.validate();
    const unsigned long top = 1ul << q.s;
    BigInt den = c23(q.s) * pow_big(q.n, top);
    for (unsigned i = 1; i <= q.s; ++i) den *= pow_big(q.primes[i - 1] - 1, top - (1ul << (q.s - i)));
    return Rational(BigInt(1), den);
}

DeltaOracleReport delta_oracle(const std::vector<BigInt>& primes, unsigned exponent_cap,
                               const std::vector<BigInt>& m_candidates) {
    const unsigned s = static_cast<unsigned>(primes.size());
    if (s < 1 || s > 3) throw std::invalid_argument("delta_oracle: s must lie in [1, 3]");
    if (exponent_cap > 6) throw std::invalid_argument("delta_oracle: exponent_cap must be <= 6");
    DeltaQuery shape{s, 1, 1, primes};
    shape.validate();
    if (primes.back() > 13) throw std::invalid_argument("delta_oracle: primes must be <= 13");
    for (const auto& m : m_candidates) {
        if (m <= 1) throw std::invalid_argument("delta_oracle: m must exceed 1");
        for (const auto& pp : factorize(m).factors())
            if (pp.prime <= primes.back())
                throw std::invalid_argument("delta_oracle: prime factors of m must exceed p_s");
    }

    // h(p_i^e) for e in [0, cap].
    std::vector<std::vector<Rational>> hp(s);
    for (unsigned i = 0; i < s; ++i)
        for (unsigned e = 0; e <= exponent_cap; ++e) hp[i].push_back(abundancy_prime_power(primes[i], e));

    const unsigned side = exponent_cap + 1;
    std::size_t tuples = 1;
    for (unsigned i = 0; i < s; ++i) tuples *= side;
    auto decode = [&](std::size_t code) {
        std::vector<unsigned> e(s);
        for (unsigned i = 0; i < s; ++i, code /= side) e[i] = static_cast<unsigned>(code % side);
        return e;
    };
    std::vector<Rational> products(tuples);
    for (std::size_t code = 0; code < tuples; ++code) {
        Rational v = 1;
        auto e = decode(code);
        for (unsigned i = 0; i < s; ++i) v = v * hp[i][e[i]];
        products[code] = v;
    }

    DeltaOracleReport report;
    std::optional<Rational> tightest_ratio;
    for (const auto& m : m_candidates) {
        const Factorization fm = factorize(m);
        for (std::size_t code = 0; code < tuples; ++code) {
            DeltaInstance inst;
            inst.primes = primes;
            inst.m = m;
            inst.exponents = decode(code);
            std::vector<PrimePower> pps(fm.factors().begin(), fm.factors().end());
            for (unsigned i = 0; i < s; ++i)
                if (inst.exponents[i] > 0) pps.push_back({primes[i], inst.exponents[i]});
            inst.target = abundancy(Factorization::from_prime_powers(std::move(pps)));
            inst.bound = delta_lower_bound(DeltaQuery{s, inst.target.numerator(), inst.target.denominator(), primes});
            for (std::size_t c2 = 0; c2 < tuples; ++c2) {
                Rational gap = inst.target - products[c2];
                if (gap <= Rational(0)) continue;
                if (!inst.min_gap || gap < *inst.min_gap) {
                    inst.min_gap = gap;
                    inst.witness = decode(c2);
                }
            }
            ++report.instances;
            if (!inst.min_gap) continue;
            inst.holds = *inst.min_gap >= inst.bound;
            Rational ratio = *inst.min_gap / inst.bound;
            if (!tightest_ratio || ratio < *tightest_ratio) {
                tightest_ratio = ratio;
                report.tightest = inst;
            }
            if (!inst.holds) {
                ++report.violations;
                if (report.failures.size() < kStoredFailures) report.failures.push_back(inst);
            }
        }
    }
    return report;
}

std::vector<C24Step> c24_table(unsigned s, const BigInt& n, const C24Options& opt) {
    if (s > 4) throw std::invalid_argument("c24: s must be <= 4");
    if (n < 1 || n > 100) throw std::invalid_argument("c24: n must lie in [1, 100]");
    std::vector<C24Step> steps;
    steps.push_back(C24Step{0, Rational(BigInt(1), n), Rational(0), {}, false});

    for (unsigned t = 1; t <= s; ++t) {
        const Rational& prev = steps.back().value;
        C24Step step;
        step.s = t;
        step.threshold = Rational(2) * Rational(n, BigInt(1)) / prev;
        step.value = prev / Rational(2);
        step.halved = true;
        const BigInt below = ceil_of(step.threshold);  // primes p < threshold  <=>  p < below

        auto consider = [&](std::vector<BigInt> ps) {
            Rational d = delta_lower_bound(DeltaQuery{t, n, 1, ps});
            if (d < step.value) {
                step.value = d;
                step.minimizer = std::move(ps);
                step.halved = false;
            }
        };

        if (opt.mode == C24Mode::monotone) {
            if (mpz_sizeinbase(below.get_mpz_t(), 2) > opt.max_threshold_bits)
                throw std::invalid_argument("c24: threshold exceeds " + std::to_string(opt.max_threshold_bits) +
                                            " bits");
            BigInt p = prev_prime(below);
            if (p >= 3) consider(std::vector<BigInt>(t, p));
        } else {
            if (below > opt.max_prime_limit)
                throw std::invalid_argument("c24: threshold " + below.get_str() +
                                            " exceeds the prime enumeration limit; use monotone mode");
            std::vector<BigInt> odd;
            for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(to_u64(below))))
                if (p != 2 && p < below) odd.push_back(p);
            if (!odd.empty()) {
                if (multiset_count(odd.size(), t, opt.budget) > opt.budget)
                    throw std::invalid_argument("c24: prime multiset enumeration exceeds the budget of " +
                                                std::to_string(opt.budget));
                std::vector<std::size_t> idx(t, 0);
                for (;;) {
                    std::vector<BigInt> ps;
                    for (auto i : idx) ps.push_back(odd[i]);
                    consider(std::move(ps));
                    std::size_t j = t;
                    while (j > 0 && idx[j - 1] == odd.size() - 1) --j;
                    if (j == 0) break;
                    ++idx[j - 1];
                    for (std::size_t k = j; k < t; ++k) idx[k] = idx[j - 1];
                }
            }
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

Rational c24(unsigned s, const BigInt& n, const C24Options& opt) { return c24_table(s, n, opt).back().value; }

Interval threshold_small_prime(const Interval& C, unsigned k, const Interval& Q) {
    const mpfr_prec_t prec = std::max(C.precision(), Q.precision());
    if (!C.positive()) throw std::invalid_argument("threshold: C must be positive");
    if (mpfr_cmp_ui(Q.lo().get(), 16) < 0)
        throw std::invalid_argument("threshold: Q must be >= 16");
    Interval lq = log(Q);
    Interval ratio = lq / log(lq);
    Interval root = pow(ratio, Interval::from_int(1, prec) / Interval::from_int(2 * static_cast<long>(k) + 4, prec));
    return exp(C * root);
}

std::string to_string(BoundKind k) {
    switch (k) {
    case BoundKind::matveev_c1: return "matveev_c1";
    case BoundKind::matveev_lower: return "matveev_lower";
    case BoundKind::siegel: return "siegel";
    case BoundKind::c23: return "c23";
    case BoundKind::delta_lower: return "delta_lower";
    case BoundKind::c24: return "c24";
    case BoundKind::threshold: return "threshold";
    }
    return "unknown";
}

} // namespace sigmalab
