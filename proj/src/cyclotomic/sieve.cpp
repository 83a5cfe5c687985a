#include "sigmalab/cyclotomic.hpp"
#include "sigmalab/parallel.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace sigmalab {

namespace {

constexpr std::uint64_t kChunk = 1u << 16;
constexpr std::size_t kMaxQPrimes = 20;

std::vector<BigInt> selected_primes(const SieSpec& spec) {
    std::vector<BigInt> out;
    for (std::size_t i : spec.subset) out.push_back(spec.q_primes[i - 1]);
    return out;
}

// Divides every q of the subset out of `value`; returns the exponent vector if
// value was exactly a product of all of them with positive exponents.
std::optional<std::vector<std::pair<std::size_t, unsigned>>> smooth_over(BigInt value, const SieSpec& spec,
                                                                         std::span<const BigInt> qs) {
    std::vector<std::pair<std::size_t, unsigned>> exps;
    for (std::size_t j = 0; j < qs.size(); ++j) {
        if (!mpz_divisible_p(value.get_mpz_t(), qs[j].get_mpz_t())) return std::nullopt;
        unsigned a = remove_factor(value, qs[j]);
        exps.emplace_back(spec.subset[j], a);
    }
    if (value != 1) return std::nullopt;
    return exps;
}

} // namespace

void SieSpec::validate() const {
    if (e < 2) throw std::invalid_argument("sieve: exponent e must be >= 2");
    if (limit < 2) throw std::invalid_argument("sieve: limit must be >= 2");
    if (subset.empty()) throw std::invalid_argument("sieve: index subset must be nonempty");
    for (std::size_t i = 0; i < q_primes.size(); ++i) {
        if (!is_prime(q_primes[i])) throw std::invalid_argument("sieve: " + q_primes[i].get_str() + " is not prime");
        if (i > 0 && q_primes[i] <= q_primes[i - 1])
            throw std::invalid_argument("sieve: q primes must be strictly increasing");
    }
    for (std::size_t j = 0; j < subset.size(); ++j) {
        if (subset[j] < 1 || subset[j] > q_primes.size())
            throw std::invalid_argument("sieve: subset index " + std::to_string(subset[j]) + " out of range");
        if (j > 0 && subset[j] <= subset[j - 1])
            throw std::invalid_argument("sieve: subset indices must be strictly increasing");
    }
}

BigInt SieSpec::q_max_subset() const {
    BigInt m = 0;
    for (std::size_t i : subset) m = std::max(m, q_primes[i - 1]);
    return m;
}

BigInt SieSpec::q_max() const { return q_primes.empty() ? BigInt(0) : q_primes.back(); }

bool SiePrime::revalidate(std::span<const BigInt> q_primes) const {
    if (!is_prime_u64(p) || e < 2) return false;
    BigInt product = 1, power;
    for (auto [i, a] : exponents) {
        if (i < 1 || i > q_primes.size() || a < 1) return false;
        mpz_pow_ui(power.get_mpz_t(), q_primes[i - 1].get_mpz_t(), a);
        product *= power;
    }
    BigInt expected = repunit(from_u64(p), e);
    return product == expected && certificate == expected;
}

std::vector<SiePrime> enumerate_sie(const SieSpec& spec, unsigned workers) {
    spec.validate();
    const auto qs = selected_primes(spec);
    const std::uint64_t chunks = (spec.limit + kChunk) / kChunk;
    std::vector<std::vector<SiePrime>> partial(chunks);

    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::uint64_t lo = c * kChunk, hi = std::min<std::uint64_t>(spec.limit + 1, lo + kChunk);
        for (std::uint64_t p = std::max<std::uint64_t>(lo, 2); p < hi; ++p) {
            if (!is_prime_u64(p)) continue;
            BigInt value = repunit(from_u64(p), spec.e);
            if (auto exps = smooth_over(value, spec, qs))
                partial[c].push_back(SiePrime{p, spec.e, std::move(*exps), std::move(value)});
        }
    });

    std::vector<SiePrime> out;
    for (auto& part : partial)
        for (auto& sp : part) out.push_back(std::move(sp));
    return out;
}

std::vector<SiePrime> enumerate_sie_by_products(const SieSpec& spec) {
    spec.validate();
    const auto qs = selected_primes(spec);
    const BigInt bound = repunit(from_u64(spec.limit), spec.e);
    std::vector<SiePrime> out;

    // Depth-first over exponent vectors with every a_i >= 1.
    std::vector<unsigned> exps(qs.size(), 1);
    BigInt start = 1;
    for (const auto& q : qs) start *= q;
    if (start > bound) return out;

    auto invert = [&](const BigInt& value) {
        BigInt p;
        if (spec.e == 2) {
            p = value - 1;
        } else {
            // p^{e-1} < repunit(p, e) < (p+1)^{e-1} for e >= 3
            mpz_root(p.get_mpz_t(), value.get_mpz_t(), spec.e - 1);
        }
        if (p < 2 || p > spec.limit || !is_prime(p)) return;
        if (repunit(p, spec.e) != value) return;
        SiePrime sp{to_u64(p), spec.e, {}, value};
        for (std::size_t j = 0; j < qs.size(); ++j) sp.exponents.emplace_back(spec.subset[j], exps[j]);
        out.push_back(std::move(sp));
    };

    auto recurse = [&](auto&& self, std::size_t j, const BigInt& value) -> void {
        if (j == qs.size()) {
            invert(value);
            return;
        }
        BigInt v = value;
        unsigned saved = exps[j];
        for (;;) {
            self(self, j + 1, v);
            v *= qs[j];
            if (v > bound) break;
            ++exps[j];
        }
        exps[j] = saved;
    };
    recurse(recurse, 0, start);

    std::sort(out.begin(), out.end(), [](const SiePrime& a, const SiePrime& b) { return a.p < b.p; });
    return out;
}

std::map<SieKey, std::vector<SiePrime>> enumerate_s_union(std::span<const BigInt> q_primes, std::uint64_t limit,
                                                           unsigned e_max, unsigned workers) {
    if (e_max < 2) throw std::invalid_argument("sieve: e_max must be >= 2");
    if (q_primes.size() > kMaxQPrimes)
        throw std::invalid_argument("sieve: at most " + std::to_string(kMaxQPrimes) + " q primes supported");
    std::map<SieKey, std::vector<SiePrime>> out;
    const std::size_t k = q_primes.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        SieSpec spec;
        spec.q_primes.assign(q_primes.begin(), q_primes.end());
        spec.limit = limit;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) spec.subset.push_back(i + 1);
        for (unsigned e = 2; e <= e_max; ++e) {
            spec.e = e;
            auto found = enumerate_sie(spec, workers);
            if (!found.empty()) out.emplace(SieKey{spec.subset, e}, std::move(found));
        }
    }
    return out;
}

} // namespace sigmalab
