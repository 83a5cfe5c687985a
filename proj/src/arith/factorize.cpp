#include "sigmalab/arith.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace sigmalab {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr std::uint32_t kTrialBound = 256;
constexpr std::uint32_t kBigTrialBound = 1u << 14;

const std::vector<std::uint32_t>& trial_primes() {
    static const std::vector<std::uint32_t> primes = primes_up_to(kBigTrialBound);
    return primes;
}

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

// Brent's cycle-finding variant of Pollard rho on f(x) = x^2 + c.
u64 brent_rho_u64(u64 n, u64 c) {
    u64 y = 2, x = 2, ys = 2, q = 1, g = 1;
    const u64 m = 128;
    u64 r = 1;
    auto f = [&](u64 v) {
        u64 t = mulmod(v, v, n) + c;
        return t >= n ? t - n : t;
    };
    do {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        u64 k = 0;
        do {
            ys = y;
            for (u64 i = 0; i < std::min(m, r - k); ++i) {
                y = f(y);
                q = mulmod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
            k += m;
        } while (k < r && g == 1);
        r <<= 1;
    } while (g == 1);
    if (g == n) {
        do {
            ys = f(ys);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

void split_u64(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    for (u64 c = 1;; ++c) {
        u64 d = brent_rho_u64(n, c);
        if (d != n) {
            split_u64(d, out);
            split_u64(n / d, out);
            return;
        }
    }
}

void brent_rho_big(const BigInt& n, unsigned long c, BigInt& factor) {
    BigInt y = 2, x = 2, ys = 2, q = 1, g = 1, diff, tmp;
    const unsigned long m = 256;
    unsigned long r = 1;
    auto step = [&](BigInt& v) {
        mpz_mul(tmp.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
        mpz_add_ui(tmp.get_mpz_t(), tmp.get_mpz_t(), c);
        mpz_tdiv_r(v.get_mpz_t(), tmp.get_mpz_t(), n.get_mpz_t());
    };
    do {
        x = y;
        for (unsigned long i = 0; i < r; ++i) step(y);
        unsigned long k = 0;
        do {
            ys = y;
            unsigned long lim = std::min(m, r - k);
            for (unsigned long i = 0; i < lim; ++i) {
                step(y);
                mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
                mpz_mul(tmp.get_mpz_t(), q.get_mpz_t(), diff.get_mpz_t());
                mpz_tdiv_r(q.get_mpz_t(), tmp.get_mpz_t(), n.get_mpz_t());
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            k += m;
        } while (k < r && g == 1);
        r <<= 1;
    } while (g == 1);
    if (g == n) {
        do {
            step(ys);
            diff = x - ys;
            mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    factor = g;
}

void split_big(const BigInt& n, std::map<BigInt, unsigned>& out, unsigned mult) {
    if (n == 1) return;
    if (fits_u64(n)) {
        std::vector<u64> primes;
        split_u64(to_u64(n), primes);
        for (u64 p : primes) out[from_u64(p)] += mult;
        return;
    }
    if (is_prime(n)) {
        out[n] += mult;
        return;
    }
    if (mpz_perfect_power_p(n.get_mpz_t())) {
        for (unsigned long k = mpz_sizeinbase(n.get_mpz_t(), 2); k >= 2; --k) {
            BigInt root;
            if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) {
                split_big(root, out, mult * static_cast<unsigned>(k));
                return;
            }
        }
    }
    for (unsigned long c = 1;; ++c) {
        BigInt d;
        brent_rho_big(n, c, d);
        if (d != n) {
            BigInt rest = n / d;
            BigInt g = gcd(d, rest);
            if (g == 1) {
                split_big(d, out, mult);
                split_big(rest, out, mult);
            } else {
                // Keep the pieces coprime so multiplicities stay exact.
                std::map<BigInt, unsigned> sub;
                split_big(g, sub, 1);
                BigInt m = n;
                for (auto& [p, e] : sub) {
                    unsigned k = remove_factor(m, p);
                    out[p] += k * mult;
                }
                split_big(m, out, mult);
            }
            return;
        }
    }
}

} // namespace

SmallFactors factorize_u64(u64 n) {
    SmallFactors result;
    if (n == 0) throw std::domain_error("factorize: n must be positive");
    for (std::uint32_t p : trial_primes()) {
        if (p > kTrialBound) break;
        if (static_cast<u64>(p) * p > n) break;
        if (n % p == 0) {
            unsigned e = 0;
            do {
                n /= p;
                ++e;
            } while (n % p == 0);
            result.emplace_back(p, e);
        }
    }
    if (n == 1) return result;
    if (n < static_cast<u64>(kTrialBound) * kTrialBound || is_prime_u64(n)) {
        result.emplace_back(n, 1);
        return result;
    }
    std::vector<u64> primes;
    split_u64(n, primes);
    std::sort(primes.begin(), primes.end());
    for (u64 p : primes) {
        if (!result.empty() && result.back().first == p)
            ++result.back().second;
        else
            result.emplace_back(p, 1);
    }
    return result;
}

Factorization factorize(const BigInt& n) {
    if (sgn(n) <= 0) throw std::domain_error("factorize: n must be positive, got " + n.get_str());
    std::vector<PrimePower> factors;
    if (fits_u64(n)) {
        for (auto [p, e] : factorize_u64(to_u64(n))) factors.push_back({from_u64(p), e});
        return Factorization::from_prime_powers(std::move(factors));
    }
    BigInt m = n;
    std::map<BigInt, unsigned> found;
    for (std::uint32_t p : trial_primes()) {
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            unsigned e = 0;
            while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
                mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
                ++e;
            }
            found[from_u64(p)] += e;
        }
    }
    split_big(m, found, 1);
    for (auto& [p, e] : found) factors.push_back({p, e});
    return Factorization::from_prime_powers(std::move(factors));
}

Factorization factorize(std::uint64_t n) { return factorize(from_u64(n)); }

unsigned remove_factor(BigInt& n, const BigInt& p) {
    if (sgn(n) == 0) throw std::domain_error("remove_factor: zero has unbounded multiplicity");
    return static_cast<unsigned>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

} // namespace sigmalab
