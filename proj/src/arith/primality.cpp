#include "sigmalab/arith.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace sigmalab {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

bool strong_probable_prime(u64 n, u64 a, u64 d, unsigned r) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned i = 1; i < r; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    static constexpr std::array<u64, 12> kBases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : kBases) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 41 * 41) return true;
    u64 d = n - 1;
    unsigned r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // The first twelve prime bases are a deterministic witness set below 3.3e24.
    for (u64 a : kBases)
        if (!strong_probable_prime(n, a, d, r)) return false;
    return true;
}

bool is_prime(const BigInt& n) {
    if (sgn(n) <= 0) return false;
    if (fits_u64(n)) return is_prime_u64(to_u64(n));
    // BPSW followed by extra Miller-Rabin rounds.
    return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

BigInt prev_prime(const BigInt& bound) {
    if (bound <= 2) return 0;
    BigInt c = bound - 1;
    if (c == 2) return c;
    if (mpz_even_p(c.get_mpz_t())) c -= 1;
    for (; c >= 3; c -= 2)
        if (is_prime(c)) return c;
    return 2;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
    std::vector<std::uint32_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

bool fits_u64(const BigInt& n) { return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

std::uint64_t to_u64(const BigInt& n) {
    if (!fits_u64(n)) throw std::overflow_error("integer does not fit in 64 bits: " + n.get_str());
    static_assert(sizeof(unsigned long) == 8, "LP64 expected");
    return mpz_get_ui(n.get_mpz_t());
}

BigInt from_u64(std::uint64_t n) {
    BigInt r;
    mpz_set_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

} // namespace sigmalab
