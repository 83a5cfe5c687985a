#include "sigmalab/bounds.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace sigmalab {

namespace {

constexpr std::uint64_t kExhaustiveBudget = 2'000'000;

// Rows are primes, columns are values; entry = exponent of the prime in r_j.
std::vector<std::vector<long>> exponent_matrix(const std::vector<FactoredRational>& values) {
    std::map<BigInt, std::size_t> row_of;
    for (const auto& v : values) {
        for (const auto& pp : v.num.factors()) row_of.emplace(pp.prime, 0);
        for (const auto& pp : v.den.factors()) row_of.emplace(pp.prime, 0);
    }
    std::size_t r = 0;
    for (auto& [p, idx] : row_of) idx = r++;
    std::vector<std::vector<long>> m(row_of.size(), std::vector<long>(values.size(), 0));
    for (std::size_t j = 0; j < values.size(); ++j) {
        for (const auto& pp : values[j].num.factors()) m[row_of[pp.prime]][j] += pp.exponent;
        for (const auto& pp : values[j].den.factors()) m[row_of[pp.prime]][j] -= pp.exponent;
    }
    return m;
}

BigInt max_norm(const std::vector<BigInt>& v) {
    BigInt m = 0;
    for (const auto& x : v) m = std::max(m, BigInt(abs(x)));
    return m;
}

void normalize_sign(std::vector<BigInt>& v) {
    for (const auto& x : v) {
        if (x == 0) continue;
        if (sgn(x) < 0)
            for (auto& y : v) y = -y;
        return;
    }
}

// Rational kernel basis by reduced row echelon form, each vector scaled to
// primitive integers.
std::vector<std::vector<BigInt>> kernel_basis(const std::vector<std::vector<long>>& m, std::size_t cols) {
    std::vector<std::vector<mpq_class>> a(m.size(), std::vector<mpq_class>(cols));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = m[i][j];

    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t sel = row;
        while (sel < a.size() && a[sel][c] == 0) ++sel;
        if (sel == a.size()) continue;
        std::swap(a[row], a[sel]);
        mpq_class inv = 1 / a[row][c];
        for (auto& x : a[row]) x *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == row || a[i][c] == 0) continue;
            mpq_class f = a[i][c];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[row][j];
        }
        pivot_col.push_back(c);
        ++row;
    }

    std::vector<std::vector<BigInt>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (std::find(pivot_col.begin(), pivot_col.end(), f) != pivot_col.end()) continue;
        std::vector<mpq_class> v(cols, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -a[r][f];
        BigInt l = 1;
        for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
        std::vector<BigInt> iv;
        BigInt g = 0;
        for (const auto& x : v) {
            BigInt y = x.get_num() * (l / x.get_den());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), y.get_mpz_t());
            iv.push_back(std::move(y));
        }
        for (auto& y : iv) y /= g;
        normalize_sign(iv);
        basis.push_back(std::move(iv));
    }
    return basis;
}

std::uint64_t box_size(std::size_t m, unsigned bound) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < m; ++i) {
        if (total > kExhaustiveBudget) return total;
        total *= 2 * std::uint64_t{bound} + 1;
    }
    return total;
}

} // namespace

BigInt siegel_bound(unsigned s, const BigInt& A) {
    if (s < 1) throw std::invalid_argument("siegel_bound: s must be >= 1");
    if (A < 1) throw std::invalid_argument("siegel_bound: A must be >= 1");
    BigInt x, t;
    mpz_ui_pow_ui(x.get_mpz_t(), s + 1, s);
    mpz_pow_ui(t.get_mpz_t(), A.get_mpz_t(), 2 * s);
    x *= t;
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    if (r * r < x) r += 1;
    return r;
}

FactoredRational FactoredRational::from_rational(const Rational& r) {
    if (sgn(r.raw()) <= 0) throw std::invalid_argument("relation: values must be positive rationals");
    return {factorize(r.numerator()), factorize(r.denominator())};
}

Rational FactoredRational::value() const { return Rational(num.value(), den.value()); }

bool relation_holds(const std::vector<FactoredRational>& values, const std::vector<BigInt>& b) {
    if (b.size() != values.size()) return false;
    mpq_class prod = 1;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (b[j] == 0) continue;
        BigInt num = values[j].num.value(), den = values[j].den.value();
        if (sgn(b[j]) < 0) std::swap(num, den);
        unsigned long k = mpz_get_ui(BigInt(abs(b[j])).get_mpz_t());
        BigInt pn, pd;
        mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), k);
        mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), k);
        prod *= mpq_class(pn, pd);
        prod.canonicalize();
    }
    return prod == 1;
}

std::optional<std::vector<BigInt>> exhaustive_relation(const std::vector<FactoredRational>& values, unsigned bound) {
    const std::size_t m = values.size();
    if (m == 0) return std::nullopt;
    if (box_size(m, bound) > kExhaustiveBudget)
        throw std::invalid_argument("relation: exhaustive search box too large");
    const auto mat = exponent_matrix(values);
    std::vector<long> b(m);
    for (unsigned r = 1; r <= bound; ++r) {
        // Odometer over [-r, r]^m, keeping vectors of max-norm exactly r whose
        // first nonzero entry is positive.
        std::fill(b.begin(), b.end(), -static_cast<long>(r));
        for (;;) {
            long norm = 0;
            std::size_t first = m;
            for (std::size_t j = 0; j < m; ++j) {
                norm = std::max(norm, std::labs(b[j]));
                if (first == m && b[j] != 0) first = j;
            }
            if (norm == static_cast<long>(r) && first < m && b[first] > 0) {
                bool zero = true;
                for (const auto& row : mat) {
                    long acc = 0;
                    for (std::size_t j = 0; j < m; ++j) acc += row[j] * b[j];
                    if (acc != 0) { zero = false; break; }
                }
                if (zero) return std::vector<BigInt>(b.begin(), b.end());
            }
            std::size_t j = m;
            while (j > 0 && b[j - 1] == static_cast<long>(r)) b[--j] = -static_cast<long>(r);
            if (j == 0) break;
            ++b[j - 1];
        }
    }
    return std::nullopt;
}

std::optional<std::vector<BigInt>> find_multiplicative_relation(const std::vector<FactoredRational>& values) {
    if (values.size() < 2) throw std::invalid_argument("relation: need at least two values");
    const auto mat = exponent_matrix(values);
    auto basis = kernel_basis(mat, values.size());
    if (basis.empty()) return std::nullopt;

    auto best = *std::min_element(basis.begin(), basis.end(), [](const auto& x, const auto& y) {
        return max_norm(x) < max_norm(y);
    });
    // Small instances: look for a shorter combination below the current norm,
    // capped by the Siegel bound.
    BigInt norm = max_norm(best);
    if (norm > 1 && fits_u64(norm)) {
        long amax = 1;
        for (const auto& row : mat)
            for (long x : row) amax = std::max(amax, std::labs(x));
        const unsigned s = static_cast<unsigned>(std::max<std::size_t>(1, values.size() - 1));
        BigInt cap = std::min(BigInt(norm - 1), siegel_bound(s, BigInt(amax)));
        unsigned bound = static_cast<unsigned>(std::min<std::uint64_t>(to_u64(cap), 1000));
        if (box_size(values.size(), bound) <= kExhaustiveBudget)
            if (auto shorter = exhaustive_relation(values, bound)) best = std::move(*shorter);
    }
    if (!relation_holds(values, best)) throw std::logic_error("relation: kernel vector failed the product check");
    return best;
}

std::optional<std::vector<BigInt>> find_multiplicative_relation(const std::vector<Rational>& values) {
    std::vector<FactoredRational> fr;
    for (const auto& v : values) fr.push_back(FactoredRational::from_rational(v));
    return find_multiplicative_relation(fr);
}

} // namespace sigmalab
