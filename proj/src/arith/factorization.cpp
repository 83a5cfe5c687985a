#include "sigmalab/arith.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace sigmalab {

Factorization Factorization::from_prime_powers(std::vector<PrimePower> factors) {
    std::sort(factors.begin(), factors.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
    Factorization f;
    for (auto& pp : factors) {
        if (pp.exponent == 0) throw std::invalid_argument("factorization: zero exponent for " + pp.prime.get_str());
        if (!f.factors_.empty() && f.factors_.back().prime == pp.prime) {
            f.factors_.back().exponent += pp.exponent;
            continue;
        }
        if (!is_prime(pp.prime)) throw std::invalid_argument("factorization: " + pp.prime.get_str() + " is not prime");
        f.factors_.push_back(std::move(pp));
    }
    BigInt value = 1, power;
    for (const auto& pp : f.factors_) {
        mpz_pow_ui(power.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
        value *= power;
    }
    f.value_ = std::move(value);
    return f;
}

Factorization Factorization::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text == "1" || text.empty()) return Factorization{};
    std::vector<PrimePower> factors;
    while (!text.empty()) {
        auto star = text.find('*');
        std::string_view term = trim(text.substr(0, star));
        text = star == std::string_view::npos ? std::string_view{} : text.substr(star + 1);
        auto caret = term.find('^');
        std::string_view base = term.substr(0, caret);
        unsigned exponent = 1;
        if (caret != std::string_view::npos) {
            std::string_view exp = term.substr(caret + 1);
            auto [ptr, ec] = std::from_chars(exp.data(), exp.data() + exp.size(), exponent);
            if (ec != std::errc{} || ptr != exp.data() + exp.size())
                throw std::invalid_argument("factorization: bad exponent in '" + std::string(term) + "'");
        }
        BigInt p;
        if (base.empty() || p.set_str(std::string(base), 10) != 0)
            throw std::invalid_argument("factorization: bad prime in '" + std::string(term) + "'");
        factors.push_back({std::move(p), exponent});
    }
    return from_prime_powers(std::move(factors));
}

unsigned Factorization::exponent_of(const BigInt& p) const {
    auto it = std::lower_bound(factors_.begin(), factors_.end(), p,
                               [](const PrimePower& pp, const BigInt& q) { return pp.prime < q; });
    return it != factors_.end() && it->prime == p ? it->exponent : 0;
}

bool Factorization::is_square() const noexcept {
    return std::all_of(factors_.begin(), factors_.end(), [](const PrimePower& pp) { return pp.exponent % 2 == 0; });
}

Factorization Factorization::operator*(const Factorization& other) const {
    std::vector<PrimePower> merged(factors_.begin(), factors_.end());
    merged.insert(merged.end(), other.factors_.begin(), other.factors_.end());
    return from_prime_powers(std::move(merged));
}

std::string Factorization::to_string() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (const auto& pp : factors_) {
        if (!out.empty()) out += '*';
        out += pp.prime.get_str();
        if (pp.exponent != 1) out += '^' + std::to_string(pp.exponent);
    }
    return out;
}

Rational::Rational(const BigInt& num, const BigInt& den) {
    if (sgn(den) == 0) throw std::domain_error("rational: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational Rational::operator/(const Rational& o) const {
    if (sgn(o.q_) == 0) throw std::domain_error("rational: division by zero");
    return Rational(mpq_class(q_ / o.q_));
}

Rational Rational::parse(std::string_view text) {
    mpq_class q;
    if (text.empty() || q.set_str(std::string(text), 10) != 0 || sgn(q.get_den()) == 0)
        throw std::invalid_argument("rational: cannot parse '" + std::string(text) + "'");
    return Rational(std::move(q));
}

} // namespace sigmalab
