#include "sigmalab/search.hpp"
#include "sigmalab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigmalab {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kMaxSquareRange = std::uint64_t{1} << 56;

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

// sigma of a word-sized integer; always fits in 128 bits.
u128 sigma128(const SmallFactors& f) {
    u128 result = 1;
    for (auto [p, e] : f) {
        u128 term = 1, power = 1;
        for (unsigned i = 0; i < e; ++i) {
            power *= p;
            term += power;
        }
        result *= term;
    }
    return result;
}

u128 sigma128(std::uint64_t n) { return sigma128(factorize_u64(n)); }

BigInt big(u128 v) {
    BigInt hi = from_u64(static_cast<std::uint64_t>(v >> 64));
    return (hi << 64) + from_u64(static_cast<std::uint64_t>(v));
}

bool parity_ok(Parity p, std::uint64_t n) {
    return p == Parity::any || (p == Parity::even) == (n % 2 == 0);
}

bool is_power_of_two(const BigInt& n) { return n > 0 && mpz_popcount(n.get_mpz_t()) == 1; }

} // namespace

std::string to_string(SearchKind k) {
    switch (k) {
    case SearchKind::superperfect: return "superperfect";
    case SearchKind::super_multiply_perfect: return "super_multiply_perfect";
    case SearchKind::sigma_prime_power: return "sigma_prime_power";
    case SearchKind::pomerance_divisor: return "pomerance_divisor";
    case SearchKind::pair_system: return "pair_system";
    }
    return "unknown";
}

std::string to_string(Parity p) {
    switch (p) {
    case Parity::any: return "any";
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    }
    return "unknown";
}

SearchKind parse_search_kind(const std::string& s) {
    for (auto k : {SearchKind::superperfect, SearchKind::super_multiply_perfect, SearchKind::sigma_prime_power,
                   SearchKind::pomerance_divisor, SearchKind::pair_system})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown search kind '" + s + "'");
}

Parity parse_parity(const std::string& s) {
    for (auto p : {Parity::any, Parity::even, Parity::odd})
        if (to_string(p) == s) return p;
    throw std::invalid_argument("parity must be any, even or odd (got '" + s + "')");
}

void SearchTask::validate() const {
    if (range_lo < 1) throw std::invalid_argument("search: range must start at 1 or above");
    if (range_lo > range_hi) throw std::invalid_argument("search: range_lo exceeds range_hi");
    if (chunk_size < 1) throw std::invalid_argument("search: chunk size must be positive");
    if (square_only) {
        if (kind != SearchKind::superperfect) throw std::invalid_argument("search: square-only applies to superperfect");
        if (range_hi > kMaxSquareRange) throw std::invalid_argument("search: square-only range limited to 2^56");
    } else if (range_hi > kMaxRange) {
        throw std::invalid_argument("search: range limited to 2^40");
    }
    if (k && kind != SearchKind::super_multiply_perfect) throw std::invalid_argument("search: k applies to smp only");
    if (k && *k < 1) throw std::invalid_argument("search: k must be >= 1");
    if (kind == SearchKind::pair_system && (a < 1 || b < 1))
        throw std::invalid_argument("search: a and b must be >= 1");
    if (kind == SearchKind::pomerance_divisor && pe_max < 2)
        throw std::invalid_argument("search: prime power bound must be >= 2");
}

const Factorization* SearchRecord::certificate(const std::string& name) const {
    for (const auto& [key, f] : certificates)
        if (key == name) return &f;
    return nullptr;
}

bool SearchRecord::revalidate() const {
    const auto* fn = certificate("N");
    const auto* fs = certificate("sigma(N)");
    if (!fn || !fs || fn->value() != N || sigma(*fn) != fs->value()) return false;
    if (omega(*fs) != omega_sigma_n) return false;
    const BigInt& s = fs->value();
    switch (kind) {
    case SearchKind::superperfect:
    case SearchKind::super_multiply_perfect:
    case SearchKind::sigma_prime_power: {
        const auto* fss = certificate("sigma(sigma(N))");
        if (!fss || !k || sigma(*fs) != fss->value() || fss->value() != *k * N) return false;
        if (kind == SearchKind::superperfect) return *k == 2;
        if (kind == SearchKind::sigma_prime_power) return fs->factors().size() == 1;
        return true;
    }
    case SearchKind::pomerance_divisor: {
        const auto* fpe = certificate("sigma(p^e)");
        if (!fpe || !prime || exponent < 1 || !is_prime(*prime)) return false;
        BigInt pe;
        mpz_pow_ui(pe.get_mpz_t(), prime->get_mpz_t(), exponent);
        return s % pe == 0 && repunit(*prime, exponent + 1) == fpe->value() && fpe->value() % N == 0 &&
               label == pomerance_family(N);
    }
    case SearchKind::pair_system: {
        const auto* fm = certificate("M");
        const auto* fsm = certificate("sigma(M)");
        if (!fm || !fsm || !M || !a || !b || fm->value() != *M) return false;
        return s == *a * *M && sigma(*fm) == fsm->value() && fsm->value() == *b * N;
    }
    }
    return false;
}

SearchPlan::SearchPlan(SearchTask task) : task_(std::move(task)) {
    task_.validate();
    if (task_.square_only) {
        first_ = isqrt(task_.range_lo - 1) + 1;
        last_ = isqrt(task_.range_hi) + 1;
    } else {
        first_ = task_.range_lo;
        last_ = task_.range_hi + 1;
        for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(isqrt(task_.range_hi))))
            sieve_primes_.push_back(p);
    }
    chunks_ = last_ > first_ ? (last_ - first_ + task_.chunk_size - 1) / task_.chunk_size : 0;
}

std::vector<SearchRecord> SearchPlan::run_chunk(std::uint64_t c) const {
    if (c >= chunks_) throw std::out_of_range("search: chunk index out of range");
    const std::uint64_t lo = first_ + c * task_.chunk_size;
    const std::uint64_t hi = std::min(last_, lo + task_.chunk_size);
    std::vector<SearchRecord> out;
    if (task_.square_only)
        scan_squares(lo, hi, out);
    else
        scan_plain(lo, hi, out);
    return out;
}

// Segmented sieve of sigma over [lo, hi).
void SearchPlan::scan_plain(std::uint64_t lo, std::uint64_t hi, std::vector<SearchRecord>& out) const {
    const std::size_t len = hi - lo;
    std::vector<std::uint64_t> rem(len), sig(len, 1);
    for (std::size_t i = 0; i < len; ++i) rem[i] = lo + i;
    for (std::uint64_t p : sieve_primes_) {
        if (p * p >= hi) break;
        for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
            std::uint64_t& r = rem[m - lo];
            std::uint64_t term = 1, power = 1;
            do {
                r /= p;
                power *= p;
                term += power;
            } while (r % p == 0);
            sig[m - lo] *= term;
        }
    }
    for (std::size_t i = 0; i < len; ++i) {
        if (rem[i] > 1) sig[i] *= rem[i] + 1;
        const std::uint64_t n = lo + i;
        if (parity_ok(task_.parity, n)) examine(n, sig[i], out);
    }
}

void SearchPlan::scan_squares(std::uint64_t lo, std::uint64_t hi, std::vector<SearchRecord>& out) const {
    for (std::uint64_t m = lo; m < hi; ++m) {
        if (!parity_ok(task_.parity, m)) continue;
        SmallFactors f = factorize_u64(m);
        for (auto& pe : f) pe.second *= 2;
        u128 s = sigma128(f);
        // Superperfect needs sigma(N) < 2N, which also keeps s in 64 bits.
        if (s >= 2 * static_cast<u128>(m) * m) continue;
        examine(m * m, static_cast<std::uint64_t>(s), out);
    }
}

void SearchPlan::examine(std::uint64_t n, std::uint64_t s, std::vector<SearchRecord>& out) const {
    auto base = [&](SearchKind kind) {
        SearchRecord r;
        r.kind = kind;
        r.N = from_u64(n);
        Factorization fs = factorize(s);
        r.omega_sigma_n = omega(fs);
        r.certificates.emplace_back("N", factorize(n));
        r.certificates.emplace_back("sigma(N)", std::move(fs));
        return r;
    };
    auto with_sigma2 = [&](SearchKind kind, u128 ss) {
        SearchRecord r = base(kind);
        r.k = big(ss / n);
        r.certificates.emplace_back("sigma(sigma(N))", factorize(big(ss)));
        return r;
    };

    switch (task_.kind) {
    case SearchKind::superperfect: {
        if (s >= 2 * n) return;  // sigma(M) > M for M > 1
        u128 ss = sigma128(s);
        if (ss == 2 * static_cast<u128>(n)) out.push_back(with_sigma2(SearchKind::superperfect, ss));
        return;
    }
    case SearchKind::super_multiply_perfect: {
        u128 ss = sigma128(s);
        if (ss % n != 0 || (task_.k && ss / n != *task_.k)) return;
        out.push_back(with_sigma2(SearchKind::super_multiply_perfect, ss));
        return;
    }
    case SearchKind::sigma_prime_power: {
        if (n == 1) return;
        SmallFactors fs = factorize_u64(s);
        if (fs.size() != 1) return;
        u128 ss = sigma128(fs);
        if (ss % n != 0) return;
        SearchRecord r = with_sigma2(SearchKind::sigma_prime_power, ss);
        std::uint64_t m = 0;
        while ((std::uint64_t{1} << m) < n) ++m;
        bool even_sp = (std::uint64_t{1} << m) == n && ss == 2 * static_cast<u128>(n);
        r.label = even_sp ? "even_superperfect" : "exceptional";
        out.push_back(std::move(r));
        return;
    }
    case SearchKind::pomerance_divisor: {
        std::vector<std::pair<u128, SearchRecord>> hits;
        for (auto [p, e] : factorize_u64(s)) {
            u128 pe = 1;
            for (unsigned j = 1; j <= e; ++j) {
                pe *= p;
                if (pe > task_.pe_max) break;
                u128 sp = (pe * p - 1) / (p - 1);
                if (sp % n != 0) continue;
                SearchRecord r = base(SearchKind::pomerance_divisor);
                r.prime = from_u64(p);
                r.exponent = j;
                r.label = pomerance_family(r.N);
                r.certificates.emplace_back("sigma(p^e)", factorize(big(sp)));
                hits.emplace_back(pe, std::move(r));
            }
        }
        std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (auto& h : hits) out.push_back(std::move(h.second));
        return;
    }
    case SearchKind::pair_system: {
        if (s % task_.a != 0) return;
        const std::uint64_t m = s / task_.a;
        const u128 target = static_cast<u128>(task_.b) * n;
        if (m > 1 && m + 1 > target) return;
        u128 sm = sigma128(m);
        if (sm != target) return;
        SearchRecord r = base(SearchKind::pair_system);
        r.M = from_u64(m);
        r.a = from_u64(task_.a);
        r.b = from_u64(task_.b);
        r.certificates.emplace_back("M", factorize(m));
        r.certificates.emplace_back("sigma(M)", factorize(big(sm)));
        out.push_back(std::move(r));
        return;
    }
    }
}

void run_chunks(const SearchPlan& plan, std::uint64_t first, std::uint64_t last, unsigned workers,
                const ChunkSink& sink) {
    last = std::min(last, plan.chunk_count());
    workers = std::max(1u, workers);
    const std::uint64_t batch = std::uint64_t{workers} * 2;
    for (std::uint64_t b = first; b < last; b += batch) {
        const std::uint64_t count = std::min(batch, last - b);
        std::vector<std::vector<SearchRecord>> results(count);
        parallel_for(count, workers, [&](std::size_t i) { results[i] = plan.run_chunk(b + i); });
        for (std::uint64_t i = 0; i < count; ++i) sink(b + i, std::move(results[i]));
    }
}

std::vector<SearchRecord> run_search(const SearchTask& task, unsigned workers) {
    SearchPlan plan(task);
    std::vector<SearchRecord> out;
    run_chunks(plan, 0, plan.chunk_count(), workers, [&](std::uint64_t, std::vector<SearchRecord>&& recs) {
        for (auto& r : recs) out.push_back(std::move(r));
    });
    return out;
}

namespace {

std::vector<SearchRecord> run_kind(SearchTask task, SearchKind kind, unsigned workers) {
    task.kind = kind;
    return run_search(task, workers);
}

} // namespace

std::vector<SearchRecord> search_superperfect(SearchTask task, unsigned workers) {
    return run_kind(std::move(task), SearchKind::superperfect, workers);
}
std::vector<SearchRecord> search_smp(SearchTask task, unsigned workers) {
    return run_kind(std::move(task), SearchKind::super_multiply_perfect, workers);
}
std::vector<SearchRecord> search_sigma_prime_power(SearchTask task, unsigned workers) {
    return run_kind(std::move(task), SearchKind::sigma_prime_power, workers);
}
std::vector<SearchRecord> search_pomerance(SearchTask task, unsigned workers) {
    return run_kind(std::move(task), SearchKind::pomerance_divisor, workers);
}
std::vector<SearchRecord> search_pairs(SearchTask task, unsigned workers) {
    return run_kind(std::move(task), SearchKind::pair_system, workers);
}

std::string pomerance_family(const BigInt& n) {
    if (is_power_of_two(n) && is_prime(BigInt(2 * n - 1))) return "power_of_two";
    if (is_power_of_two(BigInt(n + 1)) && is_prime(n)) return "mersenne";
    return "exceptional";
}

StructureReport verify_structure(const std::vector<SearchRecord>& records) {
    StructureReport rep;
    for (const auto& r : records) {
        if (r.kind != SearchKind::superperfect) continue;
        ++rep.checked;
        if (mpz_odd_p(r.N.get_mpz_t())) {
            Factorization f = factorize(r.N);
            if (!f.is_square()) rep.findings.push_back({r.N, "odd superperfect hit is not a square"});
            else if (omega(f) < 2) rep.findings.push_back({r.N, "odd superperfect hit has fewer than two prime factors"});
        } else {
            if (!is_power_of_two(r.N)) {
                rep.findings.push_back({r.N, "even superperfect hit is not a power of two"});
            } else if (!is_prime(BigInt(2 * r.N - 1))) {
                rep.findings.push_back({r.N, "2^(m+1) - 1 is not prime"});
            }
        }
    }
    return rep;
}

} // namespace sigmalab
