#include <doctest.h>

#include <map>
#include <set>

#include "sigmalab/search.hpp"

using namespace sigmalab;

namespace {

// Divisor-pair sum, independent of the factorization code.
std::uint64_t naive_sigma(std::uint64_t n) {
    std::uint64_t s = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d)
        if (n % d == 0) s += d == n / d ? d : d + n / d;
    return s;
}

bool naive_prime_power(std::uint64_t n) {
    if (n < 2) return false;
    std::uint64_t p = 2;
    while (n % p) ++p;
    while (n % p == 0) n /= p;
    return n == 1;
}

SearchTask range(std::uint64_t lo, std::uint64_t hi) {
    SearchTask t;
    t.range_lo = lo;
    t.range_hi = hi;
    return t;
}

std::vector<std::uint64_t> Ns(const std::vector<SearchRecord>& recs) {
    std::vector<std::uint64_t> out;
    for (const auto& r : recs) out.push_back(to_u64(r.N));
    return out;
}

} // namespace

TEST_CASE("superperfect examples") {
    auto t = range(1, 100);
    t.parity = Parity::even;
    auto recs = search_superperfect(t);
    CHECK(Ns(recs) == std::vector<std::uint64_t>{2, 4, 16, 64});
    for (const auto& r : recs) {
        CHECK(r.revalidate());
        CHECK(*r.k == 2);
    }
    CHECK(recs[2].certificate("sigma(N)")->to_string() == "31");
    CHECK(recs[2].certificate("sigma(sigma(N))")->to_string() == "2^5");
    CHECK(verify_structure(recs).ok());

    t = range(1, 1000000);
    t.parity = Parity::odd;
    CHECK(search_superperfect(t).empty());
}

TEST_CASE("searches agree with naive oracles") {
    const std::uint64_t hi = 3000;
    std::set<std::uint64_t> sp, smp, spp;
    std::set<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (std::uint64_t n = 1; n <= hi; ++n) {
        std::uint64_t s = naive_sigma(n), ss = naive_sigma(s);
        if (ss == 2 * n) sp.insert(n);
        if (ss % n == 0) smp.insert(n);
        if (n > 1 && naive_prime_power(s) && ss % n == 0) spp.insert(n);
        if (s % 2 == 0 && naive_sigma(s / 2) == 3 * n) pairs.emplace(n, s / 2);
    }
    auto t = range(1, hi);
    t.chunk_size = 700;
    auto as_set = [](const std::vector<SearchRecord>& v) {
        auto n = Ns(v);
        return std::set<std::uint64_t>(n.begin(), n.end());
    };
    CHECK(as_set(search_superperfect(t)) == sp);
    auto smp_recs = search_smp(t);
    CHECK(as_set(smp_recs) == smp);
    for (const auto& r : smp_recs) CHECK(r.revalidate());
    CHECK(as_set(search_sigma_prime_power(t)) == spp);
    t.a = 2;
    t.b = 3;
    std::set<std::pair<std::uint64_t, std::uint64_t>> got;
    for (const auto& r : search_pairs(t)) {
        CHECK(r.revalidate());
        got.emplace(to_u64(r.N), to_u64(*r.M));
    }
    CHECK(got == pairs);
}

TEST_CASE("super multiply perfect examples") {
    auto recs = search_smp(range(1, 30));
    std::map<std::uint64_t, std::uint64_t> k;
    for (const auto& r : recs) k[to_u64(r.N)] = to_u64(*r.k);
    CHECK(k.at(1) == 1);
    CHECK(k.at(21) == 3);
    CHECK(k.at(15) == 4);
    CHECK(k.at(2) == 2);
    auto t = range(1, 1000);
    t.k = 3;
    for (const auto& r : search_smp(t)) CHECK(*r.k == 3);
    t.k = 0;
    CHECK_THROWS_AS(search_smp(t), std::invalid_argument);
}

TEST_CASE("sigma prime power examples") {
    auto recs = search_sigma_prime_power(range(1, 100000));
    std::vector<std::uint64_t> exceptional, even;
    for (const auto& r : recs) {
        CHECK(r.revalidate());
        (r.label == "exceptional" ? exceptional : even).push_back(to_u64(r.N));
    }
    CHECK(exceptional == std::vector<std::uint64_t>{21});
    CHECK(even == std::vector<std::uint64_t>{2, 4, 16, 64, 4096, 65536});
    auto n9 = search_sigma_prime_power(range(9, 9));
    CHECK(n9.empty());
}

TEST_CASE("pomerance divisor examples") {
    auto t = range(1, 2000);
    t.pe_max = 1000000;
    auto recs = search_pomerance(t);
    std::set<std::uint64_t> all, exceptional;
    for (const auto& r : recs) {
        CHECK(r.revalidate());
        all.insert(to_u64(r.N));
        if (r.label == "exceptional") exceptional.insert(to_u64(r.N));
    }
    CHECK(exceptional == std::set<std::uint64_t>{15, 21, 1023});
    CHECK(all == std::set<std::uint64_t>{2, 3, 4, 7, 15, 16, 21, 31, 64, 127, 1023});
    bool found15 = false;
    for (const auto& r : recs)
        if (r.N == 15 && *r.prime == 2 && r.exponent == 3) found15 = true;
    CHECK(found15);
    CHECK(pomerance_family(4) == "power_of_two");
    CHECK(pomerance_family(127) == "mersenne");
    CHECK(pomerance_family(8) == "exceptional");  // 15 is not prime

    // Oracle: every prime power p^e <= 1e4 by direct division.
    t = range(1, 200);
    t.pe_max = 10000;
    std::set<std::tuple<std::uint64_t, std::uint64_t, unsigned>> expect, got;
    for (std::uint64_t n = 1; n <= 200; ++n) {
        std::uint64_t s = naive_sigma(n);
        for (std::uint64_t p = 2; p <= 10000; ++p) {
            if (!is_prime_u64(p)) continue;
            std::uint64_t pe = p;
            for (unsigned e = 1; pe <= 10000; ++e, pe *= p)
                if (s % pe == 0 && naive_sigma(pe) % n == 0) expect.emplace(n, p, e);
        }
    }
    for (const auto& r : search_pomerance(t)) got.emplace(to_u64(r.N), to_u64(*r.prime), r.exponent);
    CHECK(got == expect);
}

TEST_CASE("pair system examples") {
    auto t = range(1, 100);
    t.a = 1;
    t.b = 2;
    auto recs = search_pairs(t);
    std::set<std::pair<std::uint64_t, std::uint64_t>> got;
    for (const auto& r : recs) got.emplace(to_u64(r.N), to_u64(*r.M));
    CHECK(got.count({2, 3}));
    CHECK(got.count({4, 7}));
    // a = 1, b = 2 coincides with superperfect.
    auto sp = search_superperfect(range(1, 100));
    CHECK(got.size() == sp.size());

    t.a = 2;
    t.b = 2;
    got.clear();
    for (const auto& r : search_pairs(t)) got.emplace(to_u64(r.N), to_u64(*r.M));
    CHECK(got.count({6, 6}));
    CHECK(got.count({28, 28}));
    t.a = 0;
    CHECK_THROWS_AS(search_pairs(t), std::invalid_argument);
}

TEST_CASE("square-only mode agrees with the plain odd scan") {
    auto plain = range(1, 200000);
    plain.parity = Parity::odd;
    plain.kind = SearchKind::superperfect;
    auto sq = plain;
    sq.square_only = true;
    sq.chunk_size = 37;
    CHECK(Ns(run_search(sq)) == Ns(run_search(plain)));
    CHECK(run_search(sq).empty());
    sq.range_hi = 10000000000ull;
    sq.chunk_size = kDefaultChunk;
    CHECK(run_search(sq).empty());
    sq.kind = SearchKind::super_multiply_perfect;
    CHECK_THROWS_AS(run_search(sq), std::invalid_argument);
}

TEST_CASE("results do not depend on workers or chunk size") {
    auto t = range(1, 300000);
    t.kind = SearchKind::super_multiply_perfect;
    auto base = run_search(t, 1);
    for (unsigned w : {2u, 4u, 8u})
        for (std::uint64_t chunk : {std::uint64_t{1000}, std::uint64_t{4099}, kDefaultChunk}) {
            auto v = t;
            v.chunk_size = chunk;
            CHECK(run_search(v, w) == base);
        }
}

TEST_CASE("cross-search consistency") {
    auto t = range(1, 100000);
    auto sp = search_superperfect(t);
    t.k = 2;
    auto smp = search_smp(t);
    CHECK(Ns(sp) == Ns(smp));
    t.k.reset();
    t.a = 1;
    t.b = 2;
    auto pairs = search_pairs(t);
    CHECK(Ns(pairs) == Ns(sp));
    for (const auto& r : pairs) CHECK(*r.M == sigma(r.N));
}

TEST_CASE("verify_structure flags bad hits") {
    CHECK(verify_structure({}).ok());
    SearchRecord fake;
    fake.kind = SearchKind::superperfect;
    fake.N = 45;
    auto rep = verify_structure({fake});
    REQUIRE(rep.findings.size() == 1);
    CHECK(rep.findings[0].message.find("not a square") != std::string::npos);
    fake.N = 9;
    CHECK(verify_structure({fake}).findings.size() == 1);
    fake.N = 8;
    CHECK_FALSE(verify_structure({fake}).ok());
    fake.N = 64;
    CHECK(verify_structure({fake}).ok());
}

TEST_CASE("task validation") {
    CHECK_THROWS_AS(search_superperfect(range(0, 10)), std::invalid_argument);
    CHECK_THROWS_AS(search_superperfect(range(10, 5)), std::invalid_argument);
    CHECK_THROWS_AS(search_superperfect(range(1, kMaxRange + 1)), std::invalid_argument);
    auto t = range(1, 10);
    CHECK_THROWS_AS(search_pomerance(t), std::invalid_argument);
    CHECK(parse_parity("odd") == Parity::odd);
    CHECK_THROWS_AS(parse_parity("both"), std::invalid_argument);
    CHECK(parse_search_kind("pair_system") == SearchKind::pair_system);
}
