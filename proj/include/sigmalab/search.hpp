#pragma once

// Exhaustive range searches for sigma(sigma(N)) = kN, the prime-power and
// divisor variants, and the pair system sigma(N) = aM, sigma(M) = bN.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sigmalab/arith.hpp"

namespace sigmalab {

enum class SearchKind { superperfect, super_multiply_perfect, sigma_prime_power, pomerance_divisor, pair_system };
enum class Parity { any, even, odd };

std::string to_string(SearchKind k);
std::string to_string(Parity p);
SearchKind parse_search_kind(const std::string& s);
Parity parse_parity(const std::string& s);

inline constexpr std::uint64_t kDefaultChunk = 1u << 16;
inline constexpr std::uint64_t kMaxRange = std::uint64_t{1} << 40;

struct SearchTask {
    SearchKind kind = SearchKind::superperfect;
    std::uint64_t range_lo = 1;
    std::uint64_t range_hi = 1;
    Parity parity = Parity::any;
    bool square_only = false;            // superperfect only: N = m^2
    std::optional<std::uint64_t> k;      // super multiply perfect; unset = any k
    std::uint64_t a = 1, b = 1;          // pair system
    std::uint64_t pe_max = 0;            // pomerance: largest prime power p^e
    std::uint64_t chunk_size = kDefaultChunk;

    void validate() const;
};

struct SearchRecord {
    SearchKind kind = SearchKind::superperfect;
    BigInt N;
    std::optional<BigInt> M;
    std::optional<BigInt> k;
    std::optional<BigInt> a, b;
    std::optional<BigInt> prime;         // pomerance p^e
    unsigned exponent = 0;
    std::string label;
    std::vector<std::pair<std::string, Factorization>> certificates;
    std::size_t omega_sigma_n = 0;

    const Factorization* certificate(const std::string& name) const;
    /// Re-derives the defining equation from the stored factorizations.
    bool revalidate() const;

    friend bool operator==(const SearchRecord&, const SearchRecord&) = default;
};

/// Immutable description of a search split into fixed-size chunks.
class SearchPlan {
public:
    explicit SearchPlan(SearchTask task);

    const SearchTask& task() const noexcept { return task_; }
    std::uint64_t chunk_count() const noexcept { return chunks_; }
    /// Records of one chunk, sorted by N (then p^e).
    std::vector<SearchRecord> run_chunk(std::uint64_t c) const;

private:
    void scan_plain(std::uint64_t lo, std::uint64_t hi, std::vector<SearchRecord>& out) const;
    void scan_squares(std::uint64_t lo, std::uint64_t hi, std::vector<SearchRecord>& out) const;
    void examine(std::uint64_t n, std::uint64_t sigma_n, std::vector<SearchRecord>& out) const;

    SearchTask task_;
    std::uint64_t first_ = 0, last_ = 0;  // iteration range (N, or m when square_only)
    std::uint64_t chunks_ = 0;
    std::vector<std::uint32_t> sieve_primes_;
};

using ChunkSink = std::function<void(std::uint64_t chunk, std::vector<SearchRecord>&& records)>;

/// Processes chunks [first, last) with `workers` threads and hands each
/// chunk's records to `sink` in increasing chunk order from the calling thread.
void run_chunks(const SearchPlan& plan, std::uint64_t first, std::uint64_t last, unsigned workers,
                const ChunkSink& sink);

std::vector<SearchRecord> run_search(const SearchTask& task, unsigned workers = 1);

std::vector<SearchRecord> search_superperfect(SearchTask task, unsigned workers = 1);
std::vector<SearchRecord> search_smp(SearchTask task, unsigned workers = 1);
std::vector<SearchRecord> search_sigma_prime_power(SearchTask task, unsigned workers = 1);
std::vector<SearchRecord> search_pomerance(SearchTask task, unsigned workers = 1);
std::vector<SearchRecord> search_pairs(SearchTask task, unsigned workers = 1);

/// "power_of_two", "mersenne" or "exceptional".
std::string pomerance_family(const BigInt& n);

struct StructureFinding {
    BigInt N;
    std::string message;
};

struct StructureReport {
    std::size_t checked = 0;
    std::vector<StructureFinding> findings;
    bool ok() const noexcept { return findings.empty(); }
};

/// Superperfect records: odd hits must be squares with at least two distinct
/// prime factors; even hits must be 2^m with 2^{m+1} - 1 prime.
StructureReport verify_structure(const std::vector<SearchRecord>& records);

} // namespace sigmalab
