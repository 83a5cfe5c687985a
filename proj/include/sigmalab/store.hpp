#pragma once

// JSONL result envelopes, payload (de)serialization with re-validation on
// load, CSV flattening and atomic checkpoints for resumable runs.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmalab/bounds.hpp"
#include "sigmalab/cyclotomic.hpp"
#include "sigmalab/search.hpp"

namespace sigmalab::store {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Payloads ----------------------------------------------------------------------

json to_json(const BigInt& v);
json to_json(const Rational& v);
json to_json(const Interval& v);
BigInt big_from_json(const json& j);
Rational rational_from_json(const json& j);

json to_json(const SearchRecord& r);
SearchRecord search_record_from_json(const json& j);

json to_json(const SiePrime& p);
SiePrime sie_prime_from_json(const json& j);

json to_json(const BoundReport& r);

json to_json(const ClassifiedFactor& c);

// Envelopes ------------------------------------------------------------------------

struct Envelope {
    int schema_version = kSchemaVersion;
    std::string run_id;
    json config;
    std::string timestamp;
    std::string type;  // search_record | sie_prime | bound_report | check_report | classified_factor | summary
    json payload;
};

json to_json(const Envelope& e);
Envelope envelope_from_json(const json& j);

/// Throws std::invalid_argument when the payload breaks an invariant of its type.
void validate_payload(const Envelope& e);

/// 16 hex digits of FNV-1a over the canonical dump of `config`.
std::string task_hash(const json& config);

/// ISO-8601 UTC. Uses SOURCE_DATE_EPOCH when set, so reruns can be byte-identical.
std::string run_timestamp();

/// Appends one JSONL line.
void persist(const Envelope& e, const std::string& path);

struct LoadError {
    std::size_t line = 0;
    std::string message;
};

struct LoadResult {
    std::vector<Envelope> envelopes;
    std::vector<LoadError> errors;
};

struct LoadFailure : std::runtime_error {
    LoadFailure(std::size_t line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
    std::size_t line;
};

/// Parses and re-validates every line. Strict mode throws LoadFailure at the
/// first bad line; lenient mode records it and continues.
LoadResult load(const std::string& path, bool strict);

// CSV --------------------------------------------------------------------------------

/// Flattens a payload into ordered (column, cell) pairs; factorizations become
/// "p1^e1*p2^e2" strings and rationals "num/den".
std::vector<std::pair<std::string, std::string>> flatten(const json& payload);
std::string csv_line(const std::vector<std::string>& cells);

// Checkpoints ------------------------------------------------------------------------

struct Checkpoint {
    std::string task_hash;
    std::uint64_t chunk_count = 0;
    std::uint64_t next_chunk = 0;
    std::uint64_t output_offset = 0;
    std::uint64_t records = 0;
    std::uint64_t findings = 0;
    bool complete = false;
    std::string timestamp;
};

struct CheckpointMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<Checkpoint> read_checkpoint(const std::string& path);

/// Writes to a temporary file and renames it over `path`.
void write_checkpoint(const Checkpoint& cp, const std::string& path);

/// Existing checkpoint for this task, or a fresh one starting at chunk 0.
/// Throws CheckpointMismatch if the stored task hash differs.
Checkpoint resume(const std::string& path, const std::string& hash, std::uint64_t chunk_count);

} // namespace sigmalab::store
