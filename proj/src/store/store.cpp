#include "sigmalab/store.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace sigmalab::store {

namespace {

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string need_string(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

BoundKind parse_bound_kind(const std::string& s) {
    for (auto k : {BoundKind::matveev_c1, BoundKind::matveev_lower, BoundKind::siegel, BoundKind::c23,
                   BoundKind::delta_lower, BoundKind::c24, BoundKind::threshold})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown bound kind '" + s + "'");
}

double interval_end(const json& v, const char* key) {
    std::string s = need_string(v, key);
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::invalid_argument("malformed real '" + s + "'");
    return d;
}

void validate_bound(const json& p) {
    const BoundKind kind = parse_bound_kind(need_string(p, "kind"));
    const json& v = need(p, "value");
    switch (kind) {
    case BoundKind::siegel:
    case BoundKind::c23:
        if (big_from_json(v) < 1) throw std::invalid_argument("bound value must be >= 1");
        return;
    case BoundKind::delta_lower:
    case BoundKind::c24:
        if (rational_from_json(v) <= Rational(0)) throw std::invalid_argument("lower bound must be positive");
        return;
    case BoundKind::matveev_c1:
    case BoundKind::matveev_lower:
    case BoundKind::threshold: {
        double lo = interval_end(v, "lo"), hi = interval_end(v, "hi");
        if (!(lo <= hi)) throw std::invalid_argument("interval endpoints out of order");
        if (kind == BoundKind::matveev_lower ? !(hi < 0) : !(lo > 0))
            throw std::invalid_argument("bound has the wrong sign");
        return;
    }
    }
}

void validate_check(const json& p) {
    const std::string check = need_string(p, "check");
    if (!need(p, "holds").is_boolean()) throw std::invalid_argument("field 'holds' must be a boolean");
    if (check == "zsigmondy" && !need(p, "primitive").is_null()) {
        BigInt a = big_from_json(need(p, "a")), q = big_from_json(need(p, "primitive"));
        unsigned n = need(p, "n").get<unsigned>();
        if (!is_prime(q) || multiplicative_order(a, q) != n)
            throw std::invalid_argument("zsigmondy witness is not a primitive divisor");
    }
    if (check == "repunit_omega" && !need(p, "witness").is_null()) {
        BigInt a = big_from_json(need(p, "a")), w = big_from_json(need(p, "witness"));
        unsigned e = need(p, "e").get<unsigned>();
        if (!is_prime(w) || w % e != 1 || repunit(a, e) % w != 0)
            throw std::invalid_argument("repunit_omega witness does not divide the repunit or is not 1 mod e");
    }
}

void validate_classified(const json& p) {
    BigInt prime = big_from_json(need(p, "p"));
    if (!is_prime(prime)) throw std::invalid_argument("classified factor is not prime");
    std::string cls = need_string(p, "class");
    if (cls != "U1" && cls != "U2" && cls != "U3" && cls != "U4") throw std::invalid_argument("unknown class " + cls);
    if ((cls == "U1") != (need(p, "exponent_in_N").get<unsigned>() == 1))
        throw std::invalid_argument("class U1 must coincide with exponent 1");
}

} // namespace

json to_json(const BigInt& v) { return v.get_str(); }

json to_json(const Rational& v) { return {{"num", v.numerator().get_str()}, {"den", v.denominator().get_str()}}; }

json to_json(const Interval& v) {
    return {{"decimal", v.to_string(30)},
            {"lo", v.lo().to_string(30, MPFR_RNDD)},
            {"hi", v.hi().to_string(30, MPFR_RNDU)}};
}

BigInt big_from_json(const json& j) {
    if (!j.is_string()) throw std::invalid_argument("integers must be decimal strings");
    const auto s = j.get<std::string>();
    if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos)
        throw std::invalid_argument("malformed integer '" + s + "'");
    return BigInt(s);
}

Rational rational_from_json(const json& j) {
    BigInt num = big_from_json(need(j, "num")), den = big_from_json(need(j, "den"));
    Rational r(num, den);
    if (r.numerator() != num || r.denominator() != den) throw std::invalid_argument("rational not in lowest terms");
    return r;
}

json to_json(const SearchRecord& r) {
    json j;
    j["kind"] = to_string(r.kind);
    j["N"] = to_json(r.N);
    if (r.M) j["M"] = to_json(*r.M);
    if (r.k) j["k"] = to_json(*r.k);
    if (r.a) j["a"] = to_json(*r.a);
    if (r.b) j["b"] = to_json(*r.b);
    if (r.prime) {
        j["p"] = to_json(*r.prime);
        j["e"] = r.exponent;
    }
    if (!r.label.empty()) j["label"] = r.label;
    j["omega_sigma_N"] = r.omega_sigma_n;
    json certs = json::array();
    for (const auto& [name, f] : r.certificates) certs.push_back({{"of", name}, {"factors", f.to_string()}});
    j["certificates"] = std::move(certs);
    return j;
}

SearchRecord search_record_from_json(const json& j) {
    SearchRecord r;
    r.kind = parse_search_kind(need_string(j, "kind"));
    r.N = big_from_json(need(j, "N"));
    if (j.contains("M")) r.M = big_from_json(j["M"]);
    if (j.contains("k")) r.k = big_from_json(j["k"]);
    if (j.contains("a")) r.a = big_from_json(j["a"]);
    if (j.contains("b")) r.b = big_from_json(j["b"]);
    if (j.contains("p")) {
        r.prime = big_from_json(j["p"]);
        r.exponent = need(j, "e").get<unsigned>();
    }
    if (j.contains("label")) r.label = j["label"].get<std::string>();
    r.omega_sigma_n = need(j, "omega_sigma_N").get<std::size_t>();
    for (const auto& c : need(j, "certificates"))
        r.certificates.emplace_back(need_string(c, "of"), Factorization::parse(need_string(c, "factors")));
    return r;
}

json to_json(const SiePrime& p) {
    json exps = json::array();
    for (auto [i, a] : p.exponents) exps.push_back({{"index", i}, {"a", a}});
    return {{"p", std::to_string(p.p)}, {"e", p.e}, {"exponents", std::move(exps)},
            {"certificate", to_json(p.certificate)}};
}

SiePrime sie_prime_from_json(const json& j) {
    SiePrime p;
    p.p = to_u64(big_from_json(need(j, "p")));
    p.e = need(j, "e").get<unsigned>();
    for (const auto& x : need(j, "exponents"))
        p.exponents.emplace_back(need(x, "index").get<std::size_t>(), need(x, "a").get<unsigned>());
    p.certificate = big_from_json(need(j, "certificate"));
    return p;
}

json to_json(const BoundReport& r) {
    json inputs = json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    json value = std::visit([](const auto& v) { return to_json(v); }, r.value);
    return {{"kind", to_string(r.kind)}, {"inputs", std::move(inputs)}, {"value", std::move(value)},
            {"precision_bits", r.precision_bits}};
}

json to_json(const ClassifiedFactor& c) {
    json j{{"p", to_json(c.p)}, {"exponent_in_N", c.exponent_in_n}, {"class", to_string(c.cls)}};
    j["witness_d"] = c.witness_d ? json(*c.witness_d) : json(nullptr);
    return j;
}

json to_json(const Envelope& e) {
    return {{"schema_version", e.schema_version}, {"run_id", e.run_id}, {"config", e.config},
            {"timestamp", e.timestamp},           {"type", e.type},     {"payload", e.payload}};
}

Envelope envelope_from_json(const json& j) {
    Envelope e;
    const json& v = need(j, "schema_version");
    if (!v.is_number_integer()) throw std::invalid_argument("schema_version must be an integer");
    e.schema_version = v.get<int>();
    if (e.schema_version != kSchemaVersion)
        throw std::invalid_argument("unsupported schema_version " + std::to_string(e.schema_version));
    e.run_id = need_string(j, "run_id");
    e.config = need(j, "config");
    e.timestamp = need_string(j, "timestamp");
    e.type = need_string(j, "type");
    e.payload = need(j, "payload");
    return e;
}

void validate_payload(const Envelope& e) {
    if (e.type == "search_record") {
        if (!search_record_from_json(e.payload).revalidate())
            throw std::invalid_argument("search record certificates do not re-validate");
    } else if (e.type == "sie_prime") {
        std::vector<BigInt> q;
        for (const auto& x : need(need(e.config, "params"), "q")) q.push_back(big_from_json(x));
        if (!sie_prime_from_json(e.payload).revalidate(q))
            throw std::invalid_argument("sieve prime certificate does not re-validate");
    } else if (e.type == "bound_report") {
        validate_bound(e.payload);
    } else if (e.type == "check_report") {
        validate_check(e.payload);
    } else if (e.type == "classified_factor") {
        validate_classified(e.payload);
    } else if (e.type == "summary") {
        if (!e.payload.is_object()) throw std::invalid_argument("summary payload must be an object");
    } else {
        throw std::invalid_argument("unknown envelope type '" + e.type + "'");
    }
}

std::string task_hash(const json& config) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string run_timestamp() {
    std::time_t t;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env)
        t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
    else
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void persist(const Envelope& e, const std::string& path) {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for appending");
    out << to_json(e).dump() << '\n';
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

LoadResult load(const std::string& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    LoadResult res;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (line.empty()) continue;
        try {
            Envelope e = envelope_from_json(json::parse(line));
            validate_payload(e);
            res.envelopes.push_back(std::move(e));
        } catch (const std::exception& ex) {
            if (strict) throw LoadFailure(no, ex.what());
            res.errors.push_back({no, ex.what()});
        }
    }
    return res;
}

std::vector<std::pair<std::string, std::string>> flatten(const json& payload) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, v] : payload.items()) {
        if (key == "certificates" && v.is_array()) {
            for (const auto& c : v) out.emplace_back("cert:" + c.value("of", ""), c.value("factors", ""));
        } else if (key == "exponents" && v.is_array()) {
            std::string s;
            for (const auto& x : v)
                s += (s.empty() ? "" : "*") + std::string("q") + x["index"].dump() + "^" + x["a"].dump();
            out.emplace_back(key, s);
        } else if (v.is_object() && v.contains("num") && v.contains("den")) {
            out.emplace_back(key, v["num"].get<std::string>() + "/" + v["den"].get<std::string>());
        } else if (v.is_object() && v.contains("decimal")) {
            out.emplace_back(key, v["decimal"].get<std::string>());
        } else if (v.is_string()) {
            out.emplace_back(key, v.get<std::string>());
        } else if (v.is_null()) {
            out.emplace_back(key, "");
        } else {
            out.emplace_back(key, v.dump());
        }
    }
    return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        const std::string& c = cells[i];
        if (c.find_first_of(",\"\n") == std::string::npos) {
            line += c;
            continue;
        }
        line += '"';
        for (char ch : c) {
            if (ch == '"') line += '"';
            line += ch;
        }
        line += '"';
    }
    return line;
}

std::optional<Checkpoint> read_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& ex) {
        throw CheckpointMismatch("checkpoint " + path + " is unreadable: " + ex.what());
    }
    Checkpoint cp;
    cp.task_hash = need_string(j, "task_hash");
    cp.chunk_count = need(j, "chunk_count").get<std::uint64_t>();
    cp.next_chunk = need(j, "next_chunk").get<std::uint64_t>();
    cp.output_offset = need(j, "output_offset").get<std::uint64_t>();
    cp.records = need(j, "records").get<std::uint64_t>();
    cp.findings = need(j, "findings").get<std::uint64_t>();
    cp.complete = need(j, "complete").get<bool>();
    cp.timestamp = need_string(j, "timestamp");
    return cp;
}

void write_checkpoint(const Checkpoint& cp, const std::string& path) {
    json j{{"task_hash", cp.task_hash},         {"chunk_count", cp.chunk_count}, {"next_chunk", cp.next_chunk},
           {"output_offset", cp.output_offset}, {"records", cp.records},         {"findings", cp.findings},
           {"complete", cp.complete},           {"timestamp", cp.timestamp}};
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << j.dump() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint resume(const std::string& path, const std::string& hash, std::uint64_t chunk_count) {
    if (auto cp = read_checkpoint(path)) {
        if (cp->task_hash != hash)
            throw CheckpointMismatch("checkpoint " + path + " belongs to task " + cp->task_hash + ", not " + hash +
                                     "; remove it or use a different --checkpoint path");
        if (cp->chunk_count != chunk_count || cp->next_chunk > chunk_count)
            throw CheckpointMismatch("checkpoint " + path + " is inconsistent with the task's chunk count");
        return *cp;
    }
    Checkpoint fresh;
    fresh.task_hash = hash;
    fresh.chunk_count = chunk_count;
    fresh.timestamp = run_timestamp();
    return fresh;
}

} // namespace sigmalab::store
