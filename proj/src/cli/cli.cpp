#include "sigmalab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "sigmalab/bounds.hpp"
#include "sigmalab/cyclotomic.hpp"
#include "sigmalab/search.hpp"
#include "sigmalab/store.hpp"

namespace sigmalab::cli {

namespace {

using store::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::string out = "-";
    std::string checkpoint;
    unsigned workers = 1;
    long precision = 0;
    std::string format = "jsonl";
    std::uint64_t chunk_size = kDefaultChunk;
    std::uint64_t stop_after = 0;
};

long default_precision() {
    if (const char* env = std::getenv("SIGMALAB_PRECISION"); env && *env) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (*end != '\0') throw UsageError("SIGMALAB_PRECISION must be an integer");
        return v;
    }
    return kDefaultPrecision;
}

void add_common(CLI::App* sub, Common& c, bool search) {
    sub->add_option("--out", c.out, "Output path, '-' for stdout");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--precision", c.precision, "Working precision in bits (>= 64)");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"jsonl", "csv"}));
    if (search) {
        sub->add_option("--checkpoint", c.checkpoint, "Checkpoint path for resumable runs");
        sub->add_option("--chunk-size", c.chunk_size, "Numbers per chunk")->check(CLI::PositiveNumber);
        sub->add_option("--stop-after-chunks", c.stop_after, "Stop after this many chunks (for testing resume)")
            ->group("");
    }
}

std::vector<BigInt> parse_bigints(const std::vector<std::string>& items, const char* flag) {
    std::vector<BigInt> out;
    for (const auto& s : items) {
        if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos)
            throw UsageError(std::string(flag) + ": '" + s + "' is not an integer");
        out.emplace_back(s);
    }
    return out;
}

json strings(const std::vector<BigInt>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

std::string join(const std::vector<BigInt>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x.get_str();
    return s;
}

// Writes envelopes (JSONL) or flattened rows (CSV) to a file or stdout.
class Output {
public:
    Output(const Common& c, std::ostream& console, json config, std::string timestamp, bool append)
        : csv_(c.format == "csv"), config_(std::move(config)), timestamp_(std::move(timestamp)) {
        run_id_ = store::task_hash(config_);
        if (c.out == "-") {
            os_ = &console;
        } else {
            file_.open(c.out, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
            if (!file_) throw std::runtime_error("cannot open " + c.out + " for writing");
            os_ = &file_;
        }
    }

    const std::string& run_id() const { return run_id_; }
    const std::string& timestamp() const { return timestamp_; }

    void emit(const std::string& type, json payload) {
        if (csv_) {
            if (type == "summary") return;
            auto cells = store::flatten(payload);
            std::vector<std::string> header, row;
            for (auto& [k, v] : cells) {
                header.push_back(k);
                row.push_back(v);
            }
            if (header != header_) {
                *os_ << store::csv_line(header) << '\n';
                header_ = header;
            }
            *os_ << store::csv_line(row) << '\n';
            return;
        }
        store::Envelope e;
        e.run_id = run_id_;
        e.config = config_;
        e.timestamp = timestamp_;
        e.type = type;
        e.payload = std::move(payload);
        *os_ << store::to_json(e).dump() << '\n';
    }

    std::uint64_t flush() {
        os_->flush();
        if (!*os_) throw std::runtime_error("write failed");
        return file_.is_open() ? static_cast<std::uint64_t>(file_.tellp()) : 0;
    }

private:
    bool csv_;
    json config_;
    std::string timestamp_;
    std::string run_id_;
    std::ofstream file_;
    std::ostream* os_ = nullptr;
    std::vector<std::string> header_;
};

json config_for(const std::string& command, json params) { return {{"command", command}, {"params", std::move(params)}}; }

// Searches -------------------------------------------------------------------------

int run_search_command(const std::string& command, const SearchTask& task, const Common& c, std::ostream& out,
                       std::ostream& err) {
    SearchPlan plan(task);
    json params{{"kind", to_string(task.kind)},   {"min", std::to_string(task.range_lo)},
                {"max", std::to_string(task.range_hi)}, {"parity", to_string(task.parity)},
                {"square_only", task.square_only}, {"chunk_size", task.chunk_size}};
    if (task.k) params["k"] = std::to_string(*task.k);
    if (task.kind == SearchKind::pair_system) {
        params["a"] = std::to_string(task.a);
        params["b"] = std::to_string(task.b);
    }
    if (task.kind == SearchKind::pomerance_divisor) params["pe_max"] = std::to_string(task.pe_max);
    const json config = config_for(command, params);
    const std::string hash = store::task_hash(config);

    store::Checkpoint cp;
    bool append = false;
    if (!c.checkpoint.empty()) {
        if (c.out == "-") throw UsageError("--checkpoint requires --out <file>");
        if (c.format != "jsonl") throw UsageError("--checkpoint requires --format jsonl");
        if (std::filesystem::absolute(c.checkpoint) == std::filesystem::absolute(c.out))
            throw UsageError("--checkpoint and --out must be different files");
        cp = store::resume(c.checkpoint, hash, plan.chunk_count());
        if (cp.next_chunk > 0 || cp.complete) {
            std::error_code ec;
            auto size = std::filesystem::file_size(c.out, ec);
            if (ec || size < cp.output_offset)
                throw store::CheckpointMismatch("output " + c.out + " is shorter than the checkpoint records");
            std::filesystem::resize_file(c.out, cp.output_offset);
            append = true;
        }
        if (cp.complete) {
            err << "run " << hash << " already complete (" << cp.records << " records)\n";
            return cp.findings ? kExitFinding : kExitOk;
        }
    } else {
        cp.task_hash = hash;
        cp.chunk_count = plan.chunk_count();
        cp.timestamp = store::run_timestamp();
    }

    Output output(c, out, config, cp.timestamp, append);
    std::uint64_t last = plan.chunk_count();
    if (c.stop_after) last = std::min(last, cp.next_chunk + c.stop_after);

    run_chunks(plan, cp.next_chunk, last, c.workers, [&](std::uint64_t chunk, std::vector<SearchRecord>&& recs) {
        for (const auto& r : recs) output.emit("search_record", store::to_json(r));
        for (const auto& f : verify_structure(recs).findings) {
            output.emit("check_report", {{"check", "structure"}, {"N", f.N.get_str()}, {"message", f.message},
                                         {"holds", false}});
            ++cp.findings;
        }
        cp.records += recs.size();
        cp.next_chunk = chunk + 1;
        cp.output_offset = output.flush();
        if (!c.checkpoint.empty()) store::write_checkpoint(cp, c.checkpoint);
    });

    if (cp.next_chunk < plan.chunk_count()) {
        err << "stopped at chunk " << cp.next_chunk << " of " << plan.chunk_count() << "\n";
        return kExitOk;
    }
    output.emit("summary", {{"records", cp.records}, {"chunks", plan.chunk_count()}, {"findings", cp.findings}});
    cp.output_offset = output.flush();
    cp.complete = true;
    if (!c.checkpoint.empty()) store::write_checkpoint(cp, c.checkpoint);
    return cp.findings ? kExitFinding : kExitOk;
}

// Reports --------------------------------------------------------------------------

BoundReport make_report(BoundKind kind, std::vector<std::pair<std::string, std::string>> inputs,
                        std::variant<BigInt, Rational, Interval> value, mpfr_prec_t prec) {
    return BoundReport{kind, std::move(inputs), std::move(value), prec};
}

bool zsigmondy_exception(const BigInt& a, unsigned n) {
    if (n == 1) return a == 2;
    if (n == 2) return mpz_popcount(BigInt(a + 1).get_mpz_t()) == 1;
    return a == 2 && n == 6;
}

std::vector<std::vector<BigInt>> multisets(const std::vector<BigInt>& pool, std::size_t k) {
    std::vector<std::vector<BigInt>> out;
    std::vector<std::size_t> idx(k, 0);
    if (pool.empty() || k == 0) return out;
    for (;;) {
        std::vector<BigInt> v;
        for (auto i : idx) v.push_back(pool[i]);
        out.push_back(std::move(v));
        std::size_t j = k;
        while (j > 0 && idx[j - 1] == pool.size() - 1) --j;
        if (j == 0) break;
        ++idx[j - 1];
        for (std::size_t t = j; t < k; ++t) idx[t] = idx[j - 1];
    }
    return out;
}

CLI::App* deepest(CLI::App* app) {
    for (auto* sub : app->get_subcommands())
        if (sub->parsed()) return deepest(sub);
    return app;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sigmalab: divisor-sum searches, cyclotomic sieves and effective bounds"};
    app.require_subcommand(1);
    app.name(args.empty() ? "sigmalab" : std::filesystem::path(args[0]).filename().string());

    Common common;

    // search-*
    SearchTask task;
    std::string parity = "any";
    auto* sp = app.add_subcommand("search-superperfect", "N with sigma(sigma(N)) = 2N");
    sp->add_option("--min", task.range_lo, "Smallest N");
    sp->add_option("--max", task.range_hi, "Largest N")->required();
    sp->add_option("--parity", parity)->check(CLI::IsMember({"any", "even", "odd"}));
    sp->add_flag("--square-only", task.square_only, "Only test N = m^2");
    add_common(sp, common, true);

    std::uint64_t k_value = 0;
    auto* smp = app.add_subcommand("search-smp", "N with N | sigma(sigma(N))");
    smp->add_option("--min", task.range_lo);
    smp->add_option("--max", task.range_hi)->required();
    smp->add_option("--parity", parity)->check(CLI::IsMember({"any", "even", "odd"}));
    auto* k_opt = smp->add_option("--k", k_value, "Keep only sigma(sigma(N)) = kN");
    add_common(smp, common, true);

    auto* spp = app.add_subcommand("search-prime-power", "sigma(N) a prime power and N | sigma(sigma(N))");
    spp->add_option("--min", task.range_lo);
    spp->add_option("--max", task.range_hi)->required();
    add_common(spp, common, true);

    auto* pom = app.add_subcommand("search-pomerance", "p^e | sigma(N) and N | sigma(p^e)");
    pom->add_option("--n-min", task.range_lo);
    pom->add_option("--n-max", task.range_hi)->required();
    pom->add_option("--pe-max", task.pe_max, "Largest prime power p^e")->required();
    add_common(pom, common, true);

    auto* pairs = app.add_subcommand("search-pairs", "sigma(N) = aM, sigma(M) = bN");
    pairs->add_option("--min", task.range_lo);
    pairs->add_option("--max", task.range_hi)->required();
    pairs->add_option("--a", task.a)->required();
    pairs->add_option("--b", task.b)->required();
    add_common(pairs, common, true);

    // sieve
    std::vector<std::string> q_list, subset_list;
    unsigned sieve_e = 2;
    std::uint64_t sieve_max = 0;
    std::string strategy = "scan";
    auto* sieve = app.add_subcommand("sieve", "Primes p <= max with (p^e-1)/(p-1) a product of the chosen q_i");
    sieve->add_option("--q", q_list, "Comma-separated primes")->delimiter(',')->required();
    sieve->add_option("--subset", subset_list, "1-based indices into --q (default: all)")->delimiter(',');
    sieve->add_option("--e", sieve_e)->required();
    sieve->add_option("--max", sieve_max)->required();
    sieve->add_option("--strategy", strategy)->check(CLI::IsMember({"scan", "products"}));
    add_common(sieve, common, false);

    // zsigmondy
    std::string z_a;
    unsigned z_n = 0, z_a_min = 2, z_a_max = 0, z_n_min = 3, z_n_max = 0;
    auto* zs = app.add_subcommand("zsigmondy", "Primitive prime divisors of a^n - 1");
    zs->add_option("--a", z_a);
    zs->add_option("--n", z_n);
    zs->add_option("--a-min", z_a_min);
    zs->add_option("--a-max", z_a_max);
    zs->add_option("--n-min", z_n_min);
    zs->add_option("--n-max", z_n_max);
    add_common(zs, common, false);

    // verify
    auto* verify = app.add_subcommand("verify", "Lemma suites");
    verify->require_subcommand(1);
    unsigned v_a_min = 2, v_a_max = 30, v_e_min = 3, v_e_max = 30;
    auto* l22 = verify->add_subcommand("repunit-omega", "omega((a^e-1)/(a-1)) >= omega(e)-1 with a factor 1 mod e");
    l22->add_option("--a-min", v_a_min);
    l22->add_option("--a-max", v_a_max);
    l22->add_option("--e-min", v_e_min);
    l22->add_option("--e-max", v_e_max);
    add_common(l22, common, false);

    unsigned l31_p_max = 50, l31_f_max = 3, l31_e_max = 60;
    bool l31_all = false;
    auto* l31 = verify->add_subcommand("residue-count", "H1 H2 / 2 <= gcd(e, p0 - 1) over a grid");
    l31->add_option("--p-max", l31_p_max);
    l31->add_option("--f-max", l31_f_max);
    l31->add_option("--e-max", l31_e_max);
    l31->add_flag("--all", l31_all, "Emit every applicable tuple, not only violations");
    add_common(l31, common, false);

    std::vector<std::string> l32_q{"2", "3", "5", "7", "11", "13"};
    unsigned l32_e_min = 4, l32_e_max = 8, l32_size = 1;
    std::uint64_t l32_max = 100000;
    auto* l32 = verify->add_subcommand("prime-gap", "Gap log p_{j+1} > 9/8 log p_j on sieve classes");
    l32->add_option("--q", l32_q)->delimiter(',');
    l32->add_option("--e-min", l32_e_min);
    l32->add_option("--e-max", l32_e_max);
    l32->add_option("--subset-size", l32_size);
    l32->add_option("--max", l32_max);
    add_common(l32, common, false);

    std::vector<std::string> d_primes, d_m{"7", "11", "13", "17"};
    unsigned d_cap = 6, d_s_max = 3, d_p_max = 13;
    auto* dor = verify->add_subcommand("delta-oracle", "Exhaustive check of the delta lower bound");
    dor->add_option("--primes", d_primes, "One prime multiset (default: every multiset up to --s-max)")
        ->delimiter(',');
    dor->add_option("--cap", d_cap, "Exponent cap");
    dor->add_option("--m", d_m, "Auxiliary m candidates")->delimiter(',');
    dor->add_option("--s-max", d_s_max);
    dor->add_option("--p-max", d_p_max);
    add_common(dor, common, false);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Effective bound calculators");
    bounds->require_subcommand(1);
    unsigned b_n = 0;
    std::vector<std::string> b_a, b_b;
    auto* bm = bounds->add_subcommand("matveev", "C1(n), or the lower bound for given a_j, b_j");
    auto* bm_n = bm->add_option("--n", b_n);
    auto* bm_a = bm->add_option("--a", b_a)->delimiter(',');
    bm->add_option("--b", b_b)->delimiter(',');
    add_common(bm, common, false);

    unsigned b_s = 0;
    std::string b_A;
    auto* bsg = bounds->add_subcommand("siegel", "ceil(((s+1)^(1/2) A)^s)");
    bsg->add_option("--s", b_s)->required();
    bsg->add_option("--A", b_A)->required();
    add_common(bsg, common, false);

    auto* bc23 = bounds->add_subcommand("c23", "C23(s)");
    bc23->add_option("--s", b_s)->required();
    add_common(bc23, common, false);

    std::string b_nbig = "1", b_d = "1";
    std::vector<std::string> b_primes;
    auto* bdl = bounds->add_subcommand("delta", "Lower bound for delta(s, n, p_1..p_s)");
    bdl->add_option("--s", b_s)->required();
    bdl->add_option("--n", b_nbig)->required();
    bdl->add_option("--d", b_d);
    bdl->add_option("--primes", b_primes)->delimiter(',')->required();
    add_common(bdl, common, false);

    std::string c24_mode = "enumerate";
    C24Options c24_opt;
    auto* bc24 = bounds->add_subcommand("c24", "C24(s, n) by the recursion");
    bc24->add_option("--s", b_s)->required();
    bc24->add_option("--n", b_nbig)->required();
    bc24->add_option("--mode", c24_mode)->check(CLI::IsMember({"enumerate", "monotone"}));
    bc24->add_option("--budget", c24_opt.budget, "Prime multisets allowed per step");
    add_common(bc24, common, false);

    std::string t_C = "1", t_Q;
    unsigned t_k = 1;
    auto* bth = bounds->add_subcommand("threshold", "exp(C (log Q / log log Q)^(1/(2k+4)))");
    bth->add_option("--C", t_C);
    bth->add_option("--k", t_k)->required();
    bth->add_option("--Q", t_Q)->required();
    add_common(bth, common, false);

    // classify
    std::string cl_n;
    std::vector<std::string> cl_q;
    std::size_t cl_s = 0;
    auto* cls = app.add_subcommand("classify", "Assign prime factors of N to U1..U4");
    cls->add_option("--N", cl_n, "Integer or factorization such as 3^4*5")->required();
    cls->add_option("--q", cl_q)->delimiter(',')->required();
    cls->add_option("--s", cl_s)->required();
    add_common(cls, common, false);

    // load
    std::string load_path;
    bool lenient = false;
    auto* ld = app.add_subcommand("load", "Re-validate a JSONL result file");
    ld->add_option("path", load_path)->required();
    ld->add_flag("--lenient", lenient, "Report bad lines and continue");

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << deepest(&app)->help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << deepest(&app)->help();
        return kExitUsage;
    }

    CLI::App* used = deepest(&app);
    try {
        common.precision = common.precision ? common.precision : default_precision();
        if (common.precision < 64) throw UsageError("--precision must be >= 64");
        const mpfr_prec_t prec = common.precision;
        task.parity = parse_parity(parity);
        task.chunk_size = common.chunk_size;

        if (used == sp) {
            task.kind = SearchKind::superperfect;
            return run_search_command("search-superperfect", task, common, out, err);
        }
        if (used == smp) {
            task.kind = SearchKind::super_multiply_perfect;
            if (k_opt->count()) task.k = k_value;
            return run_search_command("search-smp", task, common, out, err);
        }
        if (used == spp) {
            task.kind = SearchKind::sigma_prime_power;
            return run_search_command("search-prime-power", task, common, out, err);
        }
        if (used == pom) {
            task.kind = SearchKind::pomerance_divisor;
            return run_search_command("search-pomerance", task, common, out, err);
        }
        if (used == pairs) {
            task.kind = SearchKind::pair_system;
            return run_search_command("search-pairs", task, common, out, err);
        }

        if (used == sieve) {
            SieSpec spec;
            spec.q_primes = parse_bigints(q_list, "--q");
            spec.e = sieve_e;
            spec.limit = sieve_max;
            if (subset_list.empty())
                for (std::size_t i = 1; i <= spec.q_primes.size(); ++i) spec.subset.push_back(i);
            else
                for (const auto& x : parse_bigints(subset_list, "--subset")) spec.subset.push_back(to_u64(x));
            json idx = json::array();
            for (auto i : spec.subset) idx.push_back(i);
            json config = config_for("sieve", {{"q", strings(spec.q_primes)}, {"subset", idx}, {"e", spec.e},
                                               {"max", std::to_string(spec.limit)}});
            auto found = strategy == "scan" ? enumerate_sie(spec, common.workers) : enumerate_sie_by_products(spec);
            Output o(common, out, config, store::run_timestamp(), false);
            bool ok = true;
            for (const auto& p : found) {
                ok = ok && p.revalidate(spec.q_primes);
                o.emit("sie_prime", store::to_json(p));
            }
            o.emit("summary", {{"count", found.size()}});
            o.flush();
            return ok ? kExitOk : kExitFinding;
        }

        if (used == zs) {
            std::vector<std::pair<BigInt, unsigned>> grid;
            if (!z_a.empty()) {
                if (z_n == 0) throw UsageError("--a requires --n");
                grid.emplace_back(parse_bigints({z_a}, "--a")[0], z_n);
            } else {
                if (z_a_max == 0 || z_n_max == 0) throw UsageError("give --a/--n or --a-max/--n-max");
                for (unsigned a = z_a_min; a <= z_a_max; ++a)
                    for (unsigned n = z_n_min; n <= z_n_max; ++n) grid.emplace_back(a, n);
            }
            json params = z_a.empty() ? json{{"a_min", z_a_min}, {"a_max", z_a_max}, {"n_min", z_n_min},
                                             {"n_max", z_n_max}}
                                      : json{{"a", z_a}, {"n", z_n}};
            Output o(common, out, config_for("zsigmondy", params), store::run_timestamp(), false);
            std::size_t violations = 0;
            json exceptions = json::array();
            for (const auto& [a, n] : grid) {
                if (a < 2 || n < 1) throw UsageError("zsigmondy needs a >= 2 and n >= 1");
                auto q = zsigmondy_primitive(a, n);
                const bool expected = zsigmondy_exception(a, n);
                const bool holds = q.has_value() != expected;
                if (!q) exceptions.push_back({a.get_str(), n});
                violations += !holds;
                o.emit("check_report", {{"check", "zsigmondy"},
                                        {"a", a.get_str()},
                                        {"n", n},
                                        {"primitive", q ? json(q->get_str()) : json(nullptr)},
                                        {"expected_exception", expected},
                                        {"holds", holds}});
            }
            o.emit("summary", {{"pairs", grid.size()}, {"violations", violations}, {"without_primitive", exceptions}});
            o.flush();
            return violations ? kExitFinding : kExitOk;
        }

        if (used == l22) {
            Output o(common, out,
                     config_for("verify repunit-omega",
                                {{"a_min", v_a_min}, {"a_max", v_a_max}, {"e_min", v_e_min}, {"e_max", v_e_max}}),
                     store::run_timestamp(), false);
            std::size_t violations = 0, count = 0;
            for (unsigned a = v_a_min; a <= v_a_max; ++a)
                for (unsigned e = v_e_min; e <= v_e_max; ++e) {
                    auto r = check_lemma22(a, e);
                    ++count;
                    violations += !r.holds;
                    o.emit("check_report", {{"check", "repunit_omega"},
                                            {"a", r.a.get_str()},
                                            {"e", r.e},
                                            {"omega", r.omega_count},
                                            {"required", r.required},
                                            {"witness", r.witness ? json(r.witness->get_str()) : json(nullptr)},
                                            {"holds", r.holds}});
                }
            o.emit("summary", {{"instances", count}, {"violations", violations}});
            o.flush();
            return violations ? kExitFinding : kExitOk;
        }

        if (used == l31) {
            Output o(common, out,
                     config_for("verify residue-count", {{"p_max", l31_p_max}, {"f_max", l31_f_max}, {"e_max", l31_e_max}}),
                     store::run_timestamp(), false);
            std::size_t applicable = 0, violations = 0, group_violations = 0;
            auto primes = primes_up_to(l31_p_max);
            for (auto p0 : primes)
                for (unsigned f = 1; f <= l31_f_max; ++f)
                    for (unsigned e = 1; e <= l31_e_max; ++e)
                        for (auto p1 : primes)
                            for (auto p2 : primes) {
                                if (p0 == p1 || p0 == p2 || p1 == p2) continue;
                                ResidueBoundReport r;
                                try {
                                    r = residue_bound_check(p0, f, e, p1, p2);
                                } catch (const InapplicableInstance&) {
                                    continue;
                                }
                                ++applicable;
                                violations += !r.holds;
                                group_violations += !r.holds_group_bound;
                                if (r.holds && !l31_all) continue;
                                o.emit("check_report", {{"check", "residue_count"},
                                                        {"p0", p0},
                                                        {"f", f},
                                                        {"e", e},
                                                        {"p1", p1},
                                                        {"p2", p2},
                                                        {"H1", r.h1},
                                                        {"H2", r.h2},
                                                        {"lhs", r.lhs},
                                                        {"rhs", r.rhs},
                                                        {"group_bound", r.group_bound},
                                                        {"holds", r.holds},
                                                        {"holds_group_bound", r.holds_group_bound}});
                            }
            o.emit("summary", {{"applicable", applicable},
                               {"violations", violations},
                               {"group_bound_violations", group_violations}});
            o.flush();
            return violations ? kExitFinding : kExitOk;
        }

        if (used == l32) {
            auto q = parse_bigints(l32_q, "--q");
            if (l32_size < 1 || l32_size > q.size()) throw UsageError("--subset-size out of range");
            Output o(common, out,
                     config_for("verify prime-gap", {{"q", strings(q)}, {"e_min", l32_e_min}, {"e_max", l32_e_max},
                                                   {"subset_size", l32_size}, {"max", std::to_string(l32_max)}}),
                     store::run_timestamp(), false);
            std::size_t lists = 0, violations = 0;
            const unsigned first_e = std::max(l32_e_min, 3 * l32_size * l32_size + 1);
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << q.size()); ++mask) {
                if (static_cast<unsigned>(std::popcount(mask)) != l32_size) continue;
                std::vector<std::size_t> subset;
                for (std::size_t i = 0; i < q.size(); ++i)
                    if (mask >> i & 1) subset.push_back(i + 1);
                for (unsigned e = first_e; e <= l32_e_max; ++e) {
                    auto sie = enumerate_sie(SieSpec{q, subset, e, l32_max}, common.workers);
                    for (const auto& [cls_idx, list] : partition_by_dominant_prime(sie, q, l32_size)) {
                        auto r = gap_check(list, e, l32_size);
                        ++lists;
                        violations += !r.holds;
                        o.emit("check_report",
                               {{"check", "prime_gap"},
                                {"subset", subset},
                                {"e", e},
                                {"class", cls_idx},
                                {"primes", list},
                                {"min_ratio", r.min_ratio},
                                {"first_violation", r.first_violation ? json(*r.first_violation) : json(nullptr)},
                                {"holds", r.holds}});
                    }
                }
            }
            o.emit("summary", {{"lists", lists}, {"violations", violations}});
            o.flush();
            return violations ? kExitFinding : kExitOk;
        }

        if (used == dor) {
            auto ms = parse_bigints(d_m, "--m");
            std::vector<std::vector<BigInt>> sets;
            if (!d_primes.empty()) {
                sets.push_back(parse_bigints(d_primes, "--primes"));
            } else {
                std::vector<BigInt> pool;
                for (auto p : primes_up_to(d_p_max))
                    if (p != 2) pool.emplace_back(p);
                for (unsigned s = 1; s <= d_s_max; ++s)
                    for (auto& v : multisets(pool, s)) sets.push_back(std::move(v));
            }
            json params{{"cap", d_cap}, {"m", strings(ms)}};
            if (d_primes.empty()) {
                params["s_max"] = d_s_max;
                params["p_max"] = d_p_max;
            } else {
                params["primes"] = strings(sets[0]);
            }
            Output o(common, out, config_for("verify delta-oracle", params), store::run_timestamp(), false);
            std::size_t instances = 0, violations = 0;
            for (const auto& ps : sets) {
                std::vector<BigInt> usable;
                for (const auto& m : ms)
                    if (m > ps.back()) usable.push_back(m);
                if (usable.empty()) continue;
                auto rep = delta_oracle(ps, d_cap, usable);
                instances += rep.instances;
                violations += rep.violations;
                json payload{{"check", "delta_oracle"},
                             {"primes", strings(ps)},
                             {"m", strings(usable)},
                             {"instances", rep.instances},
                             {"violations", rep.violations},
                             {"holds", rep.violations == 0}};
                if (rep.tightest) {
                    const auto& t = *rep.tightest;
                    payload["tightest"] = {{"m", t.m.get_str()},
                                           {"exponents", t.exponents},
                                           {"target", store::to_json(t.target)},
                                           {"min_gap", t.min_gap ? store::to_json(*t.min_gap) : json(nullptr)},
                                           {"witness", t.witness},
                                           {"bound", store::to_json(t.bound)}};
                }
                o.emit("check_report", payload);
            }
            o.emit("summary", {{"instances", instances}, {"violations", violations}});
            o.flush();
            return violations ? kExitFinding : kExitOk;
        }

        if (used == bm) {
            int code = kExitOk;
            BoundReport rep;
            json params;
            if (bm_a->count()) {
                auto a = parse_bigints(b_a, "--a"), b = parse_bigints(b_b, "--b");
                auto inst = LinearFormInstance::make(a, b, prec);
                auto ev = evaluate_matveev(inst, prec);
                rep = make_report(BoundKind::matveev_lower,
                                  {{"a", join(a)},
                                   {"b", join(b)},
                                   {"B", inst.B.to_string()},
                                   {"Omega", inst.Omega.to_string()},
                                   {"lambda_zero", ev.lambda_zero ? "true" : "false"},
                                   {"log_abs_lambda", ev.log_abs_lambda ? ev.log_abs_lambda->to_string() : ""},
                                   {"holds", ev.holds ? "true" : "false"}},
                                  ev.bound, prec);
                params = {{"a", strings(a)}, {"b", strings(b)}, {"precision", prec}};
                if (!ev.holds) code = kExitFinding;
            } else if (bm_n->count()) {
                rep = make_report(BoundKind::matveev_c1, {{"n", std::to_string(b_n)}}, matveev_c1(b_n, prec), prec);
                params = {{"n", b_n}, {"precision", prec}};
            } else {
                throw UsageError("bounds matveev needs --n or --a/--b");
            }
            Output o(common, out, config_for("bounds matveev", params), store::run_timestamp(), false);
            o.emit("bound_report", store::to_json(rep));
            o.flush();
            return code;
        }

        auto emit_one = [&](const std::string& cmd, json params, const BoundReport& rep) {
            Output o(common, out, config_for(cmd, std::move(params)), store::run_timestamp(), false);
            o.emit("bound_report", store::to_json(rep));
            o.flush();
            return kExitOk;
        };

        if (used == bsg) {
            BigInt A = parse_bigints({b_A}, "--A")[0];
            return emit_one("bounds siegel", {{"s", b_s}, {"A", b_A}},
                            make_report(BoundKind::siegel, {{"s", std::to_string(b_s)}, {"A", b_A}},
                                        siegel_bound(b_s, A), 0));
        }
        if (used == bc23)
            return emit_one("bounds c23", {{"s", b_s}},
                            make_report(BoundKind::c23, {{"s", std::to_string(b_s)}}, c23(b_s), 0));
        if (used == bdl) {
            DeltaQuery dq{b_s, parse_bigints({b_nbig}, "--n")[0], parse_bigints({b_d}, "--d")[0],
                          parse_bigints(b_primes, "--primes")};
            return emit_one("bounds delta", {{"s", b_s}, {"n", b_nbig}, {"d", b_d}, {"primes", strings(dq.primes)}},
                            make_report(BoundKind::delta_lower,
                                        {{"s", std::to_string(b_s)}, {"n", b_nbig}, {"d", b_d},
                                         {"primes", join(dq.primes)}},
                                        delta_lower_bound(dq), 0));
        }
        if (used == bc24) {
            c24_opt.mode = c24_mode == "monotone" ? C24Mode::monotone : C24Mode::enumerate;
            BigInt n = parse_bigints({b_nbig}, "--n")[0];
            auto steps = c24_table(b_s, n, c24_opt);
            Output o(common, out,
                     config_for("bounds c24", {{"s", b_s}, {"n", b_nbig}, {"mode", c24_mode},
                                               {"budget", c24_opt.budget}}),
                     store::run_timestamp(), false);
            for (const auto& st : steps) {
                std::vector<std::pair<std::string, std::string>> inputs{
                    {"s", std::to_string(st.s)}, {"n", b_nbig}, {"mode", c24_mode}};
                if (st.s > 0) {
                    inputs.emplace_back("threshold", st.threshold.to_string());
                    inputs.emplace_back("minimizer", join(st.minimizer));
                    inputs.emplace_back("halved", st.halved ? "true" : "false");
                }
                o.emit("bound_report", store::to_json(make_report(BoundKind::c24, inputs, st.value, 0)));
            }
            o.flush();
            return kExitOk;
        }
        if (used == bth) {
            Interval C = Interval::from_decimal(t_C, prec), Q = Interval::from_decimal(t_Q, prec);
            return emit_one("bounds threshold", {{"C", t_C}, {"k", t_k}, {"Q", t_Q}, {"precision", prec}},
                            make_report(BoundKind::threshold,
                                        {{"C", t_C}, {"k", std::to_string(t_k)}, {"Q", t_Q}},
                                        threshold_small_prime(C, t_k, Q), prec));
        }

        if (used == cls) {
            Factorization f = cl_n.find_first_of("^*") != std::string::npos
                                  ? Factorization::parse(cl_n)
                                  : factorize(parse_bigints({cl_n}, "--N")[0]);
            auto q = parse_bigints(cl_q, "--q");
            if (cl_s > q.size()) throw UsageError("--s must not exceed the number of --q primes");
            Output o(common, out,
                     config_for("classify", {{"N", f.to_string()}, {"q", strings(q)}, {"s", cl_s}}),
                     store::run_timestamp(), false);
            for (const auto& c : classify_factors(f, q, cl_s)) o.emit("classified_factor", store::to_json(c));
            o.flush();
            return kExitOk;
        }

        if (used == ld) {
            auto res = store::load(load_path, !lenient);
            for (const auto& e : res.errors) err << load_path << ":" << e.line << ": " << e.message << "\n";
            out << res.envelopes.size() << " valid line(s), " << res.errors.size() << " invalid\n";
            return res.errors.empty() ? kExitOk : kExitFinding;
        }
    } catch (const store::LoadFailure& e) {
        err << "error: " << load_path << ": " << e.what() << "\n";
        return kExitFinding;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << used->help();
        return kExitUsage;
    } catch (const store::CheckpointMismatch& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    err << used->help();
    return kExitUsage;
}

} // namespace sigmalab::cli
