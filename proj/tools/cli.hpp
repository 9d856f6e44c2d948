#pragma once

// Command dispatch for the weilscope tool. Kept in a header so tests can run
// commands in-process against string streams.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "weilscope/weilscope.hpp"

namespace weilscope::cli {

enum ExitCode : int { kOk = 0, kFinding = 1, kUsage = 2 };

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

namespace detail {

inline Field build_field(const RunConfig& c) {
  if (c.ext != 1 && c.ext != 2) throw PreconditionError("--ext must be 1 or 2");
  if (c.p == 0) throw PreconditionError("--p is required");
  return Field::build(c.p, c.n * c.ext, c.size_cap);
}

inline std::uint64_t exponent(const RunConfig& c, const Field& f) {
  if (c.s && c.k) throw PreconditionError("give either --s or --k, not both");
  if (c.s) {
    if (*c.s == 0) throw PreconditionError("--s must be positive");
    return *c.s;
  }
  if (c.k) {
    if (c.ext != 2) throw PreconditionError("--k needs a quadratic tower (--ext 2)");
    const std::uint64_t P = f.sub_order();
    return 1 + (*c.k % (P + 1)) * (P - 1);
  }
  throw PreconditionError("--s or --k is required");
}

inline void print(const Streams& io, const RunConfig& c, const ojson& j) {
  if (c.format == "table") {
    io.out << json_as_table(j);
  } else if (c.format == "csv") {
    std::string head, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
      head += (head.empty() ? "" : ",") + it.key();
      row += (row.empty() ? "" : ",") + (it->is_string() ? it->get<std::string>() : it->dump());
    }
    io.out << head << '\n' << row << '\n';
  } else {
    io.out << j.dump() << '\n';
  }
}

inline ojson field_header(const RunConfig& c, const Field& f) {
  ojson j;
  j["p"] = f.characteristic();
  j["n"] = c.n;
  j["ext"] = c.ext;
  return j;
}

inline SpectrumRecord record_from_json(const ojson& j) {
  SpectrumRecord r;
  r.p = j.at("p").get<std::uint64_t>();
  r.n = j.at("n").get<unsigned>();
  r.ext = j.at("ext").get<unsigned>();
  r.s = j.at("s").get<std::uint64_t>();
  if (!j.at("k").is_null()) {
    r.k = j.at("k").get<std::uint64_t>();
    r.d1 = j.at("d1").get<std::uint64_t>();
    r.d2 = j.at("d2").get<std::uint64_t>();
  }
  r.domain = parse_domain(j.at("domain").get<std::string>());
  r.spectrum = {r.p, r.n * r.ext, r.s, r.domain, {}};
  for (const auto& e : j.at("spectrum")) {
    r.spectrum.entries.push_back({e.at("value").get<std::int64_t>(), e.at("mult").get<std::uint64_t>()});
  }
  if (!j.at("moments").is_null()) {
    MomentReport m;
    m.m1 = j["moments"]["m1"].get<std::int64_t>();
    m.m2 = j["moments"]["m2"].get<std::int64_t>();
    m.m3 = j["moments"]["m3"].get<std::int64_t>();
    m.r_count = j.at("r_count").get<std::uint64_t>();
    r.moments = m;
  }
  r.digest = j.at("spectrum_digest").get<std::string>();
  return r;
}

// ---------------------------------------------------------------------------

inline int cmd_field_info(const RunConfig& c, const Streams& io) {
  const Field f = build_field(c);
  ojson j = field_header(c, f);
  j["q"] = f.order();
  j["modulus"] = f.modulus();
  j["generator"] = element_json(f, f.generator());
  j["generator_poly"] = f.polynomial_notation(f.generator());
  j["sub_order"] = f.has_tower() ? ojson(f.sub_order()) : ojson(nullptr);
  j["minus_one"] = element_json(f, f.minus_one());
  print(io, c, j);
  return kOk;
}

inline int cmd_classify(const RunConfig& c, const Streams& io) {
  const Field f = build_field(c);
  const ExponentSpec e = classify(f, exponent(c, f));
  ojson j = field_header(c, f);
  j["s"] = e.s;
  j["invertible"] = e.invertible;
  j["degenerate"] = e.degenerate;
  j["niho"] = e.niho;
  j["rational"] = e.rational;
  j["frobenius_power"] = e.frobenius_power ? ojson(*e.frobenius_power) : ojson(nullptr);
  j["normalized_s"] = opt_json(e.normalized_s);
  j["k"] = opt_json(e.k);
  j["d1"] = opt_json(e.d1);
  j["d2"] = opt_json(e.d2);
  if (e.k && f.characteristic() != 2) {
    const HypothesisReport h = hypothesis_check(*e.k, f.characteristic(), f.degree() / 2);
    j["case_i"] = h.case_i;
    j["case_ii"] = h.case_ii;
    j["theorem_mi"] = h.theorem_mi;
  }
  print(io, c, j);
  return kOk;
}

inline int cmd_weil(const RunConfig& c, const Streams& io) {
  const Field f = build_field(c);
  const std::uint64_t s = exponent(c, f);
  if (!c.a) throw PreconditionError("--a is required");
  const Element a = f.parse(*c.a);
  const CyclotomicCounts w = weil_sum(f, s, a);
  ojson j = field_header(c, f);
  j["s"] = s;
  j["a"] = element_json(f, a);
  j["counts"] = w.counts;
  j["rational"] = w.is_rational();
  j["value"] = w.is_rational() ? ojson(w.rational_value()) : ojson(nullptr);
  print(io, c, j);
  return kOk;
}

inline int cmd_spectrum(const RunConfig& c, const Streams& io) {
  const Field f = build_field(c);
  const std::uint64_t s = classify(f, exponent(c, f)).s;
  const Domain d = parse_domain(c.domain);
  EngineOptions opts;
  opts.jobs = c.jobs;

  std::optional<SpectrumCache> cache;
  std::optional<std::string> cache_path = c.cache;
  if (!cache_path) {
    if (const char* env = std::getenv("WEILSCOPE_CACHE"); env && *env) cache_path = env;
  }
  if (cache_path) cache.emplace(*cache_path, io.err);

  SpectrumRecord rec;
  bool have = false;
  if (cache) {
    const CacheKey key{f.characteristic(), f.degree(), s, std::string(domain_tag(d))};
    if (auto hit = cache->lookup(key)) {
      if (c.verify_cache) {
        const SpectrumRecord fresh = make_spectrum_record(f, c.n, c.ext, s, d, opts);
        if (fresh.digest != hit->digest) {
          io.err << "digest mismatch: cached " << hit->digest << " recomputed " << fresh.digest
                 << '\n';
          return kFinding;
        }
      }
      rec = record_from_json(hit->record);
      rec.n = c.n;
      rec.ext = c.ext;
      have = true;
    }
  }
  if (!have) {
    rec = make_spectrum_record(f, c.n, c.ext, s, d, opts);
    if (cache) cache->append(make_cache_record(rec));
  }

  if (c.format == "csv") {
    io.out << to_csv(rec);
  } else if (c.format == "table") {
    io.out << to_table(rec);
  } else {
    io.out << to_json(rec).dump() << '\n';
  }
  return kOk;
}

inline int cmd_moments(const RunConfig& c, const Streams& io) {
  const Field f = build_field(c);
  const std::uint64_t s = classify(f, exponent(c, f)).s;
  EngineOptions opts;
  opts.jobs = c.jobs;
  const MomentReport m = moments(f, s, opts);
  ojson j = field_header(c, f);
  j["s"] = s;
  j["m1"] = m.m1;
  j["m2"] = m.m2;
  j["m3"] = m.m3;
  j["r_count"] = m.r_count;
  j["expected"] = {{"m1", m.expected_m1}, {"m2", m.expected_m2}, {"m3", m.expected_m3}};
  j["consistent"] = m.consistent();
  print(io, c, j);
  return m.consistent() ? kOk : kFinding;
}

inline int cmd_rset(const RunConfig& c, const Streams& io) {
  const Field f = build_field(c);
  const ExponentSpec e = classify(f, exponent(c, f));
  ojson j = field_header(c, f);
  j["s"] = e.s;
  const std::uint64_t r = r_count_bruteforce(f, e.s);
  j["r_count"] = r;
  int code = kOk;
  if (c.ext == 2 && e.k && e.invertible) {
    const std::uint64_t closed = r_count_closed_form(f.sub_order(), *e.d1, *e.d2);
    j["r_closed_form"] = closed;
    j["agree"] = closed == r;
    if (closed != r) code = kFinding;
  } else {
    j["r_closed_form"] = nullptr;
  }
  print(io, c, j);
  return code;
}

/// Shared by verify and scan. Resumes from `out` when it exists.
inline int cmd_suite(const RunConfig& c, const Streams& io) {
  if (c.suite.empty()) throw PreconditionError("a suite / conjecture name is required");
  if (c.max_q == 0) throw PreconditionError("--max-q is required");
  SuiteConfig sc;
  sc.suite = c.suite;
  sc.max_q = c.max_q;
  sc.min_q = c.min_q;
  sc.jobs = c.jobs;
  sc.size_cap = c.size_cap;

  std::set<VerdictKey> done;
  std::size_t prior_fails = 0;
  if (c.out) {
    for (const auto& j : read_jsonl(*c.out, io.err)) {
      const ConjectureVerdict v = verdict_from_json(j);
      if (v.conjecture != c.suite) continue;
      done.insert(verdict_key(v));
      prior_fails += v.outcome == Outcome::fails;
    }
  }
  const SuiteSummary sum = run_suite(sc, done, [&](const ConjectureVerdict& v) {
    const ojson j = to_json(v);
    if (c.out) {
      append_jsonl(*c.out, j);
    } else {
      io.out << j.dump() << '\n';
      io.out.flush();
    }
  });
  io.err << c.suite << ": " << sum.emitted << " verdicts (" << sum.holds << " holds, "
         << sum.fails << " fails, " << sum.vacuous << " vacuous), " << sum.skipped
         << " resumed\n";
  return (sum.fails + prior_fails) > 0 ? kFinding : kOk;
}

inline void add_field_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--p", c.p, "characteristic")->required();
  sub->add_option("--n", c.n, "base degree");
  sub->add_option("--ext", c.ext, "extension degree (1 or 2)");
  sub->add_option("--size-cap", c.size_cap, "largest field order to tabulate");
  sub->add_option("--format", c.format, "json | csv | table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
}

inline void add_exponent_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--s", c.s, "exponent");
  sub->add_option("--k", c.k, "Niho parameter, s = 1 + k(p^n - 1)");
}

}  // namespace detail

/// Parses argv and runs one command. Never throws.
inline int run(int argc, const char* const* argv, const Streams& io) {
  RunConfig c;
  CLI::App app{"Weil sums of Niho exponents over finite fields"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* fi = app.add_subcommand("field-info", "modulus, generator and tower data");
  detail::add_field_options(fi, c);

  auto* cl = app.add_subcommand("classify", "exponent classification and Niho invariants");
  detail::add_field_options(cl, c);
  detail::add_exponent_options(cl, c);

  auto* we = app.add_subcommand("weil", "one Weil sum");
  detail::add_field_options(we, c);
  detail::add_exponent_options(we, c);
  we->add_option("--a", c.a, "element: encoding, polynomial or g^j")->required();

  auto* sp = app.add_subcommand("spectrum", "value distribution over L* or F*");
  detail::add_field_options(sp, c);
  detail::add_exponent_options(sp, c);
  sp->add_option("--domain", c.domain, "Lx | Fx")->check(CLI::IsMember({"Lx", "Fx"}));
  sp->add_option("--jobs", c.jobs, "worker threads");
  sp->add_option("--cache", c.cache, "cache file (default $WEILSCOPE_CACHE)");
  sp->add_flag("--verify-cache", c.verify_cache, "recompute cached spectra and compare digests");

  auto* mo = app.add_subcommand("moments", "first three power moments");
  detail::add_field_options(mo, c);
  detail::add_exponent_options(mo, c);
  mo->add_option("--jobs", c.jobs, "worker threads");

  auto* rs = app.add_subcommand("rset", "|R| by enumeration and closed form");
  detail::add_field_options(rs, c);
  detail::add_exponent_options(rs, c);

  std::string suite_help = "one of:";
  for (const auto& s : suite_names()) suite_help += " " + s;
  auto* ve = app.add_subcommand("verify", "run a theorem suite, verdicts as JSON lines");
  ve->add_option("--suite", c.suite, suite_help)->required()->check(CLI::IsMember(suite_names()));
  auto* sc = app.add_subcommand("scan", "resumable conjecture scan into a JSON-lines file");
  sc->add_option("--conjecture", c.suite, suite_help)->required()->check(CLI::IsMember(suite_names()));
  for (auto* sub : {ve, sc}) {
    sub->add_option("--max-q", c.max_q, "largest field order")->required();
    sub->add_option("--min-q", c.min_q, "smallest field order");
    sub->add_option("--jobs", c.jobs, "worker threads");
    sub->add_option("--size-cap", c.size_cap, "largest field order to tabulate");
    sub->add_option("--out", c.out, "JSON-lines output; existing records are skipped");
  }

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    io.err << "error: unknown command '" << argv[1] << "'\n";
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    io.out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    io.err << "error: " << msg << '\n';
    return kUsage;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      c.command = sub->get_name();
    }
    if (c.jobs == 0) c.jobs = 1;
    if (c.command == "field-info") return detail::cmd_field_info(c, io);
    if (c.command == "classify") return detail::cmd_classify(c, io);
    if (c.command == "weil") return detail::cmd_weil(c, io);
    if (c.command == "spectrum") return detail::cmd_spectrum(c, io);
    if (c.command == "moments") return detail::cmd_moments(c, io);
    if (c.command == "rset") return detail::cmd_rset(c, io);
    return detail::cmd_suite(c, io);
  } catch (const NotRationalError& e) {
    io.err << "error: " << e.what() << '\n';
    return e.internal() ? kFinding : kUsage;
  } catch (const PreconditionError& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SingularSystemError& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace weilscope::cli
