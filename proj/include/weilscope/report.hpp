#pragma once

// JSON / CSV / table serialization, run configuration and the spectrum cache.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "weilscope/errors.hpp"
#include "weilscope/exponent.hpp"
#include "weilscope/field.hpp"
#include "weilscope/verify.hpp"
#include "weilscope/weil.hpp"

namespace weilscope {

inline constexpr const char* kVersion = "weilscope 1.0.0";

// ---------------------------------------------------------------------------
// Spectrum records

struct SpectrumRecord {
  std::uint64_t p = 0;
  unsigned n = 0;
  unsigned ext = 1;
  std::uint64_t s = 0;
  std::optional<std::uint64_t> k, d1, d2;
  Domain domain = Domain::all_units;
  WeilSpectrum spectrum;
  std::optional<MomentReport> moments;  // only for invertible s
  std::string digest;
};

/// Builds the record for W_{L,s} with |L| = p^{n ext}. k, d1, d2 are filled
/// for quadratic towers (ext = 2) when s has a normalized Niho form.
inline SpectrumRecord make_spectrum_record(const Field& f, unsigned n, unsigned ext,
                                           std::uint64_t s, Domain d,
                                           const EngineOptions& opts = {}) {
  SpectrumRecord r;
  r.p = f.characteristic();
  r.n = n;
  r.ext = ext;
  const ExponentSpec cls = classify(f, s);
  r.s = cls.s;
  if (ext == 2 && cls.k) {
    r.k = cls.k;
    r.d1 = cls.d1;
    r.d2 = cls.d2;
  }
  r.domain = d;
  if (d == Domain::subfield_units && !f.has_tower()) {
    throw PreconditionError("Fx domain needs an even-degree field");
  }
  const auto values = value_table(f, cls.s, opts);
  r.spectrum = spectrum_from_table(f, cls.s, d, values);
  if (cls.invertible) r.moments = moments_from_table(f, cls.s, values);
  r.digest = spectrum_digest(r.spectrum);
  return r;
}

inline ojson opt_json(const std::optional<std::uint64_t>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

inline ojson to_json(const SpectrumRecord& r) {
  ojson j;
  j["p"] = r.p;
  j["n"] = r.n;
  j["ext"] = r.ext;
  j["s"] = r.s;
  j["k"] = opt_json(r.k);
  j["d1"] = opt_json(r.d1);
  j["d2"] = opt_json(r.d2);
  j["domain"] = std::string(domain_tag(r.domain));
  j["spectrum"] = spectrum_entries_json(r.spectrum);
  if (r.moments) {
    j["moments"] = {{"m1", r.moments->m1}, {"m2", r.moments->m2}, {"m3", r.moments->m3}};
    j["r_count"] = r.moments->r_count;
  } else {
    j["moments"] = nullptr;
    j["r_count"] = nullptr;
  }
  j["spectrum_digest"] = r.digest;
  j["version"] = kVersion;
  return j;
}

/// CSV mirror: one row per (value, mult).
inline std::string to_csv(const SpectrumRecord& r) {
  std::ostringstream os;
  os << "p,n,ext,s,domain,value,mult\n";
  for (const auto& e : r.spectrum.entries) {
    os << r.p << ',' << r.n << ',' << r.ext << ',' << r.s << ',' << domain_tag(r.domain) << ','
       << e.value << ',' << e.mult << '\n';
  }
  return os.str();
}

inline std::string to_table(const SpectrumRecord& r) {
  std::ostringstream os;
  os << "GF(" << r.p << "^" << r.n * r.ext << ")  s = " << r.s;
  if (r.k) os << "  k = " << *r.k << "  d1 = " << *r.d1 << "  d2 = " << *r.d2;
  os << "  domain " << domain_tag(r.domain) << '\n';
  os << "  value        mult\n";
  for (const auto& e : r.spectrum.entries) {
    std::string v = std::to_string(e.value);
    os << "  " << v << std::string(v.size() < 12 ? 12 - v.size() : 1, ' ') << e.mult << '\n';
  }
  if (r.moments) {
    os << "moments " << r.moments->m1 << ' ' << r.moments->m2 << ' ' << r.moments->m3
       << "  |R| = " << r.moments->r_count << '\n';
  }
  os << "digest " << r.digest << '\n';
  return os.str();
}

/// Generic key/value table for flat JSON objects.
inline std::string json_as_table(const ojson& j) {
  std::ostringstream os;
  for (auto it = j.begin(); it != j.end(); ++it) {
    os << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Verdicts

inline ojson to_json(const ConjectureVerdict& v) {
  ojson j;
  j["conjecture"] = v.conjecture;
  j["p"] = v.p;
  j["n"] = v.n;
  j["k"] = opt_json(v.k);
  j["s"] = opt_json(v.s);
  j["outcome"] = std::string(outcome_name(v.outcome));
  j["witness"] = v.witness;
  j["spectrum_digest"] = v.spectrum_digest ? ojson(*v.spectrum_digest) : ojson(nullptr);
  j["ext"] = v.ext;
  j["evidence"] = v.evidence;
  j["version"] = kVersion;
  return j;
}

inline ConjectureVerdict verdict_from_json(const ojson& j) {
  ConjectureVerdict v;
  v.conjecture = j.at("conjecture").get<std::string>();
  v.p = j.at("p").get<std::uint64_t>();
  v.n = j.at("n").get<unsigned>();
  v.ext = j.value("ext", 2u);
  if (!j.at("k").is_null()) v.k = j.at("k").get<std::uint64_t>();
  if (!j.at("s").is_null()) v.s = j.at("s").get<std::uint64_t>();
  v.outcome = parse_outcome(j.at("outcome").get<std::string>());
  v.witness = j.at("witness");
  if (!j.at("spectrum_digest").is_null()) v.spectrum_digest = j.at("spectrum_digest").get<std::string>();
  v.evidence = j.value("evidence", ojson::object());
  return v;
}

// ---------------------------------------------------------------------------
// JSONL files

/// Reads a JSON-lines file. A trailing line that does not parse (an
/// interrupted write) is cut off and reported on `warn`; a bad line anywhere
/// else is an error.
inline std::vector<ojson> read_jsonl(const std::filesystem::path& path, std::ostream& warn) {
  std::vector<ojson> out;
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("read failed on " + path.string());

  std::size_t pos = 0;
  std::size_t good_end = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const std::size_t end = nl == std::string::npos ? content.size() : nl;
    const std::string line = content.substr(pos, end - pos);
    ++line_no;
    const bool last = nl == std::string::npos || nl + 1 >= content.size();
    if (!line.empty()) {
      ojson j = ojson::parse(line, nullptr, false);
      const bool complete = nl != std::string::npos;
      if (j.is_discarded() || !complete) {
        if (!last) {
          throw Error(path.string() + ":" + std::to_string(line_no) + ": corrupt record");
        }
        warn << "warning: " << path.string() << ": truncating corrupt trailing record at line "
             << line_no << '\n';
        std::filesystem::resize_file(path, good_end);
        break;
      }
      out.push_back(std::move(j));
    }
    good_end = nl == std::string::npos ? content.size() : nl + 1;
    pos = good_end;
  }
  return out;
}

inline void append_jsonl(const std::filesystem::path& path, const ojson& j) {
  std::ofstream outf(path, std::ios::binary | std::ios::app);
  if (!outf) throw Error("cannot open " + path.string() + " for append");
  outf << j.dump() << '\n';
  outf.flush();
  if (!outf) throw Error("write failed on " + path.string());
}

// ---------------------------------------------------------------------------
// Cache

struct CacheKey {
  std::uint64_t p = 0;
  unsigned degree = 0;
  std::uint64_t s = 0;
  std::string domain = "Lx";
  auto operator<=>(const CacheKey&) const = default;
};

struct CacheRecord {
  CacheKey key;
  std::string digest;
  ojson record;  // full spectrum record as emitted
  ojson moments;
  std::string timestamp;
  std::string version;
};

inline ojson to_json(const CacheRecord& c) {
  ojson j;
  j["key"] = {{"p", c.key.p}, {"degree", c.key.degree}, {"s", c.key.s}, {"domain", c.key.domain}};
  j["digest"] = c.digest;
  j["moments"] = c.moments;
  j["timestamp"] = c.timestamp;
  j["version"] = c.version;
  j["record"] = c.record;
  return j;
}

inline CacheRecord cache_record_from_json(const ojson& j) {
  CacheRecord c;
  const auto& k = j.at("key");
  c.key = {k.at("p").get<std::uint64_t>(), k.at("degree").get<unsigned>(),
           k.at("s").get<std::uint64_t>(), k.at("domain").get<std::string>()};
  c.digest = j.at("digest").get<std::string>();
  c.moments = j.at("moments");
  c.timestamp = j.at("timestamp").get<std::string>();
  c.version = j.at("version").get<std::string>();
  c.record = j.at("record");
  return c;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Append-only JSONL cache. Records from another tool version are ignored on
/// lookup, so a formula fix invalidates old entries without touching the file.
class SpectrumCache {
 public:
  explicit SpectrumCache(std::filesystem::path path, std::ostream& warn = std::cerr)
      : path_(std::move(path)) {
    for (const auto& j : read_jsonl(path_, warn)) {
      CacheRecord c = cache_record_from_json(j);
      if (c.version != kVersion) continue;
      records_.insert_or_assign(c.key, std::move(c));
    }
  }

  const std::filesystem::path& path() const { return path_; }

  std::optional<CacheRecord> lookup(const CacheKey& key) const {
    auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  void append(const CacheRecord& c) {
    append_jsonl(path_, to_json(c));
    records_.insert_or_assign(c.key, c);
  }

  std::size_t size() const { return records_.size(); }

 private:
  std::filesystem::path path_;
  std::map<CacheKey, CacheRecord> records_;
};

inline CacheRecord make_cache_record(const SpectrumRecord& r) {
  CacheRecord c;
  c.key = {r.p, r.n * r.ext, r.s, std::string(domain_tag(r.domain))};
  c.digest = r.digest;
  const ojson j = to_json(r);
  c.moments = j["moments"];
  c.record = j;
  c.timestamp = utc_timestamp();
  c.version = kVersion;
  return c;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  std::string command;
  std::uint64_t p = 0;
  unsigned n = 1;
  unsigned ext = 1;
  std::optional<std::uint64_t> s;
  std::optional<std::uint64_t> k;
  std::optional<std::string> a;
  std::string domain = "Lx";
  std::string format = "json";
  unsigned jobs = 1;
  std::optional<std::string> cache;
  std::uint64_t size_cap = Field::kDefaultSizeCap;
  std::string suite;
  std::uint64_t max_q = 0;
  std::uint64_t min_q = 0;
  std::optional<std::string> out;
  bool verify_cache = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline ojson to_json(const RunConfig& c) {
  ojson j;
  j["command"] = c.command;
  j["p"] = c.p;
  j["n"] = c.n;
  j["ext"] = c.ext;
  j["s"] = opt_json(c.s);
  j["k"] = opt_json(c.k);
  j["a"] = c.a ? ojson(*c.a) : ojson(nullptr);
  j["domain"] = c.domain;
  j["format"] = c.format;
  j["jobs"] = c.jobs;
  j["cache"] = c.cache ? ojson(*c.cache) : ojson(nullptr);
  j["size_cap"] = c.size_cap;
  j["suite"] = c.suite;
  j["max_q"] = c.max_q;
  j["min_q"] = c.min_q;
  j["out"] = c.out ? ojson(*c.out) : ojson(nullptr);
  j["verify_cache"] = c.verify_cache;
  return j;
}

inline RunConfig run_config_from_json(const ojson& j) {
  RunConfig c;
  auto opt_u = [&](const char* key) -> std::optional<std::uint64_t> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::uint64_t>();
  };
  auto opt_s = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
  };
  c.command = j.at("command").get<std::string>();
  c.p = j.value("p", std::uint64_t{0});
  c.n = j.value("n", 1u);
  c.ext = j.value("ext", 1u);
  c.s = opt_u("s");
  c.k = opt_u("k");
  c.a = opt_s("a");
  c.domain = j.value("domain", std::string("Lx"));
  c.format = j.value("format", std::string("json"));
  c.jobs = j.value("jobs", 1u);
  c.cache = opt_s("cache");
  c.size_cap = j.value("size_cap", Field::kDefaultSizeCap);
  c.suite = j.value("suite", std::string());
  c.max_q = j.value("max_q", std::uint64_t{0});
  c.min_q = j.value("min_q", std::uint64_t{0});
  c.out = opt_s("out");
  c.verify_cache = j.value("verify_cache", false);
  return c;
}

}  // namespace weilscope
