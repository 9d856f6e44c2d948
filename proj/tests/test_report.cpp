#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "weilscope/report.hpp"

using namespace weilscope;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("weilscope_test_" + name);
  fs::remove(p);
  return p;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "weilscope");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), {out, err});
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST(Report, Gf9RecordPrefixMatchesPublishedShape) {
  const Field f = Field::build(3, 2);
  const SpectrumRecord r = make_spectrum_record(f, 1, 2, 5, Domain::all_units);
  const std::string j = to_json(r).dump();
  const std::string expected =
      R"({"p":3,"n":1,"ext":2,"s":5,"k":2,"d1":2,"d2":1,"domain":"Lx","spectrum":[{"value":-3,"mult":2},{"value":0,"mult":2},{"value":3,"mult":3},{"value":6,"mult":1}],"moments":{"m1":9,"m2":81,"m3":243},"r_count":3)";
  EXPECT_EQ(j.substr(0, expected.size()), expected);
  EXPECT_NE(j.find("\"spectrum_digest\":\"" + r.digest + "\""), std::string::npos);
}

TEST(Report, NonTowerAndNonInvertible) {
  const Field f = Field::build(5, 2);
  const ojson j = to_json(make_spectrum_record(f, 2, 1, 9, Domain::all_units));
  EXPECT_TRUE(j["k"].is_null());
  EXPECT_TRUE(j["moments"].is_null());
  EXPECT_TRUE(j["r_count"].is_null());
  EXPECT_THROW(make_spectrum_record(f, 2, 1, 3, Domain::all_units), NotRationalError);
}

TEST(Report, CsvAndTable) {
  const SpectrumRecord r = make_spectrum_record(Field::build(3, 2), 1, 2, 5, Domain::all_units);
  EXPECT_EQ(to_csv(r), "p,n,ext,s,domain,value,mult\n3,1,2,5,Lx,-3,2\n3,1,2,5,Lx,0,2\n3,1,2,5,Lx,3,3\n3,1,2,5,Lx,6,1\n");
  EXPECT_NE(to_table(r).find("digest " + r.digest), std::string::npos);
}

TEST(Report, VerdictRoundTrip) {
  const ConjectureVerdict v = verify_five_values(Field::build(5, 2), 3);
  const ojson j = to_json(v);
  EXPECT_EQ(j.begin().key(), "conjecture");
  const ConjectureVerdict back = verdict_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(verdict_key(back), verdict_key(v));
}

TEST(Report, RunConfigRoundTrip) {
  RunConfig c;
  c.command = "spectrum";
  c.p = 13;
  c.n = 2;
  c.ext = 2;
  c.k = 5;
  c.a = "g^3";
  c.domain = "Fx";
  c.format = "csv";
  c.jobs = 8;
  c.cache = "/tmp/x.jsonl";
  c.size_cap = 12345;
  c.verify_cache = true;
  const RunConfig back = run_config_from_json(ojson::parse(to_json(c).dump()));
  EXPECT_EQ(back, c);
  RunConfig d;
  d.command = "scan";
  d.suite = "three_valued";
  d.max_q = 729;
  d.out = "x";
  EXPECT_EQ(run_config_from_json(to_json(d)), d);
}

TEST(Cache, MissThenHit) {
  const fs::path p = temp_file("cache_hit.jsonl");
  const CliRun first = run_cli({"spectrum", "--p", "5", "--ext", "2", "--s", "13", "--cache", p.string()});
  ASSERT_EQ(first.code, 0) << first.err;
  const std::string after_first = slurp(p);
  const CliRun second = run_cli({"spectrum", "--p", "5", "--ext", "2", "--s", "13", "--cache", p.string()});
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_EQ(slurp(p), after_first) << "hit must not append";
  SpectrumCache cache(p);
  EXPECT_EQ(cache.size(), 1u);
  ASSERT_TRUE(cache.lookup({5, 2, 13, "Lx"}).has_value());
  EXPECT_FALSE(cache.lookup({5, 2, 17, "Lx"}).has_value());
  fs::remove(p);
}

TEST(Cache, EnvironmentDefault) {
  const fs::path p = temp_file("cache_env.jsonl");
  setenv("WEILSCOPE_CACHE", p.string().c_str(), 1);
  const CliRun r = run_cli({"spectrum", "--p", "3", "--ext", "2", "--s", "5"});
  unsetenv("WEILSCOPE_CACHE");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(p));
  fs::remove(p);
}

TEST(Cache, CorruptTrailingRecordIsTruncated) {
  const fs::path p = temp_file("cache_trunc.jsonl");
  ASSERT_EQ(run_cli({"spectrum", "--p", "3", "--ext", "2", "--s", "5", "--cache", p.string()}).code, 0);
  const std::string good = slurp(p);
  {
    std::ofstream o(p, std::ios::app);
    o << "{\"key\":{\"p\":5";
  }
  std::ostringstream warn;
  SpectrumCache cache(p, warn);
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_NE(warn.str().find("truncating"), std::string::npos);
  EXPECT_EQ(slurp(p), good);
  fs::remove(p);
}

TEST(Cache, CorruptMiddleRecordIsAnError) {
  const fs::path p = temp_file("cache_mid.jsonl");
  {
    std::ofstream o(p);
    o << "not json\n{}\n";
  }
  std::ostringstream warn;
  EXPECT_THROW(SpectrumCache(p, warn), Error);
  fs::remove(p);
}

TEST(Cache, VerifyDetectsTamperedDigest) {
  const fs::path p = temp_file("cache_tamper.jsonl");
  ASSERT_EQ(run_cli({"spectrum", "--p", "5", "--ext", "2", "--s", "13", "--cache", p.string()}).code, 0);
  EXPECT_EQ(run_cli({"spectrum", "--p", "5", "--ext", "2", "--s", "13", "--cache", p.string(), "--verify-cache"}).code, 0);
  std::string text = slurp(p);
  const auto pos = text.find("\"digest\":\"") + 10;
  text.replace(pos, 16, "0000000000000000");
  {
    std::ofstream o(p, std::ios::trunc);
    o << text;
  }
  const CliRun r = run_cli({"spectrum", "--p", "5", "--ext", "2", "--s", "13", "--cache", p.string(), "--verify-cache"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("0000000000000000"), std::string::npos);
  EXPECT_NE(r.err.find("a5df5a7af216f9fd"), std::string::npos);
  fs::remove(p);
}

TEST(Cli, PublishedExamples) {
  const CliRun sp = run_cli({"spectrum", "--p", "3", "--n", "1", "--ext", "2", "--s", "5", "--format", "json"});
  EXPECT_EQ(sp.code, 0);
  EXPECT_EQ(sp.out.rfind(R"({"p":3,"n":1,"ext":2,"s":5,"k":2,"d1":2,"d2":1,"domain":"Lx",)", 0), 0u);
  const CliRun w = run_cli({"weil", "--p", "3", "--n", "1", "--ext", "2", "--s", "5", "--a", "0"});
  EXPECT_EQ(w.code, 0);
  EXPECT_EQ(ojson::parse(w.out)["value"], 0);
  const CliRun wg = run_cli({"weil", "--p", "3", "--ext", "2", "--s", "5", "--a", "g^4"});
  EXPECT_EQ(ojson::parse(wg.out)["value"], 6);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"weil", "--p", "3", "--ext", "2", "--s", "5", "--a", "zz"}).code, 2);
  EXPECT_EQ(run_cli({"field-info", "--p", "2", "--n", "30", "--size-cap", "1000"}).code, 2);
  EXPECT_EQ(run_cli({"field-info", "--p", "6"}).code, 2);
  EXPECT_EQ(run_cli({"spectrum", "--p", "7", "--s", "5"}).code, 2);  // not rational
  EXPECT_EQ(run_cli({"moments", "--p", "5", "--ext", "2", "--s", "9"}).code, 2);
  EXPECT_EQ(run_cli({"classify", "--p", "5", "--k", "2"}).code, 2);  // --k needs ext 2
  EXPECT_EQ(run_cli({"--version"}).code, 0);
  const CliRun err = run_cli({"weil", "--p", "3", "--ext", "2", "--s", "5", "--a", "zz"});
  EXPECT_EQ(std::count(err.err.begin(), err.err.end(), '\n'), 1);
}

TEST(Cli, OtherCommands) {
  const CliRun fi = run_cli({"field-info", "--p", "3", "--n", "2"});
  ASSERT_EQ(fi.code, 0);
  EXPECT_EQ(ojson::parse(fi.out)["generator"]["encoding"], 4);
  const CliRun cl = run_cli({"classify", "--p", "13", "--n", "2", "--ext", "2", "--k", "5"});
  ASSERT_EQ(cl.code, 0);
  EXPECT_EQ(ojson::parse(cl.out)["s"], 841);
  EXPECT_EQ(ojson::parse(cl.out)["theorem_mi"], true);
  const CliRun mo = run_cli({"moments", "--p", "3", "--ext", "2", "--s", "5"});
  ASSERT_EQ(mo.code, 0);
  EXPECT_EQ(ojson::parse(mo.out)["m3"], 243);
  const CliRun rs = run_cli({"rset", "--p", "5", "--ext", "2", "--s", "13"});
  ASSERT_EQ(rs.code, 0);
  EXPECT_EQ(ojson::parse(rs.out)["r_count"], 7);
  const CliRun tb = run_cli({"weil", "--p", "3", "--ext", "2", "--s", "5", "--a", "0", "--format", "table"});
  EXPECT_NE(tb.out.find("value: 0"), std::string::npos);
  const CliRun csv = run_cli({"spectrum", "--p", "3", "--ext", "2", "--s", "5", "--format", "csv"});
  EXPECT_EQ(csv.out.substr(0, 27), "p,n,ext,s,domain,value,mult");
}

TEST(Cli, VerifyAndScanResume) {
  const CliRun v = run_cli({"verify", "--suite", "vanishing", "--max-q", "625"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("\"outcome\":\"holds\""), std::string::npos);

  const fs::path out = temp_file("scan.jsonl");
  const CliRun first = run_cli({"scan", "--conjecture", "five_value_i", "--max-q", "2401", "--out", out.string()});
  ASSERT_EQ(first.code, 0) << first.err;
  const std::string full = slurp(out);
  // drop the last two records and resume
  std::string partial = full;
  for (int i = 0; i < 2; ++i) partial.resize(partial.rfind('\n', partial.size() - 2) + 1);
  {
    std::ofstream o(out, std::ios::trunc);
    o << partial;
  }
  const CliRun again = run_cli({"scan", "--conjecture", "five_value_i", "--max-q", "2401", "--out", out.string(), "--jobs", "2"});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(out), full);
  EXPECT_NE(again.err.find("2 verdicts"), std::string::npos) << again.err;
  fs::remove(out);
}
