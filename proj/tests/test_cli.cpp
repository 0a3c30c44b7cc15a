#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coopalloc/cli.hpp"
#include "coopalloc/config.hpp"

using namespace coopalloc;
using namespace coopalloc::cli;

namespace {

std::filesystem::path fixture(const std::string& name) {
  const char* dir = std::getenv("COOPSIM_FIXTURES");
  return std::filesystem::path(dir ? dir : "tests/fixtures") / name;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("coopsim_test_" + name);
}

}  // namespace

TEST_CASE("parse_args: alloc") {
  const Command c =
      parse_args({"alloc", "--per1", "0.001", "--per2", "0.0005", "--t1", "0.002", "--t2", "0.004",
                  "--k", "10"});
  const auto* a = std::get_if<Alloc>(&c.action);
  REQUIRE(a != nullptr);
  CHECK(a->per1 == 0.001);
  CHECK(a->per2 == 0.0005);
  CHECK(a->target2 / a->target1 == doctest::Approx(2.0));
  CHECK(a->k == 10);
  CHECK_FALSE(c.seed.has_value());
}

TEST_CASE("parse_args: run with overrides") {
  const Command c = parse_args({"run", "--config", "scenario.json", "--seed", "42"});
  CHECK(std::holds_alternative<Run>(c.action));
  REQUIRE(c.config_path.has_value());
  CHECK(c.config_path->string() == "scenario.json");
  CHECK(c.seed == 42u);
  CHECK_FALSE(c.out_path.has_value());

  const Command d = parse_args({"--seed", "5", "sweep-ratio", "--out", "x.csv"});
  CHECK(std::holds_alternative<SweepRatio>(d.action));
  CHECK(d.seed == 5u);
  CHECK(d.out_path->string() == "x.csv");
}

TEST_CASE("parse_args: usage errors") {
  CHECK_THROWS_AS(parse_args({}), UsageError);
  CHECK_THROWS_AS(parse_args({"launch"}), UsageError);
  CHECK_THROWS_AS(parse_args({"run", "--bogus"}), UsageError);
  CHECK_THROWS_AS(parse_args({"alloc", "--per1", "0.1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"run", "--seed", "abc"}), UsageError);
  CHECK_THROWS_AS(parse_args({"--help"}), HelpRequested);
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"frobnicate"}).code == kExitUsage);
  CHECK(invoke({"sweep-relays", "--unknown-flag"}).code == kExitUsage);
  CHECK(invoke({"--help"}).code == kExitOk);

  const Outcome bad_range = invoke({"alloc", "--per1", "2", "--per2", "0.1", "--t1", "0.1", "--t2",
                                    "0.1"});
  CHECK(bad_range.code == kExitRuntime);
  CHECK(bad_range.err.find("error") != std::string::npos);

  CHECK(invoke({"run", "--config", "/no/such/file.json"}).code == kExitRuntime);
}

TEST_CASE("alloc report") {
  Outcome o = invoke({"alloc", "--per1", "0.001", "--per2", "0.0005", "--t1", "0.002", "--t2",
                      "0.004", "--k", "10"});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("seed: 1") == 0);
  CHECK(o.out.find("N1=2 N2=8") != std::string::npos);
  CHECK(o.out.find("oracle:") != std::string::npos);
  CHECK(o.out.find("gap:") != std::string::npos);

  o = invoke({"alloc", "--per1", "0.0005", "--per2", "0.0005", "--t1", "0.0005", "--t2", "0.0005"});
  CHECK(o.out.find("N1=5 N2=5") != std::string::npos);

  o = invoke({"alloc", "--per1", "0", "--per2", "0", "--t1", "0.0005", "--t2", "0.001"});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("uniform fallback") != std::string::npos);
  CHECK(o.out.find("N1=5 N2=5") != std::string::npos);
}

TEST_CASE("config parsing") {
  const SimConfig c = sim_config_from_json(load_json(fixture("scenario.json")));
  CHECK(c.burst_len_k == 10);
  CHECK(c.seed == 7u);
  CHECK(c.profiles[1].traffic == TrafficClass::RealTime);
  CHECK(effective_per(c.link_models[0]) == 0.001);
  CHECK(c.duration_bursts == 5000);

  // Serializing and re-reading keeps every field.
  CHECK(to_json(sim_config_from_json(to_json(c))) == to_json(c));

  nlohmann::json doc = to_json(c);
  doc["burst_len_k_typo"] = 3;
  CHECK_THROWS_AS(sim_config_from_json(doc), ConfigError);

  doc = to_json(c);
  doc["rd_rate"] = 5.0;
  CHECK_THROWS_AS(sim_config_from_json(doc), ConfigError);

  doc = to_json(c);
  doc["link_models"][0] = {{"type", "Rayleigh"}};
  CHECK_THROWS_AS(sim_config_from_json(doc), ConfigError);

  doc = to_json(c);
  doc["link_models"][1] = {{"type", "AwgnQam16"}, {"snr_db", 18.0}};
  const SimConfig q = sim_config_from_json(doc);
  CHECK(std::get<AwgnQam16>(q.link_models[1]).coding_gain_db == 4.0);

  doc = to_json(c);
  doc["duration_bursts"] = 0;
  CHECK_THROWS_AS(sim_config_from_json(doc), ConfigError);

  CHECK(relay_spec_from_json(load_json(fixture("relays.json"))).relay_counts.size() == 5);
  CHECK_THROWS_AS(relay_spec_from_json({{"relay_counts", {3, 1}}}), ConfigError);
  CHECK_THROWS_AS(relay_spec_from_json({{"sr_rates", nlohmann::json::array()}}), ConfigError);

  const RatioSweepSpec r = ratio_spec_from_json(load_json(fixture("ratio.json")));
  CHECK(r.a_values.size() == 5);
  CHECK(r.rounding == Rounding::Carry);
  CHECK_THROWS_AS(ratio_spec_from_json({{"a_values", {0.0}}}), ConfigError);
  CHECK(ratio_spec_from_json(nlohmann::json::object()).a_values.size() == 21);
}

TEST_CASE("subcommands are deterministic") {
  const std::vector<std::vector<std::string>> commands{
      {"run", "--config", fixture("scenario.json").string()},
      {"sweep-relays", "--config", fixture("relays.json").string()},
      {"sweep-ratio", "--config", fixture("ratio.json").string()},
  };
  for (const auto& base : commands) {
    const auto p1 = scratch("a.csv");
    const auto p2 = scratch("b.csv");
    auto args1 = base;
    args1.insert(args1.end(), {"--out", p1.string()});
    auto args2 = base;
    args2.insert(args2.end(), {"--out", p2.string(), "--threads", "2"});
    REQUIRE(invoke(args1).code == kExitOk);
    REQUIRE(invoke(args2).code == kExitOk);
    const std::string a = slurp(p1);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
  }
}

TEST_CASE("seed handling") {
  const std::string cfg = fixture("scenario.json").string();
  const Outcome from_config = invoke({"run", "--config", cfg});
  CHECK(from_config.err.find("seed: 7") != std::string::npos);
  const Outcome overridden = invoke({"run", "--config", cfg, "--seed", "8"});
  CHECK(overridden.err.find("seed: 8") != std::string::npos);
  CHECK(from_config.out != overridden.out);

  const Outcome defaults = invoke({"sweep-relays", "--config", fixture("relays.json").string(),
                                   "--seed", "1"});
  CHECK(defaults.out.rfind("sweep,coordinate,scheme", 0) == 0);
}

TEST_CASE("run writes a trace") {
  const auto trace = scratch("trace.csv");
  const Outcome o = invoke({"run", "--config", fixture("scenario.json").string(), "--trace",
                            trace.string()});
  CHECK(o.code == kExitOk);
  const std::string t = slurp(trace);
  CHECK(t.rfind("burst,n1,n2", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 5001);
  std::filesystem::remove(trace);
}
