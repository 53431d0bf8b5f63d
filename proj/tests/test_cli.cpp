#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "cli_runner.hpp"

using testing::run_cli;
using testing::ScratchDir;
using testing::slurp;
using Json = nlohmann::json;

namespace {

bool contains(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

std::string q(const std::string& path) { return "\"" + path + "\""; }

}  // namespace

TEST_CASE("cli: preset writes problem and references") {
  ScratchDir dir("preset");
  const auto r = run_cli("preset --name robotarium --out " + q(dir.file("r.json")));
  REQUIRE(r.exit_code == 0);
  const Json problem = Json::parse(slurp(dir.file("r.json")));
  CHECK(problem["species"][1]["count"] == 9);
  const Json refs = Json::parse(slurp(dir.file("r.refs.json")));
  CHECK(refs["allocations"]["risk_averse"] == Json::parse("[[4,3],[2,6]]"));

  const auto unknown = run_cli("preset --name mars --out " + q(dir.file("m.json")));
  CHECK(unknown.exit_code == 2);
  CHECK(contains(unknown.output, "robotarium"));
  CHECK_FALSE(std::filesystem::exists(dir.file("m.json")));
}

TEST_CASE("cli: solve") {
  ScratchDir dir("solve");
  REQUIRE(run_cli("preset --out " + q(dir.file("r.json"))).exit_code == 0);

  const auto r = run_cli("solve " + q(dir.file("r.json")) +
                         " --method adaptive --seed 0 --out " +
                         q(dir.file("a.json")));
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "min task probability"));
  const Json a = Json::parse(slurp(dir.file("a.json")));
  CHECK(a["min_task_prob"].get<double>() >= 0.638);
  CHECK(a["solve_stats"]["seconds"].is_null());

  for (int i = 0; i < 2; ++i) {
    REQUIRE(run_cli("solve " + q(dir.file("r.json")) +
                    " --method random --seed 7 --out " +
                    q(dir.file("rand" + std::to_string(i) + ".json")))
                .exit_code == 0);
  }
  CHECK(slurp(dir.file("rand0.json")) == slurp(dir.file("rand1.json")));

  const auto timed = run_cli("solve " + q(dir.file("r.json")) +
                             " --method neutral --timing --out " +
                             q(dir.file("t.json")));
  REQUIRE(timed.exit_code == 0);
  CHECK(Json::parse(slurp(dir.file("t.json")))["solve_stats"]["seconds"].is_number());
}

TEST_CASE("cli: solve error contract") {
  ScratchDir dir("solve-err");
  testing::write_text(dir.file("bad.json"), "{\"species\": [\n");
  const auto r = run_cli("solve " + q(dir.file("bad.json")) + " --out " +
                         q(dir.file("out.json")));
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "malformed JSON"));
  CHECK_FALSE(std::filesystem::exists(dir.file("out.json")));

  testing::write_text(dir.file("dims.json"), R"({
    "species": [{"mu": [1, 2], "var": [1], "count": 3}],
    "tasks": [{"requirements": [1, 1]}]})");
  const auto d = run_cli("solve " + q(dir.file("dims.json")));
  CHECK(d.exit_code == 2);
  CHECK(contains(d.output, "species[0].var"));

  REQUIRE(run_cli("preset --out " + q(dir.file("r.json"))).exit_code == 0);
  CHECK(run_cli("solve " + q(dir.file("r.json")) + " --method greedy").exit_code == 2);
  CHECK(run_cli("solve " + q(dir.file("r.json")) + " --starts 0").exit_code == 2);
  CHECK(run_cli("solve").exit_code == 2);
  CHECK(run_cli("solve " + q(dir.file("missing.json"))).exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli: eval") {
  ScratchDir dir("eval");
  REQUIRE(run_cli("preset --out " + q(dir.file("r.json"))).exit_code == 0);

  const auto r = run_cli("eval " + q(dir.file("r.json")) + " --allocation " +
                         q(dir.file("r.refs.json")) +
                         " --pick ours --trials 10000 --seed 0 --out " +
                         q(dir.file("e.json")));
  REQUIRE(r.exit_code == 0);
  const Json e = Json::parse(slurp(dir.file("e.json")));
  CHECK(std::abs(e["mc_combined_rate"].get<double>() - 0.432) <= 0.02);
  CHECK(e["coupling"] == "coalition");

  const auto inline_alloc = run_cli("eval " + q(dir.file("r.json")) +
                                    " --allocation \"6,1;0,8\" --trials 10000"
                                    " --out " + q(dir.file("e2.json")));
  REQUIRE(inline_alloc.exit_code == 0);
  CHECK(slurp(dir.file("e.json")) == slurp(dir.file("e2.json")));

  REQUIRE(run_cli("solve " + q(dir.file("r.json")) + " --out " +
                  q(dir.file("s.json"))).exit_code == 0);
  CHECK(run_cli("eval " + q(dir.file("r.json")) + " --allocation " +
                q(dir.file("s.json")) + " --trials 100").exit_code == 0);

  CHECK(run_cli("eval " + q(dir.file("r.json")) +
                " --allocation \"6,1;0,8\" --trials 0").exit_code == 2);
  const auto over = run_cli("eval " + q(dir.file("r.json")) +
                            " --allocation \"6,5;1,5\" --trials 10");
  CHECK(over.exit_code == 1);
  CHECK(contains(over.output, "species 1"));
  CHECK(run_cli("eval " + q(dir.file("r.json")) +
                " --allocation \"6,1\" --trials 10").exit_code == 2);
  CHECK(run_cli("eval " + q(dir.file("r.json")) + " --allocation " +
                q(dir.file("r.refs.json"))).exit_code == 2);

  testing::write_text(dir.file("free.json"), R"({
    "species": [{"mu": [1], "var": [1], "count": 3}],
    "tasks": [{"requirements": [0]}, {"requirements": [0]}]})");
  REQUIRE(run_cli("eval " + q(dir.file("free.json")) +
                  " --allocation \"1;2\" --trials 50 --out " +
                  q(dir.file("f.json"))).exit_code == 0);
  const Json f = Json::parse(slurp(dir.file("f.json")));
  CHECK(f["mc_task_rates"] == Json::parse("[1.0, 1.0]"));
  CHECK(f["task_probs"] == Json::parse("[1.0, 1.0]"));
}

TEST_CASE("cli: bench") {
  ScratchDir dir("bench");
  const auto r = run_cli("bench --instances 5 --methods adaptive,random --seed 2"
                         " --starts 4 --out-dir " + q(dir.file("one")));
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "adaptive"));
  const std::string csv = slurp(dir.file("one/records.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
  REQUIRE(run_cli("bench --instances 5 --methods adaptive,random --seed 2"
                  " --starts 4 --threads 2 --out-dir " + q(dir.file("two")))
              .exit_code == 0);
  CHECK(slurp(dir.file("two/records.csv")) == csv);
  CHECK(slurp(dir.file("two/summary.txt")) == slurp(dir.file("one/summary.txt")));

  const auto only = run_cli("bench --instances 4 --methods adaptive --starts 2"
                            " --out-dir " + q(dir.file("only")));
  REQUIRE(only.exit_code == 0);
  const std::string only_csv = slurp(dir.file("only/records.csv"));
  CHECK(std::count(only_csv.begin(), only_csv.end(), '\n') == 5);

  CHECK(run_cli("bench --methods adaptive,bogus --out-dir " + q(dir.file("x")))
            .exit_code == 2);
}
