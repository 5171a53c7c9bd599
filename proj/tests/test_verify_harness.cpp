// Check suite semantics and the conformance harness: spec parsing, golden
// comparison, concurrency-safe matrix runs, and report determinism.
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>

using namespace qkm;

namespace {

namespace fs = std::filesystem;

std::shared_ptr<const Rep> irrep(const CartanDatum& cd, const Weight& lambda,
                                 std::optional<long long> depth = std::nullopt) {
  return std::make_shared<const Rep>(build_irrep(cd, lambda, depth));
}

size_t count_status(const VerifyReport& rep, const std::string& check, CheckStatus st) {
  size_t n = 0;
  for (const auto& it : rep.items)
    if (it.check == check && it.status == st) ++n;
  return n;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qkm_harness_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("full suite passes on a small rank-1 triple") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  auto W = irrep(a1, {1});
  auto U = irrep(a1, {2});
  VerifyReport rep = verify_suite(V, W, U, std::nullopt, {}, "triple");
  CHECK(rep.count(CheckStatus::fail) == 0);
  CHECK(rep.count(CheckStatus::skip) == 0);
  CHECK(rep.count(CheckStatus::pass) == rep.items.size());
  // Every check of the suite contributes at least one item.
  for (const std::string& name : all_check_names())
    CHECK(count_status(rep, name, CheckStatus::pass) >= 1);
}

TEST_CASE("triple checks are skipped without a third module") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  VerifyReport rep = verify_suite(V, V, nullptr, std::nullopt, {}, "pair");
  CHECK(rep.count(CheckStatus::fail) == 0);
  for (const char* name : {"cabling-left", "cabling-right", "yang-baxter"}) {
    CHECK(count_status(rep, name, CheckStatus::skip) == 1);
    CHECK(count_status(rep, name, CheckStatus::pass) == 0);
  }
  for (const auto& it : rep.items)
    if (it.status == CheckStatus::skip) CHECK(it.witness == "no third module supplied");
}

TEST_CASE("check selection restricts the suite") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  VerifyReport rep = verify_suite(V, V, nullptr, std::nullopt, {"intertwining"}, "only");
  CHECK(rep.items.size() > 0);
  for (const auto& it : rep.items) CHECK(it.check == "intertwining");
  CHECK(rep.count(CheckStatus::fail) == 0);
}

TEST_CASE("truncated instances skip exactly the boundary F rows") {
  CartanDatum hyp({{2, -3}, {-3, 2}});
  auto V = irrep(hyp, {1, 0}, 3);
  auto W = irrep(hyp, {0, 1}, 3);
  VerifyReport rep = verify_suite(V, W, nullptr, 3, {"intertwining", "oracle-equality"}, "hyp");
  CHECK(rep.count(CheckStatus::fail) == 0);
  CHECK(rep.count(CheckStatus::pass) > 0);
  size_t boundary = 0;
  for (const auto& it : rep.items)
    if (it.status == CheckStatus::skip) {
      CHECK(it.witness == "F-action from this block exceeds the retained depth");
      ++boundary;
    }
  CHECK(boundary > 0);
}

TEST_CASE("instance specs parse with every optional field") {
  json j = {{"cartan", "A2"},
            {"lambda", {1, 0}},
            {"mu", {0, 1}},
            {"nu", {1, 1}},
            {"depth", 5},
            {"checks", {"intertwining", "oracle-equality"}},
            {"golden", "a2.json"}};
  InstanceSpec spec = parse_instance(j);
  CHECK(spec.datum.label() == "A2");
  CHECK(spec.lambda == Weight{1, 0});
  CHECK(spec.mu == Weight{0, 1});
  REQUIRE(spec.nu);
  CHECK(*spec.nu == Weight{1, 1});
  REQUIRE(spec.depth);
  CHECK(*spec.depth == 5);
  CHECK(spec.checks == std::vector<std::string>{"intertwining", "oracle-equality"});
  CHECK(spec.golden == "a2.json");
  CHECK(instance_label(spec) == "A2 lambda=[1,0] mu=[0,1] nu=[1,1] depth=5");
}

TEST_CASE("scalar weights and matrix data are accepted") {
  json j = {{"cartan", {{2, -3}, {-3, 2}}}, {"lambda", {1, 0}}, {"mu", {0, 1}}, {"depth", 2}};
  InstanceSpec spec = parse_instance(j);
  CHECK_FALSE(spec.datum.finite_type());
  json j1 = {{"cartan", "A1"}, {"lambda", 1}, {"mu", 2}};
  InstanceSpec s1 = parse_instance(j1);
  CHECK(s1.lambda == Weight{1});
  CHECK(s1.mu == Weight{2});
  CHECK(instance_label(s1) == "A1 lambda=[1] mu=[2] depth=unbounded");
}

TEST_CASE("malformed instance specs are rejected by name") {
  auto expect = [](const json& j, const char* name) {
    CHECK_THROWS_MATCHES(parse_instance(j), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith(name)));
  };
  expect({{"cartan", "A1"}, {"lambda", 1}}, "ParseError");                      // missing mu
  expect({{"cartan", "A1"}, {"lambda", 1}, {"mu", 1}, {"lamda", 2}}, "ParseError");
  expect({{"cartan", "A1"}, {"lambda", 1}, {"mu", 1}, {"checks", {"parity"}}}, "ParseError");
  expect({{"cartan", "A1"}, {"lambda", 1}, {"mu", 1}, {"depth", -1}}, "DepthTooSmall");
  expect({{"cartan", "A1"}, {"lambda", -1}, {"mu", 1}}, "NotDominant");
  expect({{"cartan", "A2"}, {"lambda", {1, 0, 0}}, {"mu", {0, 1}}}, "RankMismatch");
  expect({{"cartan", "X9"}, {"lambda", 1}, {"mu", 1}}, "ParseError");           // unknown preset
  expect({{"cartan", 7}, {"lambda", 1}, {"mu", 1}}, "ParseError");
  expect(json::array({1, 2}), "ParseError");                                    // not an object
  CHECK_THROWS_MATCHES(parse_spec_text("{\"cartan\":\"A1\"}"), Error,
                       Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("ParseError")));
  CHECK_THROWS_MATCHES(parse_spec_text("not json"), Error,
                       Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("ParseError")));
}

TEST_CASE("empty spec list yields an empty passing report") {
  std::vector<InstanceSpec> specs = parse_spec_text("[]");
  CHECK(specs.empty());
  ConformanceReport rep = run_matrix(specs);
  CHECK(rep.all_pass());
  json j = conformance_json(rep);
  CHECK(j.at("summary").at("instances") == 0);
  CHECK(j.at("summary").at("all_pass") == true);
}

TEST_CASE("depth-zero instance retains the top block and passes with skips") {
  std::vector<InstanceSpec> specs =
      parse_spec_text(R"([{"cartan":"A1","lambda":1,"mu":1,"depth":0}])");
  ConformanceReport rep = run_matrix(specs);
  REQUIRE(rep.instances.size() == 1);
  CHECK(rep.instances[0].status == "pass");
  CHECK(rep.instances[0].checks.count(CheckStatus::fail) == 0);
  CHECK(rep.instances[0].checks.count(CheckStatus::skip) > 0);
}

TEST_CASE("golden comparison matches, witnesses tampering, and names mismatches") {
  TempDir tmp;
  InstanceSpec spec = parse_instance({{"cartan", "A1"}, {"lambda", 1}, {"mu", 1}});
  json payload = golden_payload(spec);
  write_text(tmp.path / "a1.json", payload.dump(2));

  json run_spec = json::array();
  run_spec.push_back({{"cartan", "A1"}, {"lambda", 1}, {"mu", 1}, {"golden", "a1.json"}});
  std::vector<InstanceSpec> specs = parse_spec_text(run_spec.dump());

  ConformanceReport good = run_matrix(specs, tmp.path.string());
  REQUIRE(good.instances.size() == 1);
  CHECK(good.instances[0].status == "pass");
  CHECK(good.instances[0].golden == "match");

  json tampered = payload;
  tampered.at("blocks").at(1).at("matrix").at(1).at(0) = "q^{77}";
  write_text(tmp.path / "a1.json", tampered.dump(2));
  ConformanceReport bad = run_matrix(specs, tmp.path.string());
  CHECK(bad.instances[0].status == "fail");
  CHECK(bad.instances[0].golden ==
        "block [0] entry (1,0): got q^{1/2} - q^{-3/2} want q^{77}");

  // The throwing comparator carries the same witness under a stable name.
  auto V = irrep(spec.datum, {1});
  Rep T = tensor_rep(V, V, std::nullopt);
  CHECK_THROWS_MATCHES(compare_golden(T, half_twist_r(T), tampered), Error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::StartsWith("GoldenMismatch: block [0]")));

  // Unreadable and unparsable golden files surface as instance errors.
  write_text(tmp.path / "a1.json", "{broken");
  ConformanceReport broken = run_matrix(specs, tmp.path.string());
  CHECK(broken.instances[0].status == "error");
  CHECK(broken.instances[0].error.rfind("ParseError", 0) == 0);
  fs::remove(tmp.path / "a1.json");
  ConformanceReport missing = run_matrix(specs, tmp.path.string());
  CHECK(missing.instances[0].status == "error");
  CHECK(missing.instances[0].error.rfind("ParseError", 0) == 0);
}

TEST_CASE("golden paths resolve through the environment override") {
  TempDir tmp;
  CHECK(resolve_golden_path("/abs/x.json", tmp.path.string()) == "/abs/x.json");
  ::unsetenv("QKM_GOLDEN_DIR");
  CHECK(resolve_golden_path("x.json", tmp.path.string()) == (tmp.path / "x.json").string());
  ::setenv("QKM_GOLDEN_DIR", "/elsewhere", 1);
  CHECK(resolve_golden_path("x.json", tmp.path.string()) == "/elsewhere/x.json");
  ::unsetenv("QKM_GOLDEN_DIR");
}

TEST_CASE("instance errors propagate by stable name without aborting the run") {
  json arr = json::array();
  arr.push_back({{"cartan", {{2, -3}, {-3, 2}}}, {"lambda", {1, 0}}, {"mu", {0, 1}}});
  arr.push_back({{"cartan", "A1"}, {"lambda", 1}, {"mu", 1}});
  std::vector<InstanceSpec> specs = parse_spec_text(arr.dump());
  ConformanceReport rep = run_matrix(specs);
  REQUIRE(rep.instances.size() == 2);
  CHECK(rep.instances[0].status == "error");
  CHECK(rep.instances[0].error.rfind("NotFiniteType", 0) == 0);
  CHECK(rep.instances[1].status == "pass");
  CHECK_FALSE(rep.all_pass());
  json j = conformance_json(rep);
  CHECK(j.at("summary").at("all_pass") == false);
  CHECK(j.at("instances").at(0).at("error").get<std::string>().rfind("NotFiniteType", 0) == 0);
}

TEST_CASE("matrix reports keep spec order and deterministic content") {
  std::vector<InstanceSpec> specs = parse_spec_text(
      R"([{"cartan":"A1","lambda":3,"mu":2},
          {"cartan":"A1","lambda":1,"mu":1},
          {"cartan":"A2","lambda":[1,0],"mu":[0,1]}])");
  ConformanceReport r1 = run_matrix(specs);
  REQUIRE(r1.instances.size() == 3);
  CHECK(r1.instances[0].instance == "A1 lambda=[3] mu=[2] depth=unbounded");
  CHECK(r1.instances[1].instance == "A1 lambda=[1] mu=[1] depth=unbounded");
  CHECK(r1.instances[2].instance == "A2 lambda=[1,0] mu=[0,1] depth=unbounded");
  CHECK(r1.all_pass());

  ConformanceReport r2 = run_matrix(specs);
  json j1 = conformance_json(r1);
  json j2 = conformance_json(r2);
  // Timings live in one dedicated field; everything else is byte-identical.
  CHECK(j1.contains("timing_ms"));
  j1.erase("timing_ms");
  j2.erase("timing_ms");
  CHECK(j1.dump() == j2.dump());
}

TEST_CASE("report serialization carries instance, block, and witness columns") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  VerifyReport rep = verify_suite(V, V, nullptr, std::nullopt, {"oracle-equality"}, "label");
  json j = report_json(rep);
  REQUIRE(j.is_array());
  REQUIRE(j.size() > 0);
  for (const auto& item : j) {
    CHECK(item.at("check") == "oracle-equality");
    CHECK(item.at("instance") == "label");
    CHECK(item.contains("block"));
    CHECK(item.at("status") == "pass");
    CHECK(item.contains("witness"));
  }
}
