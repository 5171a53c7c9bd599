#pragma once

#include "qkm/irrep.hpp"
#include "qkm/json_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace qkm {

// One verification instance: a datum, a pair (optionally a triple) of dominant
// weights, a truncation depth, the checks to run, and an optional golden file
// holding the independently derived R-matrix to compare against.
struct InstanceSpec {
  CartanDatum datum;
  Weight lambda;
  Weight mu;
  std::optional<Weight> nu;
  std::optional<long long> depth;
  std::vector<std::string> checks;  // empty means the full suite
  std::string golden;               // empty means no golden comparison
};

namespace detail {

inline Weight parse_weight_json(const json& j, size_t rank, const char* field) {
  Weight w;
  if (j.is_number_integer()) {
    w.push_back(j.get<long long>());
  } else if (j.is_array()) {
    for (const auto& c : j) {
      if (!c.is_number_integer()) fail(errc::parse_error, std::string(field) + ": weight coordinates must be integers");
      w.push_back(c.get<long long>());
    }
  } else {
    fail(errc::parse_error, std::string(field) + ": expected an integer array");
  }
  if (w.size() != rank)
    fail(errc::rank_mismatch, std::string(field) + ": " + std::to_string(w.size()) +
                                  " coordinates for rank " + std::to_string(rank));
  return w;
}

inline CartanDatum parse_datum_json(const json& j) {
  if (j.is_string()) return CartanDatum::preset(j.get<std::string>());
  if (j.is_array()) {
    std::vector<std::vector<long long>> rows;
    for (const auto& r : j) {
      if (!r.is_array()) fail(errc::parse_error, "cartan: expected a matrix of integer rows");
      std::vector<long long> row;
      for (const auto& c : r) {
        if (!c.is_number_integer()) fail(errc::parse_error, "cartan: matrix entries must be integers");
        row.push_back(c.get<long long>());
      }
      rows.push_back(std::move(row));
    }
    return CartanDatum(std::move(rows));
  }
  fail(errc::parse_error, "cartan: expected a preset name or an integer matrix");
}

}  // namespace detail

inline InstanceSpec parse_instance(const json& j) {
  if (!j.is_object()) fail(errc::parse_error, "instance spec must be a JSON object");
  if (!j.contains("cartan")) fail(errc::parse_error, "instance spec needs a 'cartan' field");
  if (!j.contains("lambda") || !j.contains("mu"))
    fail(errc::parse_error, "instance spec needs 'lambda' and 'mu' fields");
  static const std::vector<std::string> known = {"cartan", "lambda", "mu",     "nu",
                                                 "depth",  "checks", "golden"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      fail(errc::parse_error, "instance spec has unknown field '" + it.key() + "'");

  InstanceSpec spec{detail::parse_datum_json(j.at("cartan")), {}, {}, std::nullopt,
                    std::nullopt,                             {}, ""};
  size_t rank = spec.datum.rank();
  spec.lambda = detail::parse_weight_json(j.at("lambda"), rank, "lambda");
  spec.mu = detail::parse_weight_json(j.at("mu"), rank, "mu");
  if (j.contains("nu")) spec.nu = detail::parse_weight_json(j.at("nu"), rank, "nu");
  if (j.contains("depth")) {
    if (!j.at("depth").is_number_integer()) fail(errc::parse_error, "depth must be an integer");
    long long d = j.at("depth").get<long long>();
    if (d < 0) fail(errc::depth_too_small, "depth must be nonnegative");
    spec.depth = d;
  }
  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) fail(errc::parse_error, "checks must be an array of names");
    for (const auto& c : j.at("checks")) {
      std::string name = c.get<std::string>();
      const auto& all = all_check_names();
      if (std::find(all.begin(), all.end(), name) == all.end())
        fail(errc::parse_error, "unknown check '" + name + "'");
      spec.checks.push_back(std::move(name));
    }
  }
  if (j.contains("golden")) spec.golden = j.at("golden").get<std::string>();

  if (!spec.datum.dominant(spec.lambda)) fail(errc::not_dominant, "lambda must be dominant");
  if (!spec.datum.dominant(spec.mu)) fail(errc::not_dominant, "mu must be dominant");
  if (spec.nu && !spec.datum.dominant(*spec.nu)) fail(errc::not_dominant, "nu must be dominant");
  return spec;
}

inline std::vector<InstanceSpec> parse_spec_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("spec file is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) fail(errc::parse_error, "spec file must be a JSON array of instance specs");
  std::vector<InstanceSpec> out;
  for (const auto& item : j) out.push_back(parse_instance(item));
  return out;
}

inline std::string instance_label(const InstanceSpec& s) {
  std::ostringstream os;
  os << s.datum.label() << " lambda=" << weight_string(s.lambda)
     << " mu=" << weight_string(s.mu);
  if (s.nu) os << " nu=" << weight_string(*s.nu);
  os << " depth=" << (s.depth ? std::to_string(*s.depth) : std::string("unbounded"));
  return os.str();
}

// Golden files hold the intertwining-derived R-matrix; the live half-twist
// output is checked against them so the stored data never comes from the code
// path under test.
inline json golden_payload(const InstanceSpec& spec) {
  auto V = std::make_shared<const Rep>(build_irrep(spec.datum, spec.lambda, spec.depth));
  auto W = std::make_shared<const Rep>(build_irrep(spec.datum, spec.mu, spec.depth));
  Rep T = tensor_rep(V, W, spec.depth);
  RMatrixOperator R = oracle_r(T);
  return rmatrix_json(T, R);
}

// First difference between a live R-matrix and a stored golden, or empty if
// they agree entrywise (canonical_string comparison, bit-exact).
inline std::string golden_diff(const Rep& T, const RMatrixOperator& live, const json& golden) {
  json live_j = rmatrix_json(T, live);
  for (const char* field : {"datum", "lambda", "mu", "depth"}) {
    if (!golden.contains(field)) return std::string("golden lacks field '") + field + "'";
    if (golden.at(field) != live_j.at(field))
      return std::string("field '") + field + "': got " + live_j.at(field).dump() + " want " +
             golden.at(field).dump();
  }
  if (!golden.contains("blocks") || !golden.at("blocks").is_array())
    return "golden lacks a block list";
  const json& gb = golden.at("blocks");
  const json& lb = live_j.at("blocks");
  if (gb.size() != lb.size())
    return "block count: got " + std::to_string(lb.size()) + " want " + std::to_string(gb.size());
  for (size_t b = 0; b < gb.size(); ++b) {
    if (gb[b].at("weight") != lb[b].at("weight"))
      return "block " + std::to_string(b) + " weight: got " + lb[b].at("weight").dump() +
             " want " + gb[b].at("weight").dump();
    const json& gm = gb[b].at("matrix");
    const json& lm = lb[b].at("matrix");
    if (gm.size() != lm.size() || (gm.size() && gm[0].size() != lm[0].size()))
      return "block " + std::to_string(b) + " matrix shape mismatch";
    for (size_t r = 0; r < gm.size(); ++r)
      for (size_t c = 0; c < gm[r].size(); ++c)
        if (gm[r][c] != lm[r][c])
          return "block " + weight_string(T.blocks[b].weight) + " entry (" + std::to_string(r) +
                 "," + std::to_string(c) + "): got " + lm[r][c].get<std::string>() + " want " +
                 gm[r][c].get<std::string>();
  }
  return "";
}

inline void compare_golden(const Rep& T, const RMatrixOperator& live, const json& golden) {
  std::string diff = golden_diff(T, live, golden);
  if (!diff.empty()) fail(errc::golden_mismatch, diff);
}

// Resolution order: absolute path as-is, then $QKM_GOLDEN_DIR, then base_dir.
inline std::string resolve_golden_path(const std::string& path, const std::string& base_dir) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.is_absolute()) return p.string();
  if (const char* env = std::getenv("QKM_GOLDEN_DIR")) return (fs::path(env) / p).string();
  return (fs::path(base_dir) / p).string();
}

struct InstanceResult {
  std::string instance;
  std::string status;  // "pass" | "fail" | "error"
  std::string error;   // error name + message when status == "error"
  std::string golden;  // "" (not requested) | "match" | first difference
  VerifyReport checks;
  long long elapsed_ms = 0;
};

struct ConformanceReport {
  std::vector<InstanceResult> instances;

  bool all_pass() const {
    for (const auto& r : instances)
      if (r.status != "pass") return false;
    return true;
  }
};

inline InstanceResult run_instance(const InstanceSpec& spec, const std::string& golden_base) {
  InstanceResult res;
  res.instance = instance_label(spec);
  auto started = std::chrono::steady_clock::now();
  try {
    auto V = std::make_shared<const Rep>(build_irrep(spec.datum, spec.lambda, spec.depth));
    auto W = std::make_shared<const Rep>(build_irrep(spec.datum, spec.mu, spec.depth));
    std::shared_ptr<const Rep> U;
    if (spec.nu) U = std::make_shared<const Rep>(build_irrep(spec.datum, *spec.nu, spec.depth));
    res.checks = verify_suite(V, W, U, spec.depth, spec.checks, res.instance);
    bool ok = res.checks.count(CheckStatus::fail) == 0;
    if (!spec.golden.empty()) {
      std::string path = resolve_golden_path(spec.golden, golden_base);
      std::ifstream in(path);
      if (!in) fail(errc::parse_error, "cannot open golden file '" + path + "'");
      json golden;
      try {
        golden = json::parse(in);
      } catch (const std::exception& e) {
        fail(errc::parse_error, "golden file '" + path + "' is not valid JSON: " + e.what());
      }
      Rep T = tensor_rep(V, W, spec.depth);
      std::string diff = golden_diff(T, half_twist_r(T), golden);
      res.golden = diff.empty() ? "match" : diff;
      if (!diff.empty()) ok = false;
    }
    res.status = ok ? "pass" : "fail";
  } catch (const Error& e) {
    res.status = "error";
    res.error = e.what();  // already prefixed with the stable error name
  } catch (const std::exception& e) {
    res.status = "error";
    res.error = std::string("InternalError: ") + e.what();
  }
  auto ended = std::chrono::steady_clock::now();
  res.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(ended - started).count();
  return res;
}

// Instances run concurrently; the report keeps spec order regardless of which
// finishes first. All library state is per-instance values, so workers share
// nothing mutable.
inline ConformanceReport run_matrix(const std::vector<InstanceSpec>& specs,
                                    const std::string& golden_base = ".") {
  std::vector<std::future<InstanceResult>> futures;
  futures.reserve(specs.size());
  for (const auto& spec : specs)
    futures.push_back(std::async(std::launch::async,
                                 [&spec, &golden_base] { return run_instance(spec, golden_base); }));
  ConformanceReport report;
  for (auto& f : futures) report.instances.push_back(f.get());
  return report;
}

// Timings change run to run, so they live in one dedicated field; everything
// else is byte-identical across runs of the same matrix.
inline json conformance_json(const ConformanceReport& rep) {
  json j;
  json instances = json::array();
  size_t pass = 0, failed = 0, skipped = 0;
  for (const auto& r : rep.instances) {
    json ij;
    ij["instance"] = r.instance;
    ij["status"] = r.status;
    if (!r.error.empty()) ij["error"] = r.error;
    if (!r.golden.empty()) ij["golden"] = r.golden;
    ij["checks"] = report_json(r.checks);
    instances.push_back(std::move(ij));
    pass += r.checks.count(CheckStatus::pass);
    failed += r.checks.count(CheckStatus::fail);
    skipped += r.checks.count(CheckStatus::skip);
  }
  j["instances"] = std::move(instances);
  j["summary"] = {{"instances", rep.instances.size()},
                  {"all_pass", rep.all_pass()},
                  {"checks_pass", pass},
                  {"checks_fail", failed},
                  {"checks_skip", skipped}};
  json timing = json::array();
  for (const auto& r : rep.instances) timing.push_back(r.elapsed_ms);
  j["timing_ms"] = std::move(timing);
  return j;
}

}  // namespace qkm
