// Command-line surface: construction, computation, verification, export.
//
// Exit codes: 0 success, 1 computation error (stable error name, verbatim, on
// stderr), 2 usage error, 3 verification ran but found failures.
#include "qkm/qkm.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qkm;

// Thrown by flag-level validation (before any module runs); maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Weight parse_weight_flag(const std::string& text, const char* flag) {
  Weight w;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (tok.empty() || pos != tok.size())
      throw UsageError(std::string(flag) + ": expected comma-separated integers, got '" + text + "'");
    w.push_back(v);
  }
  if (w.empty()) throw UsageError(std::string(flag) + ": empty weight");
  return w;
}

// --cartan accepts a preset name (A1, A2, A3, B2, C2, G2) or an inline
// integer matrix like [[2,-3],[-3,2]].
CartanDatum parse_cartan_flag(const std::string& text, bool& explicit_matrix) {
  size_t first = text.find_first_not_of(" \t");
  explicit_matrix = first != std::string::npos && text[first] == '[';
  if (!explicit_matrix) return CartanDatum::preset(text);
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--cartan: not a JSON matrix: ") + e.what());
  }
  if (!j.is_array()) throw UsageError("--cartan: expected a JSON array of rows");
  std::vector<std::vector<long long>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw UsageError("--cartan: expected a JSON array of rows");
    std::vector<long long> row;
    for (const auto& c : r) {
      if (!c.is_number_integer()) throw UsageError("--cartan: matrix entries must be integers");
      row.push_back(c.get<long long>());
    }
    rows.push_back(std::move(row));
  }
  return CartanDatum(std::move(rows));
}

struct Flags {
  std::string cartan;
  std::string lambda, mu, nu, weight;
  long long depth = 0;
  bool depth_set = false;
  std::string format = "json";
  std::string output;
  bool oracle = false;
  std::string spec_path;
  bool write_golden = false;
};

void add_common(CLI::App* cmd, Flags& f, bool needs_cartan) {
  auto* cartan = cmd->add_option("--cartan", f.cartan,
                                 "preset name (A1, A2, A3, B2, C2, G2) or inline matrix "
                                 "like [[2,-3],[-3,2]]");
  if (needs_cartan) cartan->required();
  auto* depth = cmd->add_option("--depth", f.depth,
                                "height truncation; omit for the full module (finite-type "
                                "presets only)");
  depth->check(CLI::NonNegativeNumber);
  cmd->callback([&f, depth] { f.depth_set = depth->count() > 0; });
  cmd->add_option("--format", f.format, "output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  cmd->add_option("--output", f.output, "write to this file instead of stdout");
}

std::optional<long long> resolve_depth(const Flags& f, bool explicit_matrix) {
  if (f.depth_set) return f.depth;
  if (explicit_matrix)
    throw UsageError("--depth is required when --cartan is an explicit matrix");
  return std::nullopt;
}

void emit(const Flags& f, const json& payload, const std::string& text) {
  std::string body = f.format == "json" ? payload.dump(2) + "\n" : text;
  if (f.output.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(f.output);
    if (!out) throw UsageError("--output: cannot open '" + f.output + "'");
    out << body;
  }
}

std::string matrix_text(const QMatrix& m, const std::string& indent) {
  std::ostringstream os;
  for (size_t i = 0; i < m.rows(); ++i) {
    os << indent << "[";
    for (size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : " ") << m.at(i, j).canonical_string();
    os << " ]\n";
  }
  if (m.rows() == 0) os << indent << "[]\n";
  return os.str();
}

std::string rep_text(const Rep& rep) {
  std::ostringstream os;
  os << rep.datum.label() << " highest weight " << weight_string(rep.highest_weight) << " depth "
     << (rep.depth ? std::to_string(*rep.depth) : std::string("unbounded")) << " dimension "
     << rep.total_dim() << (rep.complete ? " (complete)" : " (truncated)") << "\n";
  os << "weight : height : dimension\n";
  for (const auto& b : rep.blocks)
    os << weight_string(b.weight) << " : " << b.height << " : " << b.dim << "\n";
  return os.str();
}

std::string blocks_text(const Rep& carrier, const std::vector<QMatrix>& mats) {
  std::ostringstream os;
  for (size_t b = 0; b < carrier.blocks.size(); ++b) {
    os << "block " << weight_string(carrier.blocks[b].weight) << ":\n";
    os << matrix_text(mats[b], "  ");
  }
  return os.str();
}

std::string report_text(const ConformanceReport& rep) {
  std::ostringstream os;
  for (const auto& r : rep.instances) {
    os << r.instance << ": " << r.status << "\n";
    if (!r.error.empty()) os << "  error: " << r.error << "\n";
    if (!r.golden.empty()) os << "  golden: " << r.golden << "\n";
    for (const auto& it : r.checks.items)
      if (it.status != CheckStatus::pass)
        os << "  [" << status_name(it.status) << "] " << it.check << " @ " << it.block
           << (it.witness.empty() ? "" : ": " + it.witness) << "\n";
  }
  size_t pass = 0, failed = 0, skipped = 0;
  for (const auto& r : rep.instances) {
    pass += r.checks.count(CheckStatus::pass);
    failed += r.checks.count(CheckStatus::fail);
    skipped += r.checks.count(CheckStatus::skip);
  }
  os << "instances=" << rep.instances.size() << " pass=" << pass << " fail=" << failed
     << " skip=" << skipped << " all_pass=" << (rep.all_pass() ? "true" : "false") << "\n";
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"exact R-matrices for quantized enveloping algebras via the half-twist "
               "factorization"};
  app.require_subcommand(1);
  Flags f;

  auto* build = app.add_subcommand("build-rep", "build an irreducible highest-weight module");
  add_common(build, f, true);
  build->add_option("--lambda", f.lambda, "highest weight, comma-separated fundamental coordinates")
      ->required();

  auto* tensor = app.add_subcommand("tensor", "build a tensor product module");
  add_common(tensor, f, true);
  tensor->add_option("--lambda", f.lambda, "left factor highest weight")->required();
  tensor->add_option("--mu", f.mu, "right factor highest weight")->required();

  auto* singulars = app.add_subcommand("singulars", "singular vectors of a tensor product");
  add_common(singulars, f, true);
  singulars->add_option("--lambda", f.lambda, "left factor highest weight")->required();
  singulars->add_option("--mu", f.mu, "right factor highest weight")->required();
  singulars->add_option("--weight", f.weight, "weight to inspect")->required();

  auto* bar = app.add_subcommand("bar", "bar involution matrices on a module");
  add_common(bar, f, true);
  bar->add_option("--lambda", f.lambda, "highest weight (left factor if --mu is given)")
      ->required();
  bar->add_option("--mu", f.mu, "right factor highest weight (tensor carrier)");

  auto* theta = app.add_subcommand("theta", "half-twist endomorphism matrices on a module");
  add_common(theta, f, true);
  theta->add_option("--lambda", f.lambda, "highest weight (left factor if --mu is given)")
      ->required();
  theta->add_option("--mu", f.mu, "right factor highest weight (tensor carrier)");

  auto* rmatrix = app.add_subcommand("rmatrix", "R-matrix of a tensor product");
  add_common(rmatrix, f, true);
  rmatrix->add_option("--lambda", f.lambda, "left factor highest weight")->required();
  rmatrix->add_option("--mu", f.mu, "right factor highest weight")->required();
  rmatrix->add_flag("--oracle", f.oracle,
                    "derive by solving the intertwining equations instead of the half-twist");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  add_common(verify, f, false);
  verify->add_option("--spec", f.spec_path, "JSON array of instance specs")
      ->check(CLI::ExistingFile);
  verify->add_option("--lambda", f.lambda, "left factor highest weight (inline instance)");
  verify->add_option("--mu", f.mu, "right factor highest weight (inline instance)");
  verify->add_option("--nu", f.nu, "third highest weight for the triple checks");
  verify->add_flag("--write-golden", f.write_golden,
                   "write each spec's golden file from the intertwining derivation and exit");

  auto* presets = app.add_subcommand("presets", "list built-in Cartan presets");
  add_common(presets, f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return 2;
  }

  if (presets->parsed()) {
    json j = json::array();
    std::ostringstream os;
    for (const auto& name : CartanDatum::preset_names()) {
      CartanDatum cd = CartanDatum::preset(name);
      j.push_back(datum_json(cd));
      os << name << ": matrix " << json(cd.matrix()).dump() << " symmetrizers "
         << json(cd.symmetrizers()).dump() << " root_of_q " << cd.k() << "\n";
    }
    emit(f, j, os.str());
    return 0;
  }

  if (verify->parsed()) {
    std::vector<InstanceSpec> specs;
    std::string base_dir = ".";
    if (!f.spec_path.empty()) {
      std::ifstream in(f.spec_path);
      std::stringstream buf;
      buf << in.rdbuf();
      specs = parse_spec_text(buf.str());
      base_dir = std::filesystem::path(f.spec_path).parent_path().string();
      if (base_dir.empty()) base_dir = ".";
    } else {
      if (f.cartan.empty() || f.lambda.empty() || f.mu.empty())
        throw UsageError("verify needs --spec or an inline --cartan/--lambda/--mu instance");
      bool explicit_matrix = false;
      CartanDatum cd = parse_cartan_flag(f.cartan, explicit_matrix);
      InstanceSpec one{cd, parse_weight_flag(f.lambda, "--lambda"),
                       parse_weight_flag(f.mu, "--mu"), std::nullopt, std::nullopt, {}, ""};
      if (!f.nu.empty()) one.nu = parse_weight_flag(f.nu, "--nu");
      one.depth = resolve_depth(f, explicit_matrix);
      specs.push_back(std::move(one));
    }
    if (f.write_golden) {
      for (const auto& spec : specs) {
        if (spec.golden.empty()) continue;
        std::string path = resolve_golden_path(spec.golden, base_dir);
        std::filesystem::create_directories(std::filesystem::path(path).parent_path());
        std::ofstream out(path);
        if (!out) throw UsageError("cannot write golden file '" + path + "'");
        out << golden_payload(spec).dump(2) << "\n";
        std::cout << "wrote " << path << std::endl;
      }
      return 0;
    }
    ConformanceReport rep = run_matrix(specs, base_dir);
    emit(f, conformance_json(rep), report_text(rep));
    return rep.all_pass() ? 0 : 3;
  }

  // Remaining subcommands share the same carrier plumbing.
  bool explicit_matrix = false;
  CartanDatum cd = parse_cartan_flag(f.cartan, explicit_matrix);
  std::optional<long long> depth = resolve_depth(f, explicit_matrix);
  Weight lambda = parse_weight_flag(f.lambda, "--lambda");

  if (build->parsed()) {
    Rep V = build_irrep(cd, lambda, depth);
    emit(f, rep_json(V), rep_text(V));
    return 0;
  }

  auto V = std::make_shared<const Rep>(build_irrep(cd, lambda, depth));
  if (bar->parsed() || theta->parsed()) {
    std::shared_ptr<const Rep> carrier = V;
    if (!f.mu.empty()) {
      auto W = std::make_shared<const Rep>(
          build_irrep(cd, parse_weight_flag(f.mu, "--mu"), depth));
      carrier = std::make_shared<const Rep>(tensor_rep(V, W, depth));
    }
    BarBundle bb = make_bar(*carrier);
    if (bar->parsed()) {
      emit(f, bar_json(*carrier, bb.bar), blocks_text(*carrier, bb.bar.mats));
      return 0;
    }
    ThetaOperator th = theta_op(*carrier, bb.bar);
    emit(f, theta_json(*carrier, th), blocks_text(*carrier, th.mats));
    return 0;
  }

  auto W = std::make_shared<const Rep>(build_irrep(cd, parse_weight_flag(f.mu, "--mu"), depth));
  Rep T = tensor_rep(V, W, depth);

  if (tensor->parsed()) {
    emit(f, rep_json(T), rep_text(T));
    return 0;
  }
  if (singulars->parsed()) {
    SingularBasis sb = singular_basis(T, parse_weight_flag(f.weight, "--weight"));
    std::ostringstream os;
    os << "weight " << weight_string(sb.weight) << ": " << sb.columns.cols()
       << " singular vector(s)\n";
    os << matrix_text(sb.columns, "  ");
    emit(f, singulars_json(T, sb), os.str());
    return 0;
  }
  if (rmatrix->parsed()) {
    RMatrixOperator R = f.oracle ? oracle_r(T) : half_twist_r(T);
    emit(f, rmatrix_json(T, R), blocks_text(T, R.mats));
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return 2;
  } catch (const qkm::Error& e) {
    std::cerr << e.what() << std::endl;  // "<Name>: <detail>", name is load-bearing
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << std::endl;
    return 1;
  }
}
