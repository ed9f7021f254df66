#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "logikon/logikon.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 1, kIo = 2, kOptimization = 3, kChecksFailed = 4 };

struct Failure {
  int code;
  std::string message;
};

int exit_code(lk_status s) {
  switch (s) {
    case LK_OK: return kOk;
    case LK_ERR_IO: return kIo;
    case LK_ERR_RETRACTION:
    case LK_ERR_NON_FINITE: return kOptimization;
    default: return kInput;
  }
}

void check(lk_status s) {
  if (s != LK_OK) throw Failure{exit_code(s), lk_last_error()};
}

// Owning wrappers over the C handles.
struct Theory {
  lk_theory* p = nullptr;
  Theory() = default;
  Theory(const Theory&) = delete;
  ~Theory() { lk_theory_free(p); }
};

struct Network {
  lk_network* p = nullptr;
  Network() = default;
  Network(const Network&) = delete;
  ~Network() { lk_network_free(p); }
};

struct Text {
  char* p = nullptr;
  Text() = default;
  Text(const Text&) = delete;
  ~Text() { lk_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot read " + path + ": " + std::strerror(errno)};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temporary, then rename over the target.
void write_file(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{kIo, "cannot write " + path + ": " + std::strerror(errno)};
    out << content;
    out.flush();
    if (!out) throw Failure{kIo, "cannot write " + path};
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Failure{kIo, "cannot write " + path + ": " + ec.message()};
}

std::string sha256(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Failure{kIo, "hashing failed"};
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& csv, const char* what) {
  std::vector<double> v;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      while (used < cell.size() && cell[used] == ' ') ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Failure{kInput, std::string("invalid ") + what + " value '" + cell + "'"};
    }
  }
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

bool is_network_file(const std::string& path) { return fs::path(path).extension() == ".json"; }

struct Manifest {
  std::string command;
  json inputs = json::array();
  json config = json::object();
  std::optional<unsigned long long> seed;
  json outputs = json::array();

  void input(const std::string& path, const std::string& content) {
    inputs.push_back({{"path", path}, {"sha256", sha256(content)}});
  }

  void write(const std::string& path) const {
    json j = {{"tool", "logikon"}, {"version", lk_version()}, {"command", command},
              {"inputs", inputs},  {"config", config}};
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["outputs"] = outputs;
    write_file(path, j.dump(2) + "\n");
  }
};

std::string manifest_path(const std::string& explicit_path, const std::string& first_output) {
  if (!explicit_path.empty()) return explicit_path;
  const fs::path dir = fs::path(first_output).parent_path();
  return (dir / "manifest.json").string();
}

void load_theory(const std::string& path, Theory& t, Manifest& m) {
  const std::string src = read_file(path);
  m.input(path, src);
  check(lk_theory_parse(src.c_str(), &t.p));
}

void load_network(const std::string& path, Network& n, Manifest& m) {
  const std::string src = read_file(path);
  m.input(path, src);
  check(lk_network_from_json(src.c_str(), &n.p));
}

// --- compile ---------------------------------------------------------------

struct CompileArgs {
  std::string theory;
  std::string expr;
  std::string axiom;
  double beta = 40.0;
  std::string out;
  std::string report;
  std::string manifest;
};

int run_compile(const CompileArgs& a) {
  Manifest m;
  m.command = "compile";
  m.config = {{"expr", a.expr}, {"axiom", a.axiom}, {"beta", a.beta}};
  Theory t;
  load_theory(a.theory, t, m);
  Network n;
  if (!a.axiom.empty()) {
    check(lk_network_compile_axiom(t.p, a.axiom.c_str(), a.beta, &n.p));
  } else {
    check(lk_network_compile(t.p, a.expr.c_str(), a.beta, &n.p));
  }
  Text net, report;
  check(lk_network_to_json(n.p, &net.p));
  check(lk_network_constraint_report(n.p, nullptr, &report.p));
  const std::string report_path =
      a.report.empty() ? fs::path(a.out).replace_extension(".constraints.json").string() : a.report;
  m.outputs = {a.out, report_path};
  m.write(manifest_path(a.manifest, a.out));
  write_file(a.out, net.str());
  write_file(report_path, report.str());
  lk_network_info info{};
  check(lk_network_info_get(n.p, &info));
  std::cout << "compiled " << info.gates << " gate(s), " << info.inputs << " input(s), "
            << info.outputs << " output(s), depth " << info.depth << "\n";
  return kOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string net;
  std::string theory;
  std::string axiom;
  std::string data;
  std::string config;
  std::string method;
  std::optional<double> beta;
  std::optional<double> epsilon;
  std::optional<double> learning_rate;
  std::optional<std::size_t> max_iterations;
  std::optional<double> penalty_weight;
  std::optional<unsigned long long> seed;
  std::string init;
  std::vector<std::string> axioms;
  std::string trace = "trace.csv";
  std::string out = "trained.json";
  std::string manifest;
};

int run_train(const TrainArgs& a) {
  Manifest m;
  m.command = "train";
  Network n;
  if (!a.net.empty()) {
    load_network(a.net, n, m);
  } else {
    if (a.theory.empty() || a.axiom.empty()) {
      throw Failure{kInput, "train needs --net or both --theory and --axiom"};
    }
    Theory t;
    load_theory(a.theory, t, m);
    check(lk_network_compile_axiom(t.p, a.axiom.c_str(), a.beta.value_or(8.0), &n.p));
  }
  json cfg = json::object();
  if (!a.config.empty()) {
    const std::string text = read_file(a.config);
    m.input(a.config, text);
    try {
      cfg = json::parse(text);
    } catch (const json::exception& e) {
      throw Failure{kInput, a.config + ": " + e.what()};
    }
    if (!cfg.is_object()) throw Failure{kInput, a.config + ": expected a JSON object"};
  }
  if (!a.method.empty()) cfg["method"] = a.method;
  if (a.beta) cfg["beta"] = *a.beta;
  if (a.epsilon) cfg["epsilon"] = *a.epsilon;
  if (a.learning_rate) cfg["learning_rate"] = *a.learning_rate;
  if (a.max_iterations) cfg["max_iterations"] = *a.max_iterations;
  if (a.penalty_weight) cfg["penalty_weight"] = *a.penalty_weight;
  if (a.seed) cfg["seed"] = *a.seed;
  if (!a.init.empty()) cfg["init"] = a.init;
  if (!a.axioms.empty()) cfg["axioms"] = a.axioms;
  m.config = cfg;
  m.seed = cfg.contains("seed") ? cfg["seed"].get<unsigned long long>() : 0ULL;

  const std::string data = read_file(a.data);
  m.input(a.data, data);
  m.outputs = {a.trace, a.out};
  m.write(manifest_path(a.manifest, a.out));

  Text trace, summary, net;
  check(lk_train(n.p, cfg.dump().c_str(), data.c_str(), &trace.p, &summary.p));
  check(lk_network_to_json(n.p, &net.p));
  write_file(a.trace, trace.str());
  write_file(a.out, net.str());
  const json s = json::parse(summary.str());
  std::cout << "method " << s["method"].get<std::string>() << "\n"
            << "iterations " << s["iterations"] << "\n"
            << "converged " << (s["converged"].get<bool>() ? "yes" : "no") << "\n"
            << "final loss " << shortest(s["final_loss"].get<double>()) << "\n"
            << "constraint norm " << shortest(s["constraint_norm"].get<double>()) << "\n"
            << "projected gradient norm " << shortest(s["projected_gradient_norm"].get<double>())
            << "\n";
  return kOk;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string input;
  std::vector<std::string> suites;
  std::string beta_grid;
  unsigned long long seed = 0;
  std::size_t samples = 16;
  std::size_t census_depth = 2;
  std::string against;
  std::string report = "report.json";
  std::string manifest;
};

int run_verify(const VerifyArgs& a) {
  Manifest m;
  m.command = "verify";
  json options = {{"suites", a.suites.empty() ? std::vector<std::string>{"all"} : a.suites},
                  {"seed", a.seed},
                  {"samples", a.samples},
                  {"census_depth", a.census_depth}};
  if (!a.beta_grid.empty()) options["beta_grid"] = parse_numbers(a.beta_grid, "beta grid");
  m.config = options;
  m.seed = a.seed;

  Text report, table;
  int passed = 0;
  Network n;
  if (is_network_file(a.input)) {
    load_network(a.input, n, m);
    check(lk_verify_network(n.p, options.dump().c_str(), &report.p, &table.p, &passed));
  } else {
    Theory t;
    load_theory(a.input, t, m);
    check(lk_verify_theory(t.p, options.dump().c_str(), &report.p, &table.p, &passed));
  }
  json r = json::parse(report.str());
  std::string table_text = table.str();
  if (!a.against.empty()) {
    if (!n.p) throw Failure{kInput, "--against needs a network input"};
    Network original;
    load_network(a.against, original, m);
    Text cmp;
    int identical = 0;
    check(lk_network_compare(original.p, n.p, a.samples, a.seed, &cmp.p, &identical));
    const json c = json::parse(cmp.str());
    for (const auto& entry : c["checks"]) r["checks"].push_back(entry);
    r["all_passed"] = r["all_passed"].get<bool>() && identical == 1;
    passed = passed && identical;
    table_text += std::string("export  ") + (identical ? "pass" : "FAIL") +
                  " (forward identical to " + a.against + ")\n";
    for (const auto& w : c["checks"][0]["witnesses"]) {
      std::string input;
      for (const auto& v : w["input"]) input += (input.empty() ? "" : ", ") + shortest(v.get<double>());
      table_text += "    witness (" + input + ") measured " + shortest(w["measured"].get<double>()) +
                    " expected " + shortest(w["expected"].get<double>()) + "\n";
      break;
    }
  }
  m.outputs = {a.report};
  m.write(manifest_path(a.manifest, a.report));
  write_file(a.report, r.dump(2) + "\n");
  std::cout << table_text;
  return passed ? kOk : kChecksFailed;
}

// --- eval ------------------------------------------------------------------

int run_eval(const std::string& path, const std::string& input, std::optional<double> beta) {
  Network n;
  Manifest unused;
  load_network(path, n, unused);
  const std::vector<double> x = input.empty() ? std::vector<double>{} : parse_numbers(input, "input");
  lk_network_info info{};
  check(lk_network_info_get(n.p, &info));
  std::vector<double> y(info.outputs);
  check(lk_network_eval(n.p, x.data(), x.size(), beta.value_or(0.0), y.data(), y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) std::cout << (i ? "," : "") << shortest(y[i]);
  std::cout << "\n";
  return kOk;
}

// --- export ----------------------------------------------------------------

int run_export(const std::string& path, const std::string& format, const std::string& axioms,
               const std::string& out, const std::string& manifest) {
  Manifest m;
  m.command = "export";
  m.config = {{"format", format}, {"axioms", axioms}};
  Text text;
  if (is_network_file(path)) {
    Network n;
    load_network(path, n, m);
    if (format == "net") {
      check(lk_network_to_json(n.p, &text.p));
    } else if (format == "constraints") {
      check(lk_network_constraint_report(n.p, axioms.empty() ? nullptr : axioms.c_str(), &text.p));
    } else {
      throw Failure{kInput, "format '" + format + "' needs a theory input"};
    }
  } else {
    Theory t;
    load_theory(path, t, m);
    if (format != "thy") throw Failure{kInput, "format '" + format + "' needs a network input"};
    check(lk_theory_print(t.p, &text.p));
  }
  if (out.empty() || out == "-") {
    std::cout << text.str();
    return kOk;
  }
  m.outputs = {out};
  m.write(manifest_path(manifest, out));
  write_file(out, text.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile logical theories into relaxed neural networks, train them on the "
               "constraint manifold and verify them."};
  app.set_version_flag("--version", std::string(lk_version()));
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Compile an expression or axiom into a network");
  compile->add_option("theory", ca.theory, "Theory file (.thy)")->required();
  auto* expr_opt = compile->add_option("--expr", ca.expr, "Expression over the theory's connectives");
  auto* axiom_opt = compile->add_option("--axiom", ca.axiom, "Compile both sides of an axiom");
  expr_opt->excludes(axiom_opt);
  compile->add_option("--beta", ca.beta, "Temperature")->capture_default_str();
  compile->add_option("--out", ca.out, "Network file to write")->required();
  compile->add_option("--report", ca.report, "Constraint report (default: <out stem>.constraints.json)");
  compile->add_option("--manifest", ca.manifest, "Run manifest (default: manifest.json beside --out)");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a network on the constraint manifold");
  train->add_option("--net", ta.net, "Network file");
  train->add_option("--theory", ta.theory, "Theory file, with --axiom");
  train->add_option("--axiom", ta.axiom, "Axiom whose two sides form the network");
  train->add_option("--data", ta.data, "Headerless CSV: inputs then targets")->required();
  train->add_option("--config", ta.config, "JSON config; flags override it");
  train->add_option("--method", ta.method, "riemannian or penalty")
      ->check(CLI::IsMember({"riemannian", "penalty"}));
  train->add_option("--beta", ta.beta, "Temperature");
  train->add_option("--epsilon", ta.epsilon, "Constraint tolerance");
  train->add_option("--lr", ta.learning_rate, "Learning rate");
  train->add_option("--max-iter", ta.max_iterations, "Iteration budget");
  train->add_option("--penalty-weight", ta.penalty_weight, "Penalty weight lambda");
  train->add_option("--seed", ta.seed, "Seed");
  train->add_option("--init", ta.init, "retract, canonical, random or none")
      ->check(CLI::IsMember({"retract", "canonical", "random", "none"}));
  train->add_option("--axioms", ta.axioms, "Restrict constraints to these axioms")->delimiter(',');
  train->add_option("--trace", ta.trace, "Trace CSV to write")->capture_default_str();
  train->add_option("--out", ta.out, "Trained network to write")->capture_default_str();
  train->add_option("--manifest", ta.manifest, "Run manifest (default: manifest.json beside --out)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("input", va.input, "Theory (.thy) or network (.json)")->required();
  verify->add_option("--suite", va.suites,
                     "all, bounds, envelope, truth, arms, roundtrip, census, functor")
      ->delimiter(',');
  verify->add_option("--beta-grid", va.beta_grid, "Comma-separated temperatures");
  verify->add_option("--seed", va.seed, "Seed")->capture_default_str();
  verify->add_option("--samples", va.samples, "Interior samples per check")->capture_default_str();
  verify->add_option("--census-depth", va.census_depth, "Term depth for the census")
      ->capture_default_str();
  verify->add_option("--against", va.against, "Original network; checks forward identity");
  verify->add_option("--report", va.report, "Report JSON to write")->capture_default_str();
  verify->add_option("--manifest", va.manifest, "Run manifest (default: manifest.json beside --report)");

  std::string eval_net, eval_input;
  std::optional<double> eval_beta;
  auto* eval = app.add_subcommand("eval", "Evaluate a network on one input");
  eval->add_option("net", eval_net, "Network file")->required();
  eval->add_option("--input", eval_input, "Comma-separated input values");
  eval->add_option("--beta", eval_beta, "Temperature override");

  std::string ex_in, ex_format = "net", ex_axioms, ex_out, ex_manifest;
  auto* exp = app.add_subcommand("export", "Export a network, its constraints, or a theory");
  exp->add_option("input", ex_in, "Theory (.thy) or network (.json)")->required();
  exp->add_option("--format", ex_format, "net, constraints or thy")
      ->check(CLI::IsMember({"net", "constraints", "thy"}))
      ->capture_default_str();
  exp->add_option("--axioms", ex_axioms, "Comma-separated axioms for constraints");
  exp->add_option("--out", ex_out, "Output file (default: stdout)");
  exp->add_option("--manifest", ex_manifest, "Run manifest (default: manifest.json beside --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*compile) {
      if (ca.expr.empty() && ca.axiom.empty()) throw Failure{kInput, "compile needs --expr or --axiom"};
      return run_compile(ca);
    }
    if (*train) return run_train(ta);
    if (*verify) return run_verify(va);
    if (*eval) return run_eval(eval_net, eval_input, eval_beta);
    if (*exp) return run_export(ex_in, ex_format, ex_axioms, ex_out, ex_manifest);
  } catch (const Failure& f) {
    std::cerr << "logikon: " << f.message << "\n";
    return f.code;
  } catch (const json::exception& e) {
    std::cerr << "logikon: " << e.what() << "\n";
    return kInput;
  }
  return kOk;
}
