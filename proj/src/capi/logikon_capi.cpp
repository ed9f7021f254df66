#include "logikon/logikon.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core/constraints.hpp"
#include "core/error.hpp"
#include "core/manifold.hpp"
#include "core/network_io.hpp"
#include "core/verifier.hpp"

struct lk_theory {
  logikon::Theory theory;
};

struct lk_network {
  logikon::NetworkBundle bundle;
};

namespace {

using json = nlohmann::ordered_json;
using logikon::ErrorCode;

thread_local std::string last_error;

lk_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::syntax: return LK_ERR_SYNTAX;
    case ErrorCode::arity_mismatch: return LK_ERR_ARITY;
    case ErrorCode::undeclared_connective: return LK_ERR_UNDECLARED;
    case ErrorCode::duplicate_name: return LK_ERR_DUPLICATE;
    case ErrorCode::invalid_argument: return LK_ERR_INVALID_ARGUMENT;
    case ErrorCode::out_of_range: return LK_ERR_OUT_OF_RANGE;
    case ErrorCode::non_finite: return LK_ERR_NON_FINITE;
    case ErrorCode::budget_exceeded: return LK_ERR_BUDGET;
    case ErrorCode::unsupported: return LK_ERR_UNSUPPORTED;
    case ErrorCode::stale_tape: return LK_ERR_STALE_TAPE;
    case ErrorCode::layout_mismatch: return LK_ERR_LAYOUT;
    case ErrorCode::precondition: return LK_ERR_PRECONDITION;
    case ErrorCode::retraction_failure: return LK_ERR_RETRACTION;
    case ErrorCode::io: return LK_ERR_IO;
  }
  return LK_ERR_INTERNAL;
}

template <class F>
lk_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return LK_OK;
  } catch (const logikon::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("invalid JSON: ") + e.what();
    return LK_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LK_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LK_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw logikon::Error(ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_names(const char* csv) {
  std::vector<std::string> names;
  if (!csv) return names;
  std::string cur;
  for (const char* p = csv;; ++p) {
    if (*p == ',' || *p == '\0') {
      while (!cur.empty() && cur.back() == ' ') cur.pop_back();
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
      if (*p == '\0') break;
    } else if (!(cur.empty() && *p == ' ')) {
      cur += *p;
    }
  }
  return names;
}

logikon::ConstraintSet constraints_for(const logikon::NetworkBundle& b,
                                       const std::vector<std::string>& axioms) {
  const logikon::Theory t = axioms.empty() ? b.theory : logikon::with_axioms(b.theory, axioms);
  auto [model, canonical] =
      logikon::assign_model(t, logikon::Temperature(b.beta), logikon::InitSpec::canonical());
  logikon::ConstraintSet gset = logikon::extract_constraints(t, model);
  if (gset.layout != b.params.specs()) {
    throw logikon::Error(ErrorCode::layout_mismatch,
                         "network slots differ from the theory's one-slot-per-connective layout");
  }
  return gset;
}

logikon::VerifyOptions verify_options(const char* options_json) {
  logikon::VerifyOptions o;
  if (!options_json || !*options_json) return o;
  const json j = json::parse(options_json);
  if (j.contains("suites")) o.suites = j.at("suites").get<std::vector<std::string>>();
  if (j.contains("beta_grid")) o.beta_grid = j.at("beta_grid").get<std::vector<double>>();
  if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("samples")) o.samples = j.at("samples").get<std::size_t>();
  if (j.contains("census_depth")) o.census_depth = j.at("census_depth").get<std::size_t>();
  for (double b : o.beta_grid) (void)logikon::Temperature(b);
  return o;
}

void emit_report(const logikon::VerificationReport& r, char** report_json, char** table,
                 int* all_passed) {
  if (report_json) *report_json = dup(r.to_json().dump(2) + "\n");
  if (table) *table = dup(r.to_table());
  if (all_passed) *all_passed = r.all_passed() ? 1 : 0;
}

}  // namespace

extern "C" {

const char* lk_version(void) { return LOGIKON_VERSION; }

const char* lk_status_name(lk_status status) {
  switch (status) {
    case LK_OK: return "ok";
    case LK_ERR_SYNTAX: return "syntax";
    case LK_ERR_ARITY: return "arity_mismatch";
    case LK_ERR_UNDECLARED: return "undeclared_connective";
    case LK_ERR_DUPLICATE: return "duplicate_name";
    case LK_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case LK_ERR_OUT_OF_RANGE: return "out_of_range";
    case LK_ERR_NON_FINITE: return "non_finite";
    case LK_ERR_BUDGET: return "budget_exceeded";
    case LK_ERR_UNSUPPORTED: return "unsupported";
    case LK_ERR_STALE_TAPE: return "stale_tape";
    case LK_ERR_LAYOUT: return "layout_mismatch";
    case LK_ERR_PRECONDITION: return "precondition";
    case LK_ERR_RETRACTION: return "retraction_failure";
    case LK_ERR_IO: return "io";
    case LK_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* lk_last_error(void) { return last_error.c_str(); }

void lk_string_free(char* s) { std::free(s); }

lk_status lk_theory_parse(const char* source, lk_theory** out) {
  return guarded([&] {
    require(source, "source");
    require(out, "out");
    *out = new lk_theory{logikon::parse_theory(source)};
  });
}

lk_status lk_theory_load(const char* path, lk_theory** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw logikon::Error(ErrorCode::io, std::string("cannot read ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = new lk_theory{logikon::parse_theory(ss.str())};
  });
}

void lk_theory_free(lk_theory* theory) { delete theory; }

lk_status lk_theory_print(const lk_theory* theory, char** out) {
  return guarded([&] {
    require(theory, "theory");
    require(out, "out");
    *out = dup(logikon::print_theory(theory->theory));
  });
}

lk_status lk_theory_validate(const lk_theory* theory, char** out_json) {
  return guarded([&] {
    require(theory, "theory");
    require(out_json, "out_json");
    json diags = json::array();
    for (const auto& d : logikon::validate_theory(theory->theory)) {
      diags.push_back({{"subject", d.subject},
                       {"line", d.location.line},
                       {"column", d.location.column},
                       {"message", d.message}});
    }
    *out_json = dup(diags.dump(2));
  });
}

lk_status lk_network_compile(const lk_theory* theory, const char* expr, double beta,
                             lk_network** out) {
  return guarded([&] {
    require(theory, "theory");
    require(expr, "expr");
    require(out, "out");
    (void)logikon::Temperature(beta);
    logikon::ParsedExpression p = logikon::parse_expression(expr, theory->theory);
    *out = new lk_network{
        logikon::bundle_expression(theory->theory, p.term, std::move(p.variables), beta)};
  });
}

lk_status lk_network_compile_axiom(const lk_theory* theory, const char* axiom, double beta,
                                   lk_network** out) {
  return guarded([&] {
    require(theory, "theory");
    require(axiom, "axiom");
    require(out, "out");
    (void)logikon::Temperature(beta);
    const logikon::Axiom* ax = theory->theory.find_axiom(axiom);
    if (!ax) {
      throw logikon::Error(ErrorCode::invalid_argument, std::string("no axiom named '") + axiom + "'");
    }
    *out = new lk_network{logikon::bundle_axiom(theory->theory, *ax, beta)};
  });
}

lk_status lk_network_from_json(const char* text, lk_network** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new lk_network{logikon::bundle_from_json(text)};
  });
}

lk_status lk_network_to_json(const lk_network* net, char** out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    *out = dup(logikon::to_json(net->bundle));
  });
}

void lk_network_free(lk_network* net) { delete net; }

lk_status lk_network_info_get(const lk_network* net, lk_network_info* info) {
  return guarded([&] {
    require(net, "net");
    require(info, "info");
    const logikon::NetworkGraph& g = net->bundle.graph;
    *info = {g.input_count(), g.outputs().size(), g.gate_count(), g.depth(),
             net->bundle.params.slots.size(), net->bundle.params.size(), net->bundle.beta};
  });
}

lk_status lk_network_eval(const lk_network* net, const double* input, size_t input_len,
                          double beta, double* output, size_t output_len) {
  return guarded([&] {
    require(net, "net");
    if (input_len > 0) require(input, "input");
    require(output, "output");
    const logikon::NetworkGraph& g = net->bundle.graph;
    if (input_len != g.input_count()) {
      throw logikon::Error(ErrorCode::arity_mismatch,
                           "expected " + std::to_string(g.input_count()) + " input(s), got " +
                               std::to_string(input_len));
    }
    if (output_len < g.outputs().size()) {
      throw logikon::Error(ErrorCode::arity_mismatch, "output buffer too small");
    }
    const logikon::Temperature t(beta > 0.0 ? beta : net->bundle.beta);
    const auto y = logikon::evaluate(g, net->bundle.params, {input, input_len}, t);
    std::copy(y.begin(), y.end(), output);
  });
}

lk_status lk_network_constraint_report(const lk_network* net, const char* axioms,
                                       char** out_json) {
  return guarded([&] {
    require(net, "net");
    require(out_json, "out_json");
    const logikon::ConstraintSet gset = constraints_for(net->bundle, split_names(axioms));
    *out_json = dup(logikon::constraint_report(gset, net->bundle.params,
                                               logikon::Temperature(net->bundle.beta))
                        .dump(2) +
                    "\n");
  });
}

lk_status lk_network_compare(const lk_network* a, const lk_network* b, size_t samples,
                             unsigned long long seed, char** out_json, int* identical) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    const logikon::CheckEntry e = logikon::forward_identity_check(
        "export", a->bundle.graph, a->bundle.params, b->bundle.graph, b->bundle.params,
        logikon::Temperature(a->bundle.beta), samples, seed);
    logikon::VerificationReport r{{e}};
    if (out_json) *out_json = dup(r.to_json().dump(2) + "\n");
    if (identical) *identical = e.passed ? 1 : 0;
  });
}

lk_status lk_train(lk_network* net, const char* config_json, const char* data_csv,
                   char** trace_csv, char** summary_json) {
  return guarded([&] {
    require(net, "net");
    require(data_csv, "data_csv");
    logikon::NetworkBundle& b = net->bundle;
    const json cfg_json = config_json && *config_json ? json::parse(config_json) : json::object();

    logikon::OptimizerConfig cfg;
    cfg.beta = b.beta;
    std::string method = "riemannian";
    std::string init = "retract";
    double init_scale = 0.1;
    std::vector<std::string> axioms;
    for (const auto& [key, v] : cfg_json.items()) {
      if (key == "method") method = v.get<std::string>();
      else if (key == "learning_rate") cfg.learning_rate = v.get<double>();
      else if (key == "epsilon") cfg.epsilon = v.get<double>();
      else if (key == "max_iterations") cfg.max_iterations = v.get<std::size_t>();
      else if (key == "max_newton_steps") cfg.retraction.max_newton_steps = v.get<std::size_t>();
      else if (key == "beta") cfg.beta = v.get<double>();
      else if (key == "penalty_weight") cfg.penalty_weight = v.get<double>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "stationarity_tolerance") cfg.stationarity_tolerance = v.get<double>();
      else if (key == "max_backoff") cfg.max_backoff = v.get<std::size_t>();
      else if (key == "descent_slack") cfg.descent_slack = v.get<double>();
      else if (key == "init") init = v.get<std::string>();
      else if (key == "init_scale") init_scale = v.get<double>();
      else if (key == "axioms") axioms = v.get<std::vector<std::string>>();
      else if (key == "anneal") {
        logikon::AnnealSpec a;
        a.beta_start = v.at("start").get<double>();
        a.beta_end = v.at("end").get<double>();
        a.steps = v.at("steps").get<std::size_t>();
        const std::string shape = v.value("shape", std::string("linear"));
        if (shape == "exponential") a.shape = logikon::ScheduleShape::exponential;
        else if (shape != "linear") {
          throw logikon::Error(ErrorCode::invalid_argument, "unknown schedule shape '" + shape + "'");
        }
        cfg.schedule = a;
      } else {
        throw logikon::Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
      }
    }
    if (method != "riemannian" && method != "penalty") {
      throw logikon::Error(ErrorCode::invalid_argument, "unknown method '" + method + "'");
    }
    cfg.validate();

    const logikon::Dataset data = logikon::parse_dataset(data_csv, b.graph.input_count());
    for (const logikon::Sample& s : data) {
      if (s.target.size() != 1 && s.target.size() != b.graph.outputs().size()) {
        throw logikon::Error(ErrorCode::invalid_argument,
                             "data has " + std::to_string(s.target.size()) +
                                 " target column(s); network has " +
                                 std::to_string(b.graph.outputs().size()) + " output(s)");
      }
    }
    const logikon::ConstraintSet gset = constraints_for(b, axioms);
    const logikon::Temperature beta0(cfg.beta_at(0));

    logikon::ParameterStore start = b.params;
    double init_correction = 0.0;
    std::size_t init_steps = 0;
    if (method == "riemannian" && init != "none") {
      logikon::RetractionResult r;
      if (init == "retract") {
        const std::vector<double> zero(start.size(), 0.0);
        r = logikon::retract(start, zero, gset, beta0, cfg);
      } else if (init == "canonical") {
        r = logikon::initialize_on_manifold(gset, beta0, logikon::ManifoldInit::canonical(), cfg);
      } else if (init == "random") {
        r = logikon::initialize_on_manifold(gset, beta0,
                                            logikon::ManifoldInit::random(cfg.seed, init_scale), cfg);
      } else {
        throw logikon::Error(ErrorCode::invalid_argument, "unknown init '" + init + "'");
      }
      init_correction = r.correction_norm;
      init_steps = r.newton_steps;
      start = std::move(r.params);
    }

    logikon::TrainResult result =
        method == "riemannian" ? logikon::train(b.graph, gset, data, start, cfg)
                               : logikon::penalty_train(b.graph, gset, data, start, cfg);
    const logikon::TraceRecord& last = result.trace.records.back();
    double worst = 0.0;
    for (const auto& r : result.trace.records) worst = std::max(worst, r.constraint_norm);

    json changes = json::array();
    for (const auto& c : result.trace.beta_changes) {
      changes.push_back({{"iteration", c.iteration}, {"beta", c.beta}, {"correction", c.correction_norm}});
    }
    const json summary = {{"method", method},
                          {"iterations", last.iteration},
                          {"converged", result.converged},
                          {"final_loss", last.loss},
                          {"constraint_norm", last.constraint_norm},
                          {"max_constraint_norm", worst},
                          {"projected_gradient_norm", last.projected_gradient_norm},
                          {"beta", last.beta},
                          {"init_newton_steps", init_steps},
                          {"init_correction", init_correction},
                          {"beta_changes", std::move(changes)}};
    b.params = std::move(result.params);
    b.beta = last.beta;
    if (trace_csv) *trace_csv = dup(result.trace.to_csv());
    if (summary_json) *summary_json = dup(summary.dump(2) + "\n");
  });
}

lk_status lk_verify_theory(const lk_theory* theory, const char* options_json, char** report_json,
                           char** table, int* all_passed) {
  return guarded([&] {
    require(theory, "theory");
    emit_report(logikon::verify_theory(theory->theory, verify_options(options_json)),
                report_json, table, all_passed);
  });
}

lk_status lk_verify_network(const lk_network* net, const char* options_json, char** report_json,
                            char** table, int* all_passed) {
  return guarded([&] {
    require(net, "net");
    emit_report(logikon::verify_bundle(net->bundle, verify_options(options_json)), report_json,
                table, all_passed);
  });
}

}  // extern "C"
