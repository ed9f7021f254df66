#include "core/verifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <set>

#include "core/boolean.hpp"
#include "core/error.hpp"
#include "core/lawvere.hpp"
#include "core/parallel.hpp"

namespace logikon {

namespace {

constexpr std::size_t kMaxVertexInputs = 20;
constexpr std::size_t kMaxWitnesses = 16;

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return shortest(v);
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<std::vector<double>> sample_inputs(std::size_t n, std::size_t samples,
                                               std::uint64_t seed, bool with_vertices) {
  std::vector<std::vector<double>> inputs;
  if (with_vertices && n <= 12) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) inputs.push_back(vertex(m, n));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> x(n);
    for (double& v : x) v = unit(rng);
    inputs.push_back(std::move(x));
  }
  return inputs;
}

CheckEntry failed_entry(std::string name, std::string note) {
  CheckEntry e;
  e.name = std::move(name);
  e.passed = false;
  e.measured = std::numeric_limits<double>::quiet_NaN();
  e.witnesses.push_back({{}, 0.0, 0.0, std::move(note)});
  return e;
}

}  // namespace

bool VerificationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.passed; });
}

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckEntry& e : entries) {
    nlohmann::ordered_json w = nlohmann::ordered_json::array();
    for (const Witness& x : e.witnesses) {
      w.push_back({{"input", x.input},
                   {"measured", number(x.measured)},
                   {"expected", number(x.expected)},
                   {"note", x.note}});
    }
    checks.push_back({{"name", e.name},
                      {"status", e.passed ? "pass" : "fail"},
                      {"measured", number(e.measured)},
                      {"tolerance", number(e.tolerance)},
                      {"witnesses", std::move(w)},
                      {"details", e.details}});
  }
  return {{"all_passed", all_passed()}, {"checks", std::move(checks)}};
}

std::string VerificationReport::to_table() const {
  std::size_t width = 5;
  for (const CheckEntry& e : entries) width = std::max(width, e.name.size());
  std::string out = "check" + std::string(width - 5 + 2, ' ') + "status  measured                tolerance\n";
  for (const CheckEntry& e : entries) {
    std::string m = shortest(e.measured);
    m.resize(std::max<std::size_t>(m.size(), 22), ' ');
    out += e.name + std::string(width - e.name.size() + 2, ' ') + (e.passed ? "pass    " : "FAIL    ") +
           m + "  " + shortest(e.tolerance) + "\n";
    if (!e.passed) {
      for (const Witness& w : e.witnesses) {
        out += "    witness";
        if (!w.input.empty()) {
          out += " (";
          for (std::size_t i = 0; i < w.input.size(); ++i) {
            out += (i ? ", " : "") + shortest(w.input[i]);
          }
          out += ") measured " + shortest(w.measured) + " expected " + shortest(w.expected);
        }
        if (!w.note.empty()) out += " " + w.note;
        out += "\n";
      }
    }
  }
  std::size_t passed = 0;
  for (const CheckEntry& e : entries) passed += e.passed ? 1 : 0;
  out += std::to_string(passed) + "/" + std::to_string(entries.size()) + " checks passed\n";
  return out;
}

std::vector<double> vertex(std::uint64_t mask, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = ((mask >> i) & 1U) ? 1.0 : 0.0;
  return x;
}

CheckEntry truth_table_check(const NetworkGraph& g, const Term& expr, std::size_t n,
                             const ParameterStore& params, Temperature beta, double tolerance,
                             std::size_t output) {
  if (n > kMaxVertexInputs) {
    throw Error(ErrorCode::out_of_range, "truth-table check limited to 20 inputs");
  }
  if (g.input_count() != n || output >= g.outputs().size()) {
    throw Error(ErrorCode::arity_mismatch, "network shape does not match the expression");
  }
  CheckEntry e;
  e.name = "truth";
  e.tolerance = tolerance;
  std::vector<Witness> bad;
  Witness worst;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    std::vector<double> x = vertex(m, n);
    const double out = evaluate(g, params, x, beta)[output];
    const double expected = evaluate_boolean(expr, m) ? 1.0 : 0.0;
    const double dev = std::abs(out - expected);
    if (!(dev <= e.measured) || m == 0) {
      e.measured = dev;
      worst = {x, out, expected, {}};
    }
    if (!(dev <= tolerance) && bad.size() < kMaxWitnesses) bad.push_back({x, out, expected, {}});
  }
  e.passed = e.measured <= tolerance;
  e.witnesses = std::move(bad);
  e.details = {{"vertices", std::uint64_t{1} << n},
               {"beta", beta.value()},
               {"worst_input", worst.input}};
  return e;
}

SweepResult truth_sweep(const Theory& theory, std::size_t n, std::size_t max_depth,
                        Temperature beta, Temperature beta_threshold) {
  if (n > 6) throw Error(ErrorCode::out_of_range, "truth sweep limited to 6 variables");
  if (!has_boolean_interpretation(theory)) {
    throw Error(ErrorCode::unsupported, "theory has no boolean interpretation");
  }
  auto [model, params] = assign_model(theory, beta, InitSpec::canonical());
  SweepResult result;
  std::vector<std::vector<double>> vertices;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) vertices.push_back(vertex(m, n));

  constexpr std::size_t kBatch = 4096;
  std::vector<Term> batch;
  batch.reserve(kBatch);
  auto flush = [&] {
    if (batch.empty()) return;
    const NetworkGraph g = compile(model, std::span<const Term>(batch), n);
    std::vector<std::uint64_t> tables(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) tables[j] = truth_table(batch[j], n);
    for (std::uint64_t m = 0; m < vertices.size(); ++m) {
      const std::vector<double> soft = evaluate(g, params, vertices[m], beta);
      const std::vector<double> sharp = evaluate(g, params, vertices[m], beta_threshold);
      for (std::size_t j = 0; j < batch.size(); ++j) {
        const bool bit = (tables[j] >> m) & 1U;
        const double dev = std::abs(soft[j] - (bit ? 1.0 : 0.0));
        if (!(dev <= result.max_deviation)) {
          result.max_deviation = dev;
          result.worst = batch[j];
        }
        if ((sharp[j] > 0.5) != bit) {
          if (result.threshold_mismatches == 0) result.first_mismatch = batch[j];
          ++result.threshold_mismatches;
        }
      }
    }
    result.terms += batch.size();
    batch.clear();
  };
  for_each_term(theory, n, max_depth, [&](const Term& t) {
    batch.push_back(t);
    if (batch.size() == kBatch) flush();
  });
  flush();
  return result;
}

CheckEntry truth_sweep_check(const Theory& theory, std::size_t n, std::size_t max_depth,
                             Temperature beta, Temperature beta_threshold, double tolerance) {
  const SweepResult r = truth_sweep(theory, n, max_depth, beta, beta_threshold);
  CheckEntry e;
  e.name = "truth_sweep";
  e.measured = r.max_deviation;
  e.tolerance = tolerance;
  e.passed = r.max_deviation <= tolerance && r.threshold_mismatches == 0;
  if (!(r.max_deviation <= tolerance) && r.worst) {
    e.witnesses.push_back({{}, r.max_deviation, tolerance, to_string(*r.worst)});
  }
  if (r.first_mismatch) {
    e.witnesses.push_back({{}, 0.0, 0.0, "threshold mismatch: " + to_string(*r.first_mismatch)});
  }
  e.details = {{"terms", r.terms},
               {"beta", beta.value()},
               {"beta_threshold", beta_threshold.value()},
               {"threshold_mismatches", r.threshold_mismatches}};
  return e;
}

CheckEntry arm_equivalence_check(const NetworkGraph& left, const ParameterStore& left_params,
                                 const NetworkGraph& right, const ParameterStore& right_params,
                                 Temperature beta, const ArmCheckOptions& options) {
  if (left.input_count() != right.input_count() ||
      left.outputs().size() != right.outputs().size()) {
    throw Error(ErrorCode::arity_mismatch, "arms differ in input or output arity");
  }
  if (!left.compatible_with(left_params) || !right.compatible_with(right_params)) {
    throw Error(ErrorCode::layout_mismatch, "parameters do not match the arm's slot layout");
  }
  CheckEntry e;
  e.name = "arms";
  e.tolerance = options.tolerance;

  // Sharing audit: one parameter vector per connective across both arms.
  struct Seen {
    std::string where;
    std::vector<double> params;
  };
  std::map<std::string, Seen> seen;
  double slot_gap = 0.0;
  auto audit = [&](const ParameterStore& store, const char* arm) {
    for (std::size_t s = 0; s < store.slots.size(); ++s) {
      const std::string& c = store.slots[s].connective;
      const auto p = store.slot_params(s);
      const std::string where = std::string(arm) + " slot " + std::to_string(s);
      auto it = seen.find(c);
      if (it == seen.end()) {
        seen.emplace(c, Seen{where, {p.begin(), p.end()}});
        continue;
      }
      double gap = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        gap = std::max(gap, std::abs(p[i] - it->second.params[i]));
      }
      if (gap > 0.0) {
        slot_gap = std::max(slot_gap, gap);
        e.witnesses.push_back({{p.begin(), p.end()}, gap, 0.0,
                               "'" + c + "' " + where + " differs from " + it->second.where});
      }
    }
  };
  audit(left_params, "left");
  audit(right_params, "right");

  Witness worst;
  const std::size_t n = left.input_count();
  for (const std::vector<double>& x : sample_inputs(n, options.interior_samples, options.seed, true)) {
    const auto a = evaluate(left, left_params, x, beta);
    const auto b = evaluate(right, right_params, x, beta);
    for (std::size_t o = 0; o < a.size(); ++o) {
      const double d = std::abs(a[o] - b[o]);
      if (!(d <= e.measured)) {
        e.measured = d;
        worst = {x, a[o], b[o], {}};
      }
    }
  }
  const bool numeric_ok = e.measured <= options.tolerance;
  if (!numeric_ok) {
    worst.note = "left vs right";
    e.witnesses.push_back(worst);
  }
  e.passed = numeric_ok && slot_gap == 0.0;
  e.details = {{"beta", beta.value()},
               {"inputs", n <= 12 ? (std::uint64_t{1} << n) + options.interior_samples
                                  : options.interior_samples},
               {"sharing", slot_gap == 0.0 ? "intact" : "broken"},
               {"max_slot_gap", slot_gap}};
  return e;
}

CheckEntry arm_equivalence_check(const NetworkGraph& arms, const ParameterStore& params,
                                 Temperature beta, const ArmCheckOptions& options) {
  if (arms.outputs().size() != 2) {
    throw Error(ErrorCode::arity_mismatch, "arm graph needs exactly two outputs");
  }
  NetworkGraph::Builder lb(arms.input_count(), arms.slots(), false);
  NetworkGraph::Builder rb(arms.input_count(), arms.slots(), false);
  for (std::size_t i = arms.input_count(); i < arms.node_count(); ++i) {
    lb.add_gate(arms.nodes()[i].index, arms.args(i));
    rb.add_gate(arms.nodes()[i].index, arms.args(i));
  }
  lb.add_output(arms.outputs()[0]);
  rb.add_output(arms.outputs()[1]);
  const NetworkGraph left = std::move(lb).build();
  const NetworkGraph right = std::move(rb).build();
  return arm_equivalence_check(left, params, right, params, beta, options);
}

CheckEntry bound_check_lemma32(std::span<const double> betas,
                               std::span<const std::string> connectives) {
  static const std::vector<std::string> kDefault{"and", "or", "not"};
  if (connectives.empty()) connectives = kDefault;
  CheckEntry e;
  e.name = "lemma32";
  e.tolerance = 1e-12;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const std::string& c : connectives) {
    const std::size_t arity = c == "not" ? 1 : 2;
    const auto op = boolean_interpretation(c, arity);
    if (!op) throw Error(ErrorCode::unsupported, "no boolean meaning for '" + c + "'");
    const GateKernel k = canonical_kernel(c, arity);
    const std::uint64_t count = std::uint64_t{1} << arity;
    std::vector<double> margin(count);
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::uint64_t m = 0; m < count; ++m) {
      const std::vector<double> x = vertex(m, arity);
      double z = k.bias();
      for (std::size_t i = 0; i < arity; ++i) z += k.params[i] * x[i];
      margin[m] = std::abs(z);
      min_margin = std::min(min_margin, margin[m]);
    }
    for (double b : betas) {
      const Temperature beta(b);
      const double bound = error_bound(c, beta);
      for (std::uint64_t m = 0; m < count; ++m) {
        const std::vector<double> x = vertex(m, arity);
        bool args[2] = {(m & 1U) != 0, (m & 2U) != 0};
        const double truth = apply_boolean(*op, std::span<const bool>(args, arity)) ? 1.0 : 0.0;
        const double err = std::abs(gate_eval(k.params, x, beta) - truth);
        const bool worst = margin[m] == min_margin;
        rows.push_back({{"connective", c},
                        {"beta", b},
                        {"input", x},
                        {"error", err},
                        {"bound", bound},
                        {"worst_case", worst}});
        if (worst) {
          const double gap = std::abs(err - bound);
          e.measured = std::max(e.measured, gap);
          if (!(gap <= e.tolerance)) {
            e.witnesses.push_back({x, err, bound, c + " at beta " + shortest(b) + ": bound not attained"});
          }
        } else if (!(err < bound)) {
          e.witnesses.push_back({x, err, bound, c + " at beta " + shortest(b) + ": not strictly below bound"});
        }
        if (!(err <= bound + e.tolerance) && !worst) {
          e.witnesses.push_back({x, err, bound, c + " at beta " + shortest(b) + ": bound exceeded"});
        }
      }
    }
  }
  e.passed = e.witnesses.empty();
  e.details = {{"rows", std::move(rows)}};
  return e;
}

EnvelopeFit measure_envelope(const Theory& theory, const Axiom& axiom,
                             const ParameterStore& params, std::span<const double> betas) {
  auto [model, canonical] = assign_model(theory, Temperature(1.0), InitSpec::canonical());
  const std::vector<Term> sides{axiom.lhs, axiom.rhs};
  const std::size_t n = axiom.context_size;
  if (n > kMaxVertexInputs) throw Error(ErrorCode::out_of_range, "axiom context too large");
  const NetworkGraph g = compile(model, std::span<const Term>(sides), n);
  if (!g.compatible_with(params)) {
    throw Error(ErrorCode::layout_mismatch, "parameters do not match the theory's slots");
  }
  EnvelopeFit fit;
  fit.depth = std::max(axiom.lhs.depth(), axiom.rhs.depth());
  for (double b : betas) {
    double dev = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const auto out = evaluate(g, params, vertex(m, n), Temperature(b));
      dev = std::max(dev, std::abs(out[0] - out[1]));
    }
    fit.betas.push_back(b);
    fit.deviations.push_back(dev);
  }
  // Least squares of log(dev) - d log L(beta) = log C - alpha beta.
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < fit.betas.size(); ++i) {
    if (fit.deviations[i] > 0.0) {
      xs.push_back(fit.betas[i]);
      ys.push_back(std::log(fit.deviations[i]) -
                   std::log(lipschitz_bound(fit.depth, Temperature(fit.betas[i]))));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx > 0.0) {
      const double alpha = -sxy / sxx;
      double c = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) c = std::max(c, std::exp(ys[i] + alpha * xs[i]));
      fit.alpha = alpha;
      fit.c = c;
    }
  }
  return fit;
}

CheckEntry bound_check_thm42(const Theory& theory, const Axiom& axiom,
                             const ParameterStore& params, std::span<const double> betas,
                             double alpha_floor) {
  const EnvelopeFit fit = measure_envelope(theory, axiom, params, betas);
  CheckEntry e;
  e.name = "envelope:" + axiom.name;
  e.tolerance = alpha_floor;
  const bool all_zero = std::all_of(fit.deviations.begin(), fit.deviations.end(),
                                    [](double d) { return d == 0.0; });
  nlohmann::ordered_json envelope = nlohmann::ordered_json::array();
  if (all_zero) {
    e.passed = true;
    e.measured = 0.0;
  } else {
    bool decreasing = true;
    for (std::size_t i = 1; i < fit.deviations.size(); ++i) {
      if (!(fit.deviations[i] < fit.deviations[i - 1])) {
        decreasing = false;
        e.witnesses.push_back({{fit.betas[i]}, fit.deviations[i], fit.deviations[i - 1],
                               "deviation did not decrease"});
      }
    }
    e.measured = fit.alpha.value_or(std::numeric_limits<double>::quiet_NaN());
    const bool alpha_ok = fit.alpha && *fit.alpha >= alpha_floor;
    if (!alpha_ok) {
      e.witnesses.push_back({{}, e.measured, alpha_floor, "fitted rate below floor"});
    }
    if (fit.alpha) {
      for (std::size_t i = 0; i < fit.betas.size(); ++i) {
        envelope.push_back(*fit.c * lipschitz_bound(fit.depth, Temperature(fit.betas[i])) *
                           std::exp(-*fit.alpha * fit.betas[i]));
      }
    }
    e.passed = decreasing && alpha_ok;
  }
  e.details = {{"depth", fit.depth},
               {"betas", fit.betas},
               {"deviations", fit.deviations},
               {"alpha", fit.alpha ? nlohmann::ordered_json(*fit.alpha) : nullptr},
               {"C", fit.c ? nlohmann::ordered_json(*fit.c) : nullptr},
               {"envelope", std::move(envelope)}};
  return e;
}

CheckEntry forward_identity_check(std::string name, const NetworkGraph& a,
                                  const ParameterStore& pa, const NetworkGraph& b,
                                  const ParameterStore& pb, Temperature beta,
                                  std::size_t samples, std::uint64_t seed) {
  CheckEntry e;
  e.name = std::move(name);
  e.tolerance = 0.0;
  if (a.input_count() != b.input_count() || a.outputs().size() != b.outputs().size()) {
    e.passed = false;
    e.witnesses.push_back({{}, static_cast<double>(b.input_count()),
                           static_cast<double>(a.input_count()), "network shapes differ"});
    return e;
  }
  std::size_t mismatches = 0;
  const auto inputs = sample_inputs(a.input_count(), samples, seed, true);
  for (const std::vector<double>& x : inputs) {
    const auto ya = evaluate(a, pa, x, beta);
    const auto yb = evaluate(b, pb, x, beta);
    for (std::size_t o = 0; o < ya.size(); ++o) {
      if (!bit_equal(ya[o], yb[o])) {
        ++mismatches;
        e.measured = std::max(e.measured, std::abs(ya[o] - yb[o]));
        if (e.witnesses.size() < kMaxWitnesses) {
          e.witnesses.push_back({x, yb[o], ya[o], "output " + std::to_string(o)});
        }
      }
    }
  }
  e.passed = mismatches == 0;
  e.details = {{"inputs", inputs.size()}, {"mismatches", mismatches}};
  return e;
}

CheckEntry roundtrip_check(const NetworkGraph& g, const ParameterStore& params,
                           std::span<const Term> exprs, std::size_t n, Temperature beta,
                           std::size_t samples, std::uint64_t seed) {
  ParametricModel model;
  try {
    model = extract_model(g, params, beta);
  } catch (const Error& err) {
    return failed_entry("roundtrip", err.what());
  }
  const NetworkGraph again = compile(model, exprs, n);
  const ParameterStore again_params = store_from_model(model);
  return forward_identity_check("roundtrip", g, params, again, again_params, beta, samples, seed);
}

Term random_term(const Theory& theory, std::size_t n, std::size_t max_depth,
                 std::mt19937_64& rng) {
  std::vector<const Connective*> leaves, nodes;
  for (const Connective& c : theory.connectives) (c.arity == 0 ? leaves : nodes).push_back(&c);
  const std::size_t choices = n + leaves.size() + (max_depth > 0 ? nodes.size() : 0);
  if (choices == 0) throw Error(ErrorCode::invalid_argument, "no terms to draw from");
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, choices - 1)(rng);
  if (pick < n) return Term::variable(pick);
  pick -= n;
  if (pick < leaves.size()) return Term::apply(leaves[pick]->name, {});
  pick -= leaves.size();
  const Connective& c = *nodes[pick];
  std::vector<Term> args;
  for (std::size_t i = 0; i < c.arity; ++i) args.push_back(random_term(theory, n, max_depth - 1, rng));
  return Term::apply(c.name, std::move(args));
}

CheckEntry functoriality_check(const Theory& theory, Temperature beta,
                               const FunctorOptions& options) {
  auto [model, params] = assign_model(theory, beta, InitSpec::canonical());
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> arity(1, 3);
  CheckEntry e;
  e.name = "functor";
  e.tolerance = options.tolerance;
  std::size_t structural_failures = 0;

  auto morphism = [&](std::size_t source, std::size_t target) {
    TupleMorphism f{source, {}};
    for (std::size_t i = 0; i < target; ++i) {
      f.components.push_back(random_term(theory, source, options.max_depth, rng));
    }
    return f;
  };
  auto describe = [](const TupleMorphism& f) {
    std::string s = "<";
    for (std::size_t i = 0; i < f.components.size(); ++i) {
      s += (i ? ", " : "") + to_string(f.components[i]);
    }
    return s + ">";
  };

  for (std::size_t p = 0; p < options.pairs; ++p) {
    const std::size_t n = arity(rng), m = arity(rng), k = arity(rng);
    const TupleMorphism f = morphism(n, m);
    const TupleMorphism g = morphism(m, k);
    const TupleMorphism h = compose(f, g);

    if (compose(identity_morphism(n), f) != f || compose(f, identity_morphism(m)) != f) {
      ++structural_failures;
      e.witnesses.push_back({{}, 0.0, 0.0, "identity law fails for " + describe(f)});
    }

    const NetworkGraph gf = compile(model, std::span<const Term>(f.components), n);
    const NetworkGraph gg = compile(model, std::span<const Term>(g.components), m);
    const NetworkGraph gh = compile(model, std::span<const Term>(h.components), n);
    const NetworkGraph gid =
        compile(model, std::span<const Term>(identity_morphism(n).components), n);
    for (const auto& x : sample_inputs(n, options.samples, rng(), true)) {
      const auto direct = evaluate(gh, params, x, beta);
      const auto staged = evaluate(gg, params, evaluate(gf, params, x, beta), beta);
      const auto ident = evaluate(gid, params, x, beta);
      for (std::size_t o = 0; o < direct.size(); ++o) {
        const double d = std::abs(direct[o] - staged[o]);
        if (d > e.measured) e.measured = d;
        if (!(d <= options.tolerance) && e.witnesses.size() < kMaxWitnesses) {
          e.witnesses.push_back({x, direct[o], staged[o],
                                 "f = " + describe(f) + ", g = " + describe(g)});
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!bit_equal(ident[i], x[i])) {
          ++structural_failures;
          e.witnesses.push_back({x, ident[i], x[i], "identity network is not the identity"});
        }
      }
    }
  }
  e.passed = structural_failures == 0 && e.measured <= options.tolerance;
  e.details = {{"pairs", options.pairs}, {"max_depth", options.max_depth}, {"beta", beta.value()}};
  return e;
}

Census census(const Theory& theory, std::size_t n, std::size_t max_depth, Temperature beta,
              std::size_t term_cap) {
  if (n > 6) throw Error(ErrorCode::out_of_range, "census limited to 6 variables");
  auto [model, params] = assign_model(theory, beta, InitSpec::canonical());
  EnumerationOptions opts;
  opts.mode = EqualityMode::semantic();
  opts.term_cap = term_cap;
  const std::vector<TermClass> classes = enumerate_terms(theory, n, max_depth, opts);

  Census c;
  c.classes = classes.size();
  std::vector<std::uint64_t> class_function(classes.size());
  std::vector<std::vector<std::uint64_t>> member_functions(classes.size());
  parallel_for(classes.size(), [&](std::size_t k) {
    const TermClass& cls = classes[k];
    const NetworkGraph g = compile(model, std::span<const Term>(cls.members), n);
    std::vector<std::uint64_t> fn(cls.members.size(), 0);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const auto out = evaluate(g, params, vertex(m, n), beta);
      for (std::size_t j = 0; j < out.size(); ++j) {
        if (out[j] > 0.5) fn[j] |= std::uint64_t{1} << m;
      }
    }
    member_functions[k] = std::move(fn);
  });

  std::set<std::uint64_t> reachable;
  std::map<std::uint64_t, std::size_t> owner;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    c.terms += classes[k].members.size();
    const auto& fns = member_functions[k];
    class_function[k] = fns.front();
    for (std::size_t j = 0; j < fns.size(); ++j) {
      reachable.insert(fns[j]);
      if (fns[j] != fns.front() && c.members_agree) {
        c.members_agree = false;
        c.witness = classes[k].members[j];
      }
    }
    if (!owner.emplace(class_function[k], k).second && c.classes_distinct) {
      c.classes_distinct = false;
      if (!c.witness) c.witness = classes[k].representative;
    }
    if (classes[k].truth_table) c.class_tables.push_back(*classes[k].truth_table);
  }
  c.reachable.assign(reachable.begin(), reachable.end());
  std::sort(c.class_tables.begin(), c.class_tables.end());
  return c;
}

CheckEntry expressivity_census(const Theory& theory, std::size_t n, std::size_t max_depth,
                               Temperature beta, std::size_t term_cap) {
  const Census c = census(theory, n, max_depth, beta, term_cap);
  CheckEntry e;
  e.name = "census";
  e.measured = static_cast<double>(c.reachable.size());
  e.tolerance = static_cast<double>(c.classes);
  const bool match = c.reachable == c.class_tables;
  e.passed = c.members_agree && c.classes_distinct && match;
  if (!c.members_agree && c.witness) {
    e.witnesses.push_back({{}, 0.0, 0.0, "class members disagree: " + to_string(*c.witness)});
  }
  if (!c.classes_distinct) {
    e.witnesses.push_back({{}, 0.0, 0.0,
                           "two classes share a function" +
                               (c.witness ? ": " + to_string(*c.witness) : std::string())});
  }
  if (!match) {
    e.witnesses.push_back({{}, e.measured, static_cast<double>(c.class_tables.size()),
                           "reachable functions differ from class truth tables"});
  }
  e.details = {{"n", n},
               {"depth", max_depth},
               {"beta", beta.value()},
               {"classes", c.classes},
               {"terms", c.terms},
               {"reachable", c.reachable}};
  return e;
}

VerificationReport verify_theory(const Theory& theory, const VerifyOptions& options) {
  std::vector<std::string> suites;
  for (const std::string& s : options.suites) {
    if (s == "all") {
      suites.insert(suites.end(), kSuites.begin(), kSuites.end());
    } else if (std::find(kSuites.begin(), kSuites.end(), s) != kSuites.end()) {
      suites.push_back(s);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown suite '" + s + "'");
    }
  }
  const bool everything =
      std::find(options.suites.begin(), options.suites.end(), "all") != options.suites.end();
  const bool boolean = has_boolean_interpretation(theory);
  auto grid = [&](std::vector<double> fallback) {
    return options.beta_grid.empty() ? fallback : options.beta_grid;
  };
  auto top = [&](double fallback) {
    return options.beta_grid.empty()
               ? fallback
               : *std::max_element(options.beta_grid.begin(), options.beta_grid.end());
  };
  auto prefixed = [](CheckEntry e, const std::string& name) {
    e.name = name;
    return e;
  };

  VerificationReport report;
  std::set<std::string> done;
  for (const std::string& suite : suites) {
    if (!done.insert(suite).second) continue;
    const bool needs_boolean = suite != "roundtrip" && suite != "functor";
    if (needs_boolean && !boolean) {
      if (everything) continue;
      throw Error(ErrorCode::unsupported,
                  "suite '" + suite + "' needs a theory with boolean semantics");
    }
    if (suite == "bounds") {
      const auto betas = grid({1, 2, 5, 10, 20, 40});
      std::vector<std::string> conns;
      for (const char* c : {"and", "or", "not"}) {
        const auto found = theory.find_connective(c);
        if (found && found->arity == (std::string_view(c) == "not" ? 1U : 2U)) conns.push_back(c);
      }
      if (!conns.empty()) report.entries.push_back(bound_check_lemma32(betas, conns));
    } else if (suite == "envelope") {
      const auto betas = grid({4, 8, 16, 32});
      auto [model, params] = assign_model(theory, Temperature(1.0), InitSpec::canonical());
      for (const Axiom& ax : theory.axioms) {
        report.entries.push_back(bound_check_thm42(theory, ax, params, betas));
      }
    } else if (suite == "truth") {
      for (double b : grid({40})) {
        auto [model, params] = assign_model(theory, Temperature(b), InitSpec::canonical());
        for (const Axiom& ax : theory.axioms) {
          for (int side = 0; side < 2; ++side) {
            const Term& t = side == 0 ? ax.lhs : ax.rhs;
            const NetworkGraph g = compile(model, t, ax.context_size);
            report.entries.push_back(prefixed(
                truth_table_check(g, t, ax.context_size, params, Temperature(b), 1e-6),
                "truth:" + ax.name + (side == 0 ? ".lhs" : ".rhs") + "@" + shortest(b)));
          }
        }
      }
    } else if (suite == "arms") {
      const double b = top(40);
      auto [model, params] = assign_model(theory, Temperature(b), InitSpec::canonical());
      for (const Axiom& ax : theory.axioms) {
        const NetworkGraph l = compile(model, ax.lhs, ax.context_size);
        const NetworkGraph r = compile(model, ax.rhs, ax.context_size);
        report.entries.push_back(prefixed(
            arm_equivalence_check(l, params, r, params, Temperature(b)), "arms:" + ax.name));
      }
    } else if (suite == "roundtrip") {
      const double b = top(40);
      auto [model, params] = assign_model(theory, Temperature(b), InitSpec::canonical());
      for (const Axiom& ax : theory.axioms) {
        const std::vector<Term> sides{ax.lhs, ax.rhs};
        const NetworkGraph g = compile(model, std::span<const Term>(sides), ax.context_size);
        report.entries.push_back(prefixed(
            roundtrip_check(g, params, sides, ax.context_size, Temperature(b), options.samples,
                            options.seed),
            "roundtrip:" + ax.name));
      }
    } else if (suite == "census") {
      report.entries.push_back(
          expressivity_census(theory, 2, options.census_depth, Temperature(top(60)), 1000000));
    } else if (suite == "functor") {
      FunctorOptions fo;
      fo.seed = options.seed;
      fo.samples = options.samples;
      report.entries.push_back(functoriality_check(theory, Temperature(top(8)), fo));
    }
  }
  return report;
}

VerificationReport verify_bundle(const NetworkBundle& bundle, const VerifyOptions& options) {
  std::vector<std::string> theory_suites;
  std::vector<std::string> network_suites;
  for (const std::string& s : options.suites) {
    if (s == "all") {
      theory_suites.insert(theory_suites.end(), {"bounds", "envelope", "census", "functor"});
      network_suites.insert(network_suites.end(), {"truth", "arms", "roundtrip"});
    } else if (s == "truth" || s == "arms" || s == "roundtrip") {
      network_suites.push_back(s);
    } else {
      theory_suites.push_back(s);
    }
  }
  const bool everything =
      std::find(options.suites.begin(), options.suites.end(), "all") != options.suites.end();
  VerificationReport report;
  if (!theory_suites.empty()) {
    VerifyOptions sub = options;
    sub.suites = theory_suites;
    if (everything && !has_boolean_interpretation(bundle.theory)) sub.suites = {"functor"};
    report = verify_theory(bundle.theory, sub);
  }
  const std::vector<double> betas =
      options.beta_grid.empty() ? std::vector<double>{bundle.beta} : options.beta_grid;
  const NetworkGraph& g = bundle.graph;
  const std::size_t n = g.input_count();
  const bool boolean = has_boolean_interpretation(bundle.theory);
  std::set<std::string> done;
  for (const std::string& suite : network_suites) {
    if (!done.insert(suite).second) continue;
    if (suite == "truth") {
      if (!boolean) {
        if (everything) continue;
        throw Error(ErrorCode::unsupported, "suite 'truth' needs a theory with boolean semantics");
      }
      if (bundle.expressions.size() != g.outputs().size()) {
        throw Error(ErrorCode::precondition, "network carries no expressions");
      }
      for (double b : betas) {
        for (std::size_t o = 0; o < bundle.expressions.size(); ++o) {
          CheckEntry e = truth_table_check(g, bundle.expressions[o], n, bundle.params,
                                           Temperature(b), 1e-6, o);
          e.name = "truth:" + std::to_string(o) + "@" + shortest(b);
          report.entries.push_back(std::move(e));
        }
      }
    } else if (suite == "arms") {
      if (g.outputs().size() != 2) {
        if (everything) continue;
        throw Error(ErrorCode::precondition, "suite 'arms' needs a two-output network");
      }
      for (double b : betas) {
        ArmCheckOptions ao;
        ao.seed = options.seed;
        CheckEntry e = arm_equivalence_check(g, bundle.params, Temperature(b), ao);
        e.name = "arms:" + bundle.axiom.value_or("outputs") + "@" + shortest(b);
        report.entries.push_back(std::move(e));
      }
    } else if (suite == "roundtrip") {
      if (bundle.expressions.size() != g.outputs().size()) {
        throw Error(ErrorCode::precondition, "network carries no expressions");
      }
      report.entries.push_back(roundtrip_check(g, bundle.params, bundle.expressions, n,
                                               Temperature(bundle.beta), options.samples,
                                               options.seed));
    }
  }
  return report;
}

}  // namespace logikon
