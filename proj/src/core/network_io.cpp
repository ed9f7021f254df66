#include "core/network_io.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "core/error.hpp"

namespace logikon {

namespace {

using json = nlohmann::ordered_json;

NetworkBundle make_bundle(const Theory& theory, std::vector<Term> exprs,
                          std::vector<std::string> variables, double beta) {
  auto [model, params] = assign_model(theory, Temperature(beta), InitSpec::canonical());
  NetworkBundle b;
  b.graph = compile(model, std::span<const Term>(exprs), variables.size());
  b.theory = theory;
  b.beta = beta;
  b.variables = std::move(variables);
  b.expressions = std::move(exprs);
  b.params = std::move(params);
  return b;
}

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, "network file: " + what);
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

// Slot keys: the connective name, with "#k" appended for the k-th extra
// slot of the same connective.
std::vector<std::string> slot_keys(const ParameterStore& params) {
  std::vector<std::string> keys;
  std::map<std::string, std::size_t> seen;
  for (const SlotLayout& s : params.slots) {
    const std::size_t k = seen[s.connective]++;
    keys.push_back(k == 0 ? s.connective : s.connective + "#" + std::to_string(k));
  }
  return keys;
}

}  // namespace

NetworkBundle bundle_expression(const Theory& theory, const Term& expr,
                                std::vector<std::string> variables, double beta) {
  return make_bundle(theory, {expr}, std::move(variables), beta);
}

NetworkBundle bundle_axiom(const Theory& theory, const Axiom& axiom, double beta) {
  NetworkBundle b = make_bundle(theory, {axiom.lhs, axiom.rhs}, axiom.variable_names, beta);
  b.axiom = axiom.name;
  return b;
}

std::string to_json(const NetworkBundle& b) {
  const NetworkGraph& g = b.graph;
  const std::vector<std::string> keys = slot_keys(b.params);
  json nodes = json::array();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto& n = g.nodes()[i];
    if (n.kind == NetworkGraph::NodeKind::input) {
      nodes.push_back({{"id", i}, {"kind", "input"}, {"index", n.index}});
    } else {
      const auto a = g.args(i);
      nodes.push_back({{"id", i},
                       {"kind", "gate"},
                       {"connective", keys[n.index]},
                       {"args", std::vector<std::size_t>(a.begin(), a.end())}});
    }
  }
  json slots = json::object();
  for (std::size_t s = 0; s < b.params.slots.size(); ++s) {
    const auto p = b.params.slot_params(s);
    const std::size_t k = b.params.slots[s].arity;
    slots[keys[s]] = {{"w", std::vector<double>(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k))},
                      {"b", p[k]}};
  }
  json exprs = json::array();
  for (const Term& t : b.expressions) exprs.push_back(to_string(t, b.variables));
  json j = {{"format", kNetworkFormat},
            {"theory", b.theory.name},
            {"beta", b.beta},
            {"inputs", g.input_count()},
            {"variables", b.variables},
            {"expressions", std::move(exprs)}};
  if (b.axiom) j["axiom"] = *b.axiom;
  j["theory_source"] = print_theory(b.theory);
  j["nodes"] = std::move(nodes);
  j["outputs"] = g.outputs();
  j["slots"] = std::move(slots);
  return j.dump(2) + "\n";
}

NetworkBundle bundle_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::syntax, std::string("network file is not JSON: ") + e.what());
  }
  if (field<std::string>(j, "format") != kNetworkFormat) bad("unsupported format");

  NetworkBundle b;
  b.theory = parse_theory(field<std::string>(j, "theory_source"));
  b.beta = field<double>(j, "beta");
  if (!(b.beta > 0.0) || !std::isfinite(b.beta)) bad("beta must be positive");
  const auto inputs = field<std::size_t>(j, "inputs");
  b.variables = field<std::vector<std::string>>(j, "variables");
  if (b.variables.size() != inputs) bad("variable count differs from inputs");
  if (j.contains("axiom")) b.axiom = field<std::string>(j, "axiom");

  std::vector<SlotSpec> specs;
  std::vector<double> values;
  std::map<std::string, std::size_t> slot_index;
  const json slots = field<json>(j, "slots");
  if (!slots.is_object()) bad("slots must be an object");
  for (const auto& [key, s] : slots.items()) {
    const std::string conn = key.substr(0, key.find('#'));
    const auto w = field<std::vector<double>>(s, "w");
    const Connective* c = b.theory.find_connective(conn);
    if (!c || c->arity != w.size()) bad("slot '" + key + "' does not match the theory");
    slot_index[key] = specs.size();
    specs.push_back({conn, w.size()});
    values.insert(values.end(), w.begin(), w.end());
    values.push_back(field<double>(s, "b"));
  }
  b.params = ParameterStore::with_layout(specs);
  b.params.values = std::move(values);
  for (double v : b.params.values) {
    if (!std::isfinite(v)) bad("non-finite parameter");
  }

  NetworkGraph::Builder builder(inputs, specs, false);
  const json nodes = field<json>(j, "nodes");
  if (!nodes.is_array()) bad("nodes must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& n = nodes[i];
    if (field<std::size_t>(n, "id") != i) bad("node ids must be consecutive");
    const auto kind = field<std::string>(n, "kind");
    if (kind == "input") {
      if (i >= inputs || field<std::size_t>(n, "index") != i) bad("input nodes must come first");
      continue;
    }
    if (kind != "gate" || i < inputs) bad("node " + std::to_string(i) + " has an invalid kind");
    const auto it = slot_index.find(field<std::string>(n, "connective"));
    if (it == slot_index.end()) bad("node " + std::to_string(i) + " names an unknown slot");
    const std::size_t slot = it->second;
    const auto args = field<std::vector<std::size_t>>(n, "args");
    for (std::size_t a : args) {
      if (a >= i) bad("node " + std::to_string(i) + " reads a later node");
    }
    try {
      builder.add_gate(slot, args);
    } catch (const Error& e) {
      bad("node " + std::to_string(i) + ": " + e.what());
    }
  }
  if (nodes.size() < inputs) bad("missing input nodes");
  for (std::size_t o : field<std::vector<std::size_t>>(j, "outputs")) {
    if (o >= nodes.size()) bad("output refers to a missing node");
    builder.add_output(o);
  }
  b.graph = std::move(builder).build();

  for (const json& e : field<json>(j, "expressions")) {
    if (!e.is_string()) bad("expressions must be strings");
    ParsedExpression p = parse_expression(e.get<std::string>(), b.theory, b.variables);
    if (p.variables.size() != b.variables.size()) bad("expression uses undeclared variables");
    b.expressions.push_back(std::move(p.term));
  }
  if (!b.expressions.empty() && b.expressions.size() != b.graph.outputs().size()) {
    bad("expression count differs from outputs");
  }
  return b;
}

}  // namespace logikon
