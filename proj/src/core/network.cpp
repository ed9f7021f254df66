#include "core/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <unordered_map>

#include "core/error.hpp"

namespace logikon {

// --- parameters -------------------------------------------------------------

ParameterStore ParameterStore::with_layout(std::span<const SlotSpec> specs) {
  ParameterStore p;
  std::size_t offset = 0;
  for (const SlotSpec& s : specs) {
    p.slots.push_back({s.connective, s.arity, offset});
    offset += s.arity + 1;
  }
  p.values.assign(offset, 0.0);
  return p;
}

std::span<const double> ParameterStore::slot_params(std::size_t slot) const {
  const SlotLayout& l = slots.at(slot);
  return {values.data() + l.offset, l.arity + 1};
}

std::span<double> ParameterStore::slot_params(std::size_t slot) {
  const SlotLayout& l = slots.at(slot);
  return {values.data() + l.offset, l.arity + 1};
}

std::optional<std::size_t> ParameterStore::find_slot(std::string_view connective) const {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].connective == connective) return i;
  }
  return std::nullopt;
}

std::vector<SlotSpec> ParameterStore::specs() const {
  std::vector<SlotSpec> out;
  out.reserve(slots.size());
  for (const SlotLayout& l : slots) out.push_back({l.connective, l.arity});
  return out;
}

std::pair<ParametricModel, ParameterStore> assign_model(const Theory& theory, Temperature beta,
                                                        const InitSpec& init) {
  ParametricModel model{theory.name, {}, beta};
  std::mt19937_64 rng(init.seed);
  std::uniform_real_distribution<double> uniform(-init.scale, init.scale);
  for (const Connective& c : theory.connectives) {
    GateKernel k = canonical_kernel(c.name, c.arity);
    if (init.kind == InitSpec::Kind::random) {
      for (double& v : k.params) v = uniform(rng);
    }
    model.kernels.push_back(std::move(k));
  }
  ParameterStore store = store_from_model(model);
  return {std::move(model), std::move(store)};
}

ParameterStore store_from_model(const ParametricModel& model) {
  std::vector<SlotSpec> specs;
  for (const GateKernel& k : model.kernels) specs.push_back({k.connective, k.arity});
  ParameterStore store = ParameterStore::with_layout(specs);
  for (std::size_t i = 0; i < model.kernels.size(); ++i) {
    const GateKernel& k = model.kernels[i];
    if (k.params.size() != k.arity + 1) {
      throw Error(ErrorCode::layout_mismatch, "kernel '" + k.connective + "' has " +
                                                  std::to_string(k.params.size()) +
                                                  " parameters, expected " +
                                                  std::to_string(k.arity + 1));
    }
    std::copy(k.params.begin(), k.params.end(), store.slot_params(i).begin());
  }
  return store;
}

// --- graph ------------------------------------------------------------------

namespace {

std::uint64_t next_graph_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

std::size_t NetworkGraph::depth() const noexcept {
  std::size_t d = 0;
  for (std::size_t o : outputs_) d = std::max(d, nodes_[o].depth);
  return d;
}

std::span<const std::size_t> NetworkGraph::args(std::size_t node) const {
  const Node& n = nodes_.at(node);
  return {arg_pool_.data() + n.arg_begin, n.arg_count};
}

bool NetworkGraph::compatible_with(const ParameterStore& params) const {
  if (params.slots.size() != slots_.size()) return false;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (params.slots[i].connective != slots_[i].connective ||
        params.slots[i].arity != slots_[i].arity) {
      return false;
    }
  }
  return true;
}

NetworkGraph::Builder::Builder(std::size_t inputs, std::vector<SlotSpec> slots,
                               bool share_subterms)
    : share_(share_subterms) {
  g_.inputs_ = inputs;
  g_.slots_ = std::move(slots);
  g_.nodes_.reserve(inputs);
  for (std::size_t i = 0; i < inputs; ++i) g_.nodes_.push_back({NodeKind::input, i, 0, 0, 0});
}

std::size_t NetworkGraph::Builder::add_gate(std::size_t slot, std::span<const std::size_t> args) {
  if (slot >= g_.slots_.size()) throw Error(ErrorCode::out_of_range, "gate slot out of range");
  if (g_.slots_[slot].arity != args.size()) {
    throw Error(ErrorCode::arity_mismatch, "gate for '" + g_.slots_[slot].connective +
                                               "' has " + std::to_string(args.size()) +
                                               " argument(s)");
  }
  std::size_t depth = 0;
  for (std::size_t a : args) {
    if (a >= g_.nodes_.size()) {
      throw Error(ErrorCode::out_of_range, "gate argument refers to a later node");
    }
    depth = std::max(depth, g_.nodes_[a].depth + 1);
  }
  constexpr std::size_t kLinearScanLimit = 64;
  std::vector<std::size_t> key;
  if (share_) {
    if (g_.gate_count() <= kLinearScanLimit) {
      for (std::size_t id = g_.inputs_; id < g_.nodes_.size(); ++id) {
        const Node& n = g_.nodes_[id];
        if (n.index == slot && n.arg_count == args.size() &&
            std::equal(args.begin(), args.end(), g_.arg_pool_.begin() + n.arg_begin)) {
          return id;
        }
      }
    } else {
      if (index_.empty()) {
        for (std::size_t id = g_.inputs_; id < g_.nodes_.size(); ++id) {
          const Node& n = g_.nodes_[id];
          std::vector<std::size_t> k{n.index};
          k.insert(k.end(), g_.arg_pool_.begin() + n.arg_begin,
                   g_.arg_pool_.begin() + n.arg_begin + n.arg_count);
          index_.emplace(std::move(k), id);
        }
      }
      key.push_back(slot);
      key.insert(key.end(), args.begin(), args.end());
      auto it = index_.find(key);
      if (it != index_.end()) return it->second;
    }
  }
  Node n{NodeKind::gate, slot, g_.arg_pool_.size(), args.size(), depth};
  g_.arg_pool_.insert(g_.arg_pool_.end(), args.begin(), args.end());
  g_.nodes_.push_back(n);
  const std::size_t id = g_.nodes_.size() - 1;
  if (!key.empty()) index_.emplace(std::move(key), id);
  return id;
}

std::size_t NetworkGraph::Builder::KeyHash::operator()(
    const std::vector<std::size_t>& key) const noexcept {
  std::size_t h = key.size();
  for (std::size_t v : key) h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

void NetworkGraph::Builder::add_output(std::size_t node) {
  if (node >= g_.nodes_.size()) throw Error(ErrorCode::out_of_range, "output node out of range");
  g_.outputs_.push_back(node);
}

NetworkGraph NetworkGraph::Builder::build() && {
  g_.id_ = next_graph_id();
  return std::move(g_);
}

// --- compile ----------------------------------------------------------------

namespace {

class Compiler {
 public:
  Compiler(const ParametricModel& model, std::size_t context_size)
      : n_(context_size), builder_(context_size, specs_of(model)) {
    for (const GateKernel& k : model.kernels) names_.push_back(&k.connective);
  }

  std::size_t lower(const Term& t) {
    if (t.is_variable()) {
      if (t.var_index() >= n_) {
        throw Error(ErrorCode::out_of_range, "variable x" + std::to_string(t.var_index()) +
                                                 " outside context of size " +
                                                 std::to_string(n_));
      }
      return t.var_index();
    }
    // Subterms shared by identity lower once; structurally equal copies
    // still meet in the builder's gate sharing.
    auto hit = memo_.find(t.identity());
    if (hit != memo_.end()) return hit->second;
    std::size_t slot = names_.size();
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (*names_[i] == t.connective()) {
        slot = i;
        break;
      }
    }
    if (slot == names_.size()) {
      throw Error(ErrorCode::undeclared_connective,
                  "model has no kernel for connective '" + t.connective() + "'");
    }
    std::size_t local[8];
    std::vector<std::size_t> spill;
    std::span<std::size_t> ids;
    if (t.args().size() <= 8) {
      ids = std::span<std::size_t>(local, t.args().size());
    } else {
      spill.resize(t.args().size());
      ids = spill;
    }
    for (std::size_t i = 0; i < t.args().size(); ++i) ids[i] = lower(t.args()[i]);
    const std::size_t id = builder_.add_gate(slot, ids);
    memo_.emplace(t.identity(), id);
    return id;
  }

  NetworkGraph::Builder& builder() { return builder_; }

 private:
  static std::vector<SlotSpec> specs_of(const ParametricModel& model) {
    std::vector<SlotSpec> specs;
    specs.reserve(model.kernels.size());
    for (const GateKernel& k : model.kernels) specs.push_back({k.connective, k.arity});
    return specs;
  }

  std::size_t n_;
  NetworkGraph::Builder builder_;
  std::vector<const std::string*> names_;
  std::unordered_map<const void*, std::size_t> memo_;
};

}  // namespace

NetworkGraph compile(const ParametricModel& model, const Term& expr, std::size_t context_size) {
  return compile(model, std::span<const Term>(&expr, 1), context_size);
}

NetworkGraph compile(const ParametricModel& model, std::span<const Term> exprs,
                     std::size_t context_size) {
  Compiler c(model, context_size);
  std::vector<std::size_t> outs;
  outs.reserve(exprs.size());
  for (const Term& e : exprs) outs.push_back(c.lower(e));
  for (std::size_t o : outs) c.builder().add_output(o);
  return std::move(c.builder()).build();
}

// --- forward / backward -----------------------------------------------------

struct TapeAccess {
  static Tape make(std::vector<double> values, const ParameterStore& params, double beta,
                   std::uint64_t graph) {
    Tape t;
    t.values_ = std::move(values);
    t.params_ = params.values;
    t.beta_ = beta;
    t.graph_id_ = graph;
    return t;
  }
  static const std::vector<double>& params(const Tape& t) { return t.params_; }
  static std::uint64_t graph(const Tape& t) { return t.graph_id_; }
};

namespace {

void require_compatible(const NetworkGraph& g, const ParameterStore& params) {
  if (!g.compatible_with(params)) {
    throw Error(ErrorCode::layout_mismatch, "parameter store layout does not match the graph");
  }
}

}  // namespace

std::vector<double> node_values(const NetworkGraph& g, const ParameterStore& params,
                                std::span<const double> input, Temperature beta) {
  require_compatible(g, params);
  if (input.size() != g.input_count()) {
    throw Error(ErrorCode::arity_mismatch, "network expects " + std::to_string(g.input_count()) +
                                               " input(s), got " + std::to_string(input.size()));
  }
  std::vector<double> values(g.node_count());
  double scratch[8];
  std::vector<double> spill;
  for (std::size_t id = 0; id < g.node_count(); ++id) {
    const NetworkGraph::Node& n = g.nodes()[id];
    if (n.kind == NetworkGraph::NodeKind::input) {
      if (!std::isfinite(input[n.index])) {
        throw Error(ErrorCode::non_finite, "non-finite network input");
      }
      values[id] = input[n.index];
      continue;
    }
    const std::span<const std::size_t> args = g.args(id);
    std::span<double> in;
    if (args.size() <= 8) {
      in = std::span<double>(scratch, args.size());
    } else {
      spill.resize(args.size());
      in = spill;
    }
    for (std::size_t i = 0; i < args.size(); ++i) in[i] = values[args[i]];
    values[id] = gate_eval(params.slot_params(n.index), in, beta);
  }
  return values;
}

std::vector<double> evaluate(const NetworkGraph& g, const ParameterStore& params,
                             std::span<const double> input, Temperature beta) {
  const std::vector<double> values = node_values(g, params, input, beta);
  std::vector<double> out;
  out.reserve(g.outputs().size());
  for (std::size_t o : g.outputs()) out.push_back(values[o]);
  return out;
}

ForwardResult forward(const NetworkGraph& g, const ParameterStore& params,
                      std::span<const double> input, Temperature beta) {
  std::vector<double> values = node_values(g, params, input, beta);
  std::vector<double> out;
  out.reserve(g.outputs().size());
  for (std::size_t o : g.outputs()) out.push_back(values[o]);
  return {std::move(out), TapeAccess::make(std::move(values), params, beta.value(), g.id())};
}

Gradients backward(const NetworkGraph& g, const ParameterStore& params, Tape tape,
                   std::span<const double> upstream) {
  require_compatible(g, params);
  if (TapeAccess::graph(tape) != g.id() || tape.values().size() != g.node_count() ||
      TapeAccess::params(tape) != params.values) {
    throw Error(ErrorCode::stale_tape, "tape was recorded for a different graph or parameters");
  }
  if (upstream.size() != g.outputs().size()) {
    throw Error(ErrorCode::arity_mismatch, "upstream gradient has wrong length");
  }
  const Temperature beta(tape.beta());
  const std::vector<double>& values = tape.values();
  std::vector<double> adjoint(g.node_count(), 0.0);
  for (std::size_t i = 0; i < upstream.size(); ++i) adjoint[g.outputs()[i]] += upstream[i];

  Gradients grads{std::vector<double>(params.size(), 0.0),
                  std::vector<double>(g.input_count(), 0.0)};
  std::vector<double> in;
  std::vector<double> d_in;
  std::vector<double> d_params;
  for (std::size_t id = g.node_count(); id-- > 0;) {
    const NetworkGraph::Node& n = g.nodes()[id];
    if (adjoint[id] == 0.0) continue;
    if (n.kind == NetworkGraph::NodeKind::input) {
      grads.inputs[n.index] += adjoint[id];
      continue;
    }
    const std::span<const std::size_t> args = g.args(id);
    in.resize(args.size());
    d_in.resize(args.size());
    d_params.resize(args.size() + 1);
    for (std::size_t i = 0; i < args.size(); ++i) in[i] = values[args[i]];
    gate_grad(params.slot_params(n.index), in, beta, d_params, d_in);
    const std::size_t offset = params.slots[n.index].offset;
    for (std::size_t i = 0; i < d_params.size(); ++i) {
      grads.params[offset + i] += adjoint[id] * d_params[i];
    }
    for (std::size_t i = 0; i < args.size(); ++i) adjoint[args[i]] += adjoint[id] * d_in[i];
  }
  return grads;
}

// --- composition ------------------------------------------------------------

namespace {

// Slot table for a pair of graphs and the offset applied to g2's slot ids.
std::pair<std::vector<SlotSpec>, std::size_t> merged_slots(const NetworkGraph& g1,
                                                           const NetworkGraph& g2) {
  if (g1.slots() == g2.slots()) return {g1.slots(), 0};
  std::vector<SlotSpec> slots = g1.slots();
  slots.insert(slots.end(), g2.slots().begin(), g2.slots().end());
  return {std::move(slots), g1.slots().size()};
}

void copy_gates(const NetworkGraph& src, std::span<const std::size_t> remap_inputs,
                std::size_t slot_offset, NetworkGraph::Builder& b,
                std::vector<std::size_t>& map) {
  map.assign(src.node_count(), 0);
  std::vector<std::size_t> args;
  for (std::size_t id = 0; id < src.node_count(); ++id) {
    const NetworkGraph::Node& n = src.nodes()[id];
    if (n.kind == NetworkGraph::NodeKind::input) {
      map[id] = remap_inputs[n.index];
      continue;
    }
    args.clear();
    for (std::size_t a : src.args(id)) args.push_back(map[a]);
    map[id] = b.add_gate(n.index + slot_offset, args);
  }
}

}  // namespace

NetworkGraph compose_sequential(const NetworkGraph& g1, const NetworkGraph& g2) {
  if (g1.outputs().size() != g2.input_count()) {
    throw Error(ErrorCode::arity_mismatch,
                "cannot feed " + std::to_string(g1.outputs().size()) + " output(s) into " +
                    std::to_string(g2.input_count()) + " input(s)");
  }
  auto [slots, offset] = merged_slots(g1, g2);
  NetworkGraph::Builder b(g1.input_count(), std::move(slots), false);
  std::vector<std::size_t> identity(g1.input_count());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  std::vector<std::size_t> map1;
  std::vector<std::size_t> map2;
  copy_gates(g1, identity, 0, b, map1);
  std::vector<std::size_t> feed;
  for (std::size_t o : g1.outputs()) feed.push_back(map1[o]);
  copy_gates(g2, feed, offset, b, map2);
  for (std::size_t o : g2.outputs()) b.add_output(map2[o]);
  return std::move(b).build();
}

NetworkGraph compose_parallel(const NetworkGraph& g1, const NetworkGraph& g2) {
  auto [slots, offset] = merged_slots(g1, g2);
  const std::size_t n1 = g1.input_count();
  NetworkGraph::Builder b(n1 + g2.input_count(), std::move(slots), false);
  std::vector<std::size_t> in1(n1);
  std::vector<std::size_t> in2(g2.input_count());
  for (std::size_t i = 0; i < in1.size(); ++i) in1[i] = i;
  for (std::size_t i = 0; i < in2.size(); ++i) in2[i] = n1 + i;
  std::vector<std::size_t> map1;
  std::vector<std::size_t> map2;
  copy_gates(g1, in1, 0, b, map1);
  copy_gates(g2, in2, offset, b, map2);
  for (std::size_t o : g1.outputs()) b.add_output(map1[o]);
  for (std::size_t o : g2.outputs()) b.add_output(map2[o]);
  return std::move(b).build();
}

ParameterStore combine_parameters(const NetworkGraph& g1, const ParameterStore& p1,
                                  const NetworkGraph& g2, const ParameterStore& p2) {
  require_compatible(g1, p1);
  require_compatible(g2, p2);
  if (g1.slots() == g2.slots()) return p1;
  std::vector<SlotSpec> specs = g1.slots();
  specs.insert(specs.end(), g2.slots().begin(), g2.slots().end());
  ParameterStore out = ParameterStore::with_layout(specs);
  std::copy(p1.values.begin(), p1.values.end(), out.values.begin());
  std::copy(p2.values.begin(), p2.values.end(),
            out.values.begin() + static_cast<std::ptrdiff_t>(p1.values.size()));
  return out;
}

ParametricModel extract_model(const NetworkGraph& g, const ParameterStore& params,
                              Temperature beta, std::string theory) {
  require_compatible(g, params);
  ParametricModel model{std::move(theory), {}, beta};
  for (std::size_t s = 0; s < g.slots().size(); ++s) {
    const SlotSpec& spec = g.slots()[s];
    for (std::size_t t = 0; t < s; ++t) {
      if (g.slots()[t].connective == spec.connective) {
        throw Error(ErrorCode::unsupported, "connective '" + spec.connective +
                                                "' owns more than one parameter slot");
      }
    }
    const auto p = params.slot_params(s);
    model.kernels.push_back({spec.connective, spec.arity, {p.begin(), p.end()}});
  }
  return model;
}

std::pair<NetworkGraph, ParameterStore> unshare_gate(const NetworkGraph& g,
                                                     const ParameterStore& params,
                                                     std::size_t node) {
  require_compatible(g, params);
  if (node >= g.node_count() || g.nodes()[node].kind != NetworkGraph::NodeKind::gate) {
    throw Error(ErrorCode::invalid_argument, "node " + std::to_string(node) + " is not a gate");
  }
  std::vector<SlotSpec> specs = g.slots();
  const std::size_t original = g.nodes()[node].index;
  specs.push_back(specs[original]);
  const std::size_t copy = specs.size() - 1;

  NetworkGraph::Builder b(g.input_count(), specs, false);
  std::vector<std::size_t> map(g.node_count());
  std::vector<std::size_t> args;
  for (std::size_t id = 0; id < g.node_count(); ++id) {
    const NetworkGraph::Node& n = g.nodes()[id];
    if (n.kind == NetworkGraph::NodeKind::input) {
      map[id] = n.index;
      continue;
    }
    args.clear();
    for (std::size_t a : g.args(id)) args.push_back(map[a]);
    map[id] = b.add_gate(id == node ? copy : n.index, args);
  }
  for (std::size_t o : g.outputs()) b.add_output(map[o]);

  ParameterStore out = ParameterStore::with_layout(specs);
  std::copy(params.values.begin(), params.values.end(), out.values.begin());
  const auto src = params.slot_params(original);
  std::copy(src.begin(), src.end(), out.slot_params(copy).begin());
  return {std::move(b).build(), std::move(out)};
}

}  // namespace logikon
