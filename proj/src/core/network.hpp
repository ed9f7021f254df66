#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core/relaxation.hpp"
#include "core/term.hpp"
#include "core/theory.hpp"

namespace logikon {

struct SlotSpec {
  std::string connective;
  std::size_t arity = 0;
  friend bool operator==(const SlotSpec&, const SlotSpec&) = default;
};

struct SlotLayout {
  std::string connective;
  std::size_t arity = 0;
  std::size_t offset = 0;  // weights at [offset, offset + arity), bias at offset + arity
};

// Flat parameter vector W with one slot per connective.
struct ParameterStore {
  std::vector<double> values;
  std::vector<SlotLayout> slots;

  static ParameterStore with_layout(std::span<const SlotSpec> specs);

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> slot_params(std::size_t slot) const;
  std::span<double> slot_params(std::size_t slot);
  std::optional<std::size_t> find_slot(std::string_view connective) const;
  std::vector<SlotSpec> specs() const;
};

struct ParametricModel {
  std::string theory;
  std::vector<GateKernel> kernels;
  Temperature beta{1.0};
};

struct InitSpec {
  enum class Kind { canonical, random };
  Kind kind = Kind::canonical;
  std::uint64_t seed = 0;
  double scale = 1.0;

  static InitSpec canonical() { return {}; }
  static InitSpec random(std::uint64_t seed, double scale) {
    return {Kind::random, seed, scale};
  }
};

// One kernel and one parameter slot per connective, in declaration order.
// Random init draws every parameter uniformly from [-scale, scale].
std::pair<ParametricModel, ParameterStore> assign_model(const Theory& theory, Temperature beta,
                                                        const InitSpec& init);

ParameterStore store_from_model(const ParametricModel& model);

// DAG of relaxed gates in topological order; inputs come first. Gates refer
// to parameter slots, so every use of a connective shares one slot.
class NetworkGraph {
 public:
  enum class NodeKind { input, gate };

  struct Node {
    NodeKind kind = NodeKind::input;
    std::size_t index = 0;  // input position or slot
    std::size_t arg_begin = 0;
    std::size_t arg_count = 0;
    std::size_t depth = 0;
  };

  class Builder;

  std::size_t input_count() const noexcept { return inputs_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t gate_count() const noexcept { return nodes_.size() - inputs_; }
  // Longest chain of gates from an input to an output.
  std::size_t depth() const noexcept;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::span<const std::size_t> args(std::size_t node) const;
  const std::vector<std::size_t>& outputs() const noexcept { return outputs_; }
  const std::vector<SlotSpec>& slots() const noexcept { return slots_; }
  // Identifies this graph instance for tape checks; copies share it.
  std::uint64_t id() const noexcept { return id_; }

  bool compatible_with(const ParameterStore& params) const;

 private:
  std::size_t inputs_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::size_t> arg_pool_;
  std::vector<std::size_t> outputs_;
  std::vector<SlotSpec> slots_;
  std::uint64_t id_ = 0;
};

class NetworkGraph::Builder {
 public:
  Builder(std::size_t inputs, std::vector<SlotSpec> slots, bool share_subterms = true);

  // Returns the node id; identical (slot, args) gates collapse into one node
  // when sharing is enabled.
  std::size_t add_gate(std::size_t slot, std::span<const std::size_t> args);
  void add_output(std::size_t node);
  NetworkGraph build() &&;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::size_t>& key) const noexcept;
  };

  NetworkGraph g_;
  bool share_;
  // Gate lookup for sharing; small graphs are scanned linearly instead.
  std::unordered_map<std::vector<std::size_t>, std::size_t, KeyHash> index_;
};

NetworkGraph compile(const ParametricModel& model, const Term& expr, std::size_t context_size);
// One output per expression; subterms common to several expressions share nodes.
NetworkGraph compile(const ParametricModel& model, std::span<const Term> exprs,
                     std::size_t context_size);

// Recorded node values of one forward evaluation. Move-only: a reverse pass
// consumes it.
class Tape {
 public:
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;

  const std::vector<double>& values() const noexcept { return values_; }
  double beta() const noexcept { return beta_; }

 private:
  friend struct TapeAccess;
  Tape() = default;
  std::vector<double> values_;
  std::vector<double> params_;
  double beta_ = 0.0;
  std::uint64_t graph_id_ = 0;
};

struct ForwardResult {
  std::vector<double> outputs;
  Tape tape;
};

// All node values, in node order.
std::vector<double> node_values(const NetworkGraph& g, const ParameterStore& params,
                                std::span<const double> input, Temperature beta);
std::vector<double> evaluate(const NetworkGraph& g, const ParameterStore& params,
                             std::span<const double> input, Temperature beta);
ForwardResult forward(const NetworkGraph& g, const ParameterStore& params,
                      std::span<const double> input, Temperature beta);

struct Gradients {
  std::vector<double> params;
  std::vector<double> inputs;
};

// Reverse accumulation of upstream . d outputs. Shared slots sum the
// contributions of all their gates.
Gradients backward(const NetworkGraph& g, const ParameterStore& params, Tape tape,
                   std::span<const double> upstream);

// g2 after g1. When the two graphs use different slot tables the result
// carries both tables back to back; combine_parameters builds the matching W.
NetworkGraph compose_sequential(const NetworkGraph& g1, const NetworkGraph& g2);
NetworkGraph compose_parallel(const NetworkGraph& g1, const NetworkGraph& g2);
ParameterStore combine_parameters(const NetworkGraph& g1, const ParameterStore& p1,
                                  const NetworkGraph& g2, const ParameterStore& p2);

// Reads the per-connective kernels back out of a compiled network.
ParametricModel extract_model(const NetworkGraph& g, const ParameterStore& params,
                              Temperature beta, std::string theory = {});

// Gives one gate a private copy of its slot, breaking weight sharing.
std::pair<NetworkGraph, ParameterStore> unshare_gate(const NetworkGraph& g,
                                                     const ParameterStore& params,
                                                     std::size_t node);

}  // namespace logikon
