#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/network.hpp"
#include "core/theory.hpp"

namespace logikon {

inline constexpr std::string_view kNetworkFormat = "logikon-net/1";

// A compiled network with its parameters and enough provenance to rebuild
// or retrain it.
struct NetworkBundle {
  Theory theory;
  double beta = 1.0;
  std::vector<std::string> variables;
  std::vector<Term> expressions;  // one per output
  std::optional<std::string> axiom;
  NetworkGraph graph;
  ParameterStore params;
};

// Compiles a single expression (or an axiom's two sides) with canonical
// parameters.
NetworkBundle bundle_expression(const Theory& theory, const Term& expr,
                                std::vector<std::string> variables, double beta);
NetworkBundle bundle_axiom(const Theory& theory, const Axiom& axiom, double beta);

std::string to_json(const NetworkBundle& bundle);
NetworkBundle bundle_from_json(std::string_view text);

}  // namespace logikon
