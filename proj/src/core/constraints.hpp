#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/network.hpp"
#include "core/theory.hpp"

namespace logikon {

struct Residual {
  enum class Kind { symmetry, vertex };
  Kind kind = Kind::vertex;
  std::size_t axiom = 0;
  std::string axiom_name;
  // symmetry: params[slot][first] - params[slot][second]
  std::size_t slot = 0;
  std::size_t first = 0;
  std::size_t second = 0;
  // vertex: boolean input, variable i = bit i
  std::uint64_t assignment = 0;
};

// Both sides of one axiom compiled into a single graph with outputs
// (lhs, rhs); the sides share the model's slots.
struct AxiomArms {
  std::string axiom;
  std::size_t context_size = 0;
  NetworkGraph graph;
};

// Residual system G(W) = 0 whose zero set is the logical constraint
// manifold. Residuals are ordered by axiom, symmetry rows before vertex rows,
// vertices by ascending assignment.
struct ConstraintSet {
  std::vector<Residual> residuals;
  std::vector<AxiomArms> axioms;
  std::vector<SlotSpec> layout;

  std::size_t size() const noexcept { return residuals.size(); }
  std::size_t parameter_count() const noexcept;
};

ConstraintSet extract_constraints(const Theory& theory, const ParametricModel& model);

std::vector<double> evaluate_constraints(const ConstraintSet& gset, const ParameterStore& params,
                                         Temperature beta);
double constraint_norm(const ConstraintSet& gset, const ParameterStore& params, Temperature beta);

// Dense row-major Jacobian, one row per residual.
struct ConstraintJacobian {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;

  double at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {entries.data() + r * cols, cols}; }
};

ConstraintJacobian constraint_jacobian(const ConstraintSet& gset, const ParameterStore& params,
                                       Temperature beta);

// Largest |lhs - rhs| per axiom over uniformly sampled interior inputs. The
// manifold only pins vertices; this measures what that leaves open.
struct InteriorAudit {
  std::string axiom;
  double max_deviation = 0.0;
  std::vector<double> witness;
};

std::vector<InteriorAudit> audit_interior(const ConstraintSet& gset, const ParameterStore& params,
                                          Temperature beta, std::size_t samples,
                                          std::uint64_t seed);

nlohmann::ordered_json constraint_report(const ConstraintSet& gset, const ParameterStore& params,
                                         Temperature beta);

}  // namespace logikon
