#include "core/constraints.hpp"

#include <cmath>
#include <random>

#include "core/error.hpp"

namespace logikon {

std::size_t ConstraintSet::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const SlotSpec& s : layout) n += s.arity + 1;
  return n;
}

namespace {

// For c(x_a, x_b, ..) = c(x_p, x_q, ..) with distinct variables on each side
// forming the same set, returns rhs position of each lhs argument.
std::optional<std::vector<std::size_t>> argument_permutation(const Term& lhs, const Term& rhs) {
  if (lhs.is_variable() || rhs.is_variable() || lhs.connective() != rhs.connective() ||
      lhs.args().size() != rhs.args().size() || lhs.args().size() < 2) {
    return std::nullopt;
  }
  const auto& a = lhs.args();
  const auto& b = rhs.args();
  std::vector<std::size_t> perm(a.size());
  std::vector<bool> used(b.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_variable()) return std::nullopt;
    for (std::size_t k = 0; k < i; ++k) {
      if (a[k] == a[i]) return std::nullopt;
    }
    std::size_t found = b.size();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!b[j].is_variable()) return std::nullopt;
      if (b[j] == a[i]) found = j;
    }
    if (found == b.size() || used[found]) return std::nullopt;
    used[found] = true;
    perm[i] = found;
  }
  bool moved = false;
  for (std::size_t i = 0; i < perm.size(); ++i) moved = moved || perm[i] != i;
  if (!moved) return std::nullopt;
  return perm;
}

void require_layout(const ConstraintSet& gset, const ParameterStore& params) {
  bool ok = params.slots.size() == gset.layout.size();
  for (std::size_t i = 0; ok && i < gset.layout.size(); ++i) {
    ok = params.slots[i].connective == gset.layout[i].connective &&
         params.slots[i].arity == gset.layout[i].arity;
  }
  if (!ok) throw Error(ErrorCode::layout_mismatch, "parameters do not match constraint layout");
}

std::vector<double> vertex_input(std::uint64_t mask, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = ((mask >> i) & 1U) != 0 ? 1.0 : 0.0;
  return x;
}

}  // namespace

ConstraintSet extract_constraints(const Theory& theory, const ParametricModel& model) {
  ConstraintSet gset;
  for (const GateKernel& k : model.kernels) gset.layout.push_back({k.connective, k.arity});
  for (std::size_t ai = 0; ai < theory.axioms.size(); ++ai) {
    const Axiom& ax = theory.axioms[ai];
    if (ax.context_size > 20) {
      throw Error(ErrorCode::budget_exceeded, "axiom '" + ax.name + "' has too many variables");
    }
    if (auto perm = argument_permutation(ax.lhs, ax.rhs)) {
      std::size_t slot = gset.layout.size();
      for (std::size_t s = 0; s < gset.layout.size(); ++s) {
        if (gset.layout[s].connective == ax.lhs.connective()) slot = s;
      }
      if (slot == gset.layout.size()) {
        throw Error(ErrorCode::undeclared_connective,
                    "model has no kernel for '" + ax.lhs.connective() + "'");
      }
      // One equality per non-trivial link of each cycle of the permutation.
      std::vector<bool> visited(perm->size(), false);
      for (std::size_t start = 0; start < perm->size(); ++start) {
        if (visited[start]) continue;
        std::size_t i = start;
        visited[i] = true;
        while (!visited[(*perm)[i]]) {
          const std::size_t j = (*perm)[i];
          visited[j] = true;
          Residual r;
          r.kind = Residual::Kind::symmetry;
          r.axiom = ai;
          r.axiom_name = ax.name;
          r.slot = slot;
          r.first = std::min(i, j);
          r.second = std::max(i, j);
          gset.residuals.push_back(r);
          i = j;
        }
      }
    }
    const Term sides[] = {ax.lhs, ax.rhs};
    gset.axioms.push_back({ax.name, ax.context_size, compile(model, sides, ax.context_size)});
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << ax.context_size); ++v) {
      Residual r;
      r.kind = Residual::Kind::vertex;
      r.axiom = ai;
      r.axiom_name = ax.name;
      r.assignment = v;
      gset.residuals.push_back(r);
    }
  }
  return gset;
}

std::vector<double> evaluate_constraints(const ConstraintSet& gset, const ParameterStore& params,
                                         Temperature beta) {
  require_layout(gset, params);
  std::vector<double> g;
  g.reserve(gset.size());
  for (const Residual& r : gset.residuals) {
    if (r.kind == Residual::Kind::symmetry) {
      const auto p = params.slot_params(r.slot);
      g.push_back(p[r.first] - p[r.second]);
      continue;
    }
    const AxiomArms& arms = gset.axioms[r.axiom];
    const auto out =
        evaluate(arms.graph, params, vertex_input(r.assignment, arms.context_size), beta);
    g.push_back(out[0] - out[1]);
  }
  return g;
}

double constraint_norm(const ConstraintSet& gset, const ParameterStore& params, Temperature beta) {
  double sum = 0.0;
  for (double v : evaluate_constraints(gset, params, beta)) sum += v * v;
  return std::sqrt(sum);
}

ConstraintJacobian constraint_jacobian(const ConstraintSet& gset, const ParameterStore& params,
                                       Temperature beta) {
  require_layout(gset, params);
  ConstraintJacobian j{gset.size(), params.size(),
                       std::vector<double>(gset.size() * params.size(), 0.0)};
  const double upstream[2] = {1.0, -1.0};
  for (std::size_t row = 0; row < gset.size(); ++row) {
    const Residual& r = gset.residuals[row];
    double* out = j.entries.data() + row * j.cols;
    if (r.kind == Residual::Kind::symmetry) {
      const std::size_t offset = params.slots[r.slot].offset;
      out[offset + r.first] = 1.0;
      out[offset + r.second] = -1.0;
      continue;
    }
    const AxiomArms& arms = gset.axioms[r.axiom];
    ForwardResult fwd =
        forward(arms.graph, params, vertex_input(r.assignment, arms.context_size), beta);
    const Gradients grads = backward(arms.graph, params, std::move(fwd.tape), upstream);
    std::copy(grads.params.begin(), grads.params.end(), out);
  }
  return j;
}

std::vector<InteriorAudit> audit_interior(const ConstraintSet& gset, const ParameterStore& params,
                                          Temperature beta, std::size_t samples,
                                          std::uint64_t seed) {
  require_layout(gset, params);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<InteriorAudit> out;
  for (const AxiomArms& arms : gset.axioms) {
    InteriorAudit audit{arms.axiom, 0.0, {}};
    std::vector<double> x(arms.context_size);
    for (std::size_t s = 0; s < samples; ++s) {
      for (double& v : x) v = unit(rng);
      const auto o = evaluate(arms.graph, params, x, beta);
      const double dev = std::abs(o[0] - o[1]);
      if (dev > audit.max_deviation || audit.witness.empty()) {
        audit.max_deviation = dev;
        audit.witness = x;
      }
    }
    out.push_back(std::move(audit));
  }
  return out;
}

nlohmann::ordered_json constraint_report(const ConstraintSet& gset, const ParameterStore& params,
                                         Temperature beta) {
  const std::vector<double> g = evaluate_constraints(gset, params, beta);
  const ConstraintJacobian jac = constraint_jacobian(gset, params, beta);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  double sum = 0.0;
  for (std::size_t i = 0; i < gset.size(); ++i) {
    const Residual& r = gset.residuals[i];
    double norm = 0.0;
    for (double v : jac.row(i)) norm += v * v;
    nlohmann::ordered_json row;
    row["axiom"] = r.axiom_name;
    row["kind"] = r.kind == Residual::Kind::symmetry ? "symmetry" : "vertex";
    if (r.kind == Residual::Kind::symmetry) {
      row["connective"] = gset.layout[r.slot].connective;
      row["weights"] = {r.first, r.second};
    } else {
      std::vector<int> bits;
      for (std::size_t b = 0; b < gset.axioms[r.axiom].context_size; ++b) {
        bits.push_back(static_cast<int>((r.assignment >> b) & 1U));
      }
      row["assignment"] = bits;
    }
    row["value"] = g[i];
    row["gradient_norm"] = std::sqrt(norm);
    rows.push_back(std::move(row));
    sum += g[i] * g[i];
  }
  nlohmann::ordered_json report;
  report["beta"] = beta.value();
  report["residual_count"] = gset.size();
  report["norm"] = std::sqrt(sum);
  report["residuals"] = std::move(rows);
  return report;
}

}  // namespace logikon
