#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/lawvere.hpp"

namespace logikon {

// Element of the free-algebra monad on a carrier X: an n-ary operation
// (a morphism n -> 1) together with n entries of X, standing for the term
// operation(x1, .., xn).
template <typename X>
struct MonadElement {
  TupleMorphism operation;
  std::vector<X> variables;

  friend bool operator==(const MonadElement&, const MonadElement&) = default;
};

template <typename X>
MonadElement<X> make_element(TupleMorphism operation, std::vector<X> variables) {
  if (operation.target_arity() != 1) {
    throw Error(ErrorCode::arity_mismatch, "monad operation must have target arity 1");
  }
  if (operation.source_arity != variables.size()) {
    throw Error(ErrorCode::arity_mismatch, "operation arity does not match variable tuple");
  }
  return {std::move(operation), std::move(variables)};
}

// eta(x) = (id_1, (x)).
template <typename X>
MonadElement<X> monad_unit(X x) {
  return {identity_morphism(1), {std::move(x)}};
}

// Functor action: substitute variables through f, keeping the operation.
template <typename X, typename F>
auto monad_map(const MonadElement<X>& e, F&& f) {
  using Y = std::invoke_result_t<F&, const X&>;
  MonadElement<Y> out{e.operation, {}};
  out.variables.reserve(e.variables.size());
  for (const X& x : e.variables) out.variables.push_back(f(x));
  return out;
}

// mu: flattens (alpha, (t1, .., tn)) with ti = (beta_i, xs_i) into
// (alpha o <beta_1', .., beta_n'>, xs_1 ++ .. ++ xs_n), where beta_i' is
// beta_i reindexed onto its block of the concatenated tuple.
template <typename X>
MonadElement<X> monad_mult(const MonadElement<MonadElement<X>>& nested) {
  if (nested.operation.source_arity != nested.variables.size()) {
    throw Error(ErrorCode::arity_mismatch, "nested element arity mismatch");
  }
  std::size_t total = 0;
  for (const MonadElement<X>& inner : nested.variables) {
    if (inner.operation.target_arity() != 1 ||
        inner.operation.source_arity != inner.variables.size()) {
      throw Error(ErrorCode::arity_mismatch, "inner element arity mismatch");
    }
    total += inner.variables.size();
  }
  TupleMorphism substitution{total, {}};
  std::vector<X> flat;
  flat.reserve(total);
  std::size_t offset = 0;
  for (const MonadElement<X>& inner : nested.variables) {
    substitution.components.push_back(shift_variables(inner.operation.components.front(), offset));
    flat.insert(flat.end(), inner.variables.begin(), inner.variables.end());
    offset += inner.variables.size();
  }
  return {compose(substitution, nested.operation), std::move(flat)};
}

// Reads an element over named carriers as a term string, e.g. and(not(p), q).
inline std::string to_string(const MonadElement<std::string>& e) {
  return to_string(e.operation.components.front(), e.variables);
}

}  // namespace logikon
