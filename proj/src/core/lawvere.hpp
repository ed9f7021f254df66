#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "core/term.hpp"
#include "core/theory.hpp"

namespace logikon {

// Morphism n -> m of the free finite-product category on a signature: m
// terms over the context {x0 .. x(n-1)}.
struct TupleMorphism {
  std::size_t source_arity = 0;
  std::vector<Term> components;

  std::size_t target_arity() const noexcept { return components.size(); }
  friend bool operator==(const TupleMorphism&, const TupleMorphism&) = default;
};

TupleMorphism identity_morphism(std::size_t n);
TupleMorphism projection(std::size_t i, std::size_t n);
// 1 -> n, copying its input n times.
TupleMorphism diagonal(std::size_t n);
// n -> n with component i = x(sigma[i]). `sigma` must be a permutation.
TupleMorphism permutation(std::span<const std::size_t> sigma);
// The generating morphism c: k -> 1, c(x0, .., x(k-1)).
TupleMorphism generator(const Connective& c);

// Pairing <f1, .., fm> of morphisms sharing a source arity.
TupleMorphism pairing(std::span<const TupleMorphism> parts);
// f x g : n1 + n2 -> m1 + m2.
TupleMorphism product(const TupleMorphism& f, const TupleMorphism& g);

// g after f: component j of the result is g_j with x_i replaced by f_i.
TupleMorphism compose(const TupleMorphism& f, const TupleMorphism& g);

// Canonical interpretation of a term as a morphism n -> 1, built
// recursively as c o <[E1], .., [Ek]> with projections at the leaves.
TupleMorphism interpret(const Term& term, std::size_t context_size);

struct EqualityMode {
  enum class Kind { boolean_semantics, rewrite };
  Kind kind = Kind::boolean_semantics;
  std::size_t depth = 3;           // rewrite steps explored from each side
  std::size_t closure_cap = 20000; // terms kept per side

  static EqualityMode semantic() { return {}; }
  static EqualityMode rewriting(std::size_t depth) {
    return {Kind::rewrite, depth, 20000};
  }
};

struct EqualityVerdict {
  enum class Kind { equal, distinct, unknown };
  Kind kind = Kind::unknown;
  std::vector<bool> countermodel;  // set for distinct
  std::size_t depth_bound = 0;     // set for unknown
};

// Semantic mode evaluates both sides on all 2^n assignments (n <= 20) and
// reports the first differing one; rewrite mode searches bidirectional axiom
// rewrites from both terms for a common form.
EqualityVerdict equal_modulo_axioms(const Term& a, const Term& b, const Theory& theory,
                                    EqualityMode mode,
                                    std::optional<std::size_t> context_size = std::nullopt);

// One oriented rewrite rule derived from an axiom side.
struct RewriteRule {
  Term pattern;
  Term replacement;
  std::size_t variables = 0;
};

// lhs -> rhs and rhs -> lhs for every axiom whose target side introduces no
// fresh variables.
std::vector<RewriteRule> rewrite_rules(const Theory& theory);

// All terms reachable from `t` in at most `depth` single rewrites.
std::unordered_set<Term, TermHash> rewrite_closure(const Term& t,
                                                   std::span<const RewriteRule> rules,
                                                   std::size_t depth, std::size_t cap);

struct EnumerationOptions {
  std::optional<EqualityMode> mode;  // default: semantic when available
  std::size_t term_cap = 10000;
};

struct TermClass {
  Term representative;
  std::vector<Term> members;
  std::optional<std::uint64_t> truth_table;
};

// Every term over context n up to `max_depth`, in level order. Throws
// budget_exceeded past `cap` terms.
std::vector<Term> all_terms(const Theory& theory, std::size_t n, std::size_t max_depth,
                            std::size_t cap);

// Streams the same family as all_terms without materialising the top level.
void for_each_term(const Theory& theory, std::size_t n, std::size_t max_depth,
                   const std::function<void(const Term&)>& visit);

std::vector<TermClass> enumerate_terms(const Theory& theory, std::size_t n,
                                       std::size_t max_depth,
                                       const EnumerationOptions& options = {});

}  // namespace logikon
