#include "core/lawvere.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "core/boolean.hpp"
#include "core/error.hpp"

namespace logikon {

TupleMorphism identity_morphism(std::size_t n) {
  TupleMorphism m{n, {}};
  m.components.reserve(n);
  for (std::size_t i = 0; i < n; ++i) m.components.push_back(Term::variable(i));
  return m;
}

TupleMorphism projection(std::size_t i, std::size_t n) {
  if (i >= n) {
    throw Error(ErrorCode::out_of_range, "projection index " + std::to_string(i) +
                                             " out of range for arity " + std::to_string(n));
  }
  return {n, {Term::variable(i)}};
}

TupleMorphism diagonal(std::size_t n) {
  return {1, std::vector<Term>(n, Term::variable(0))};
}

TupleMorphism permutation(std::span<const std::size_t> sigma) {
  std::vector<bool> seen(sigma.size(), false);
  TupleMorphism m{sigma.size(), {}};
  for (std::size_t s : sigma) {
    if (s >= sigma.size() || seen[s]) {
      throw Error(ErrorCode::out_of_range, "not a permutation");
    }
    seen[s] = true;
    m.components.push_back(Term::variable(s));
  }
  return m;
}

TupleMorphism generator(const Connective& c) {
  std::vector<Term> args;
  for (std::size_t i = 0; i < c.arity; ++i) args.push_back(Term::variable(i));
  return {c.arity, {Term::apply(c.name, std::move(args))}};
}

TupleMorphism pairing(std::span<const TupleMorphism> parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_argument, "empty pairing");
  TupleMorphism m{parts.front().source_arity, {}};
  for (const TupleMorphism& p : parts) {
    if (p.source_arity != m.source_arity) {
      throw Error(ErrorCode::arity_mismatch, "pairing of morphisms with different sources");
    }
    m.components.insert(m.components.end(), p.components.begin(), p.components.end());
  }
  return m;
}

TupleMorphism product(const TupleMorphism& f, const TupleMorphism& g) {
  TupleMorphism m{f.source_arity + g.source_arity, f.components};
  for (const Term& c : g.components) m.components.push_back(shift_variables(c, f.source_arity));
  return m;
}

TupleMorphism compose(const TupleMorphism& f, const TupleMorphism& g) {
  if (f.target_arity() != g.source_arity) {
    throw Error(ErrorCode::arity_mismatch,
                "cannot compose " + std::to_string(f.source_arity) + "->" +
                    std::to_string(f.target_arity()) + " with " +
                    std::to_string(g.source_arity) + "->" + std::to_string(g.target_arity()));
  }
  TupleMorphism m{f.source_arity, {}};
  m.components.reserve(g.components.size());
  for (const Term& c : g.components) m.components.push_back(substitute(c, f.components));
  return m;
}

TupleMorphism interpret(const Term& term, std::size_t context_size) {
  if (term.context_bound() > context_size) {
    throw Error(ErrorCode::out_of_range, "term uses variables outside its context");
  }
  if (term.is_variable()) return projection(term.var_index(), context_size);
  std::vector<TupleMorphism> parts;
  parts.reserve(term.args().size());
  for (const Term& a : term.args()) parts.push_back(interpret(a, context_size));
  const TupleMorphism op = generator({term.connective(), term.args().size()});
  if (parts.empty()) return {context_size, op.components};
  return compose(pairing(parts), op);
}

// --- equality ---------------------------------------------------------------

namespace {

bool match(const Term& pattern, const Term& t, std::vector<std::optional<Term>>& binding) {
  if (pattern.is_variable()) {
    std::optional<Term>& slot = binding[pattern.var_index()];
    if (slot) return *slot == t;
    slot = t;
    return true;
  }
  if (t.is_variable() || pattern.connective() != t.connective() ||
      pattern.args().size() != t.args().size()) {
    return false;
  }
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (!match(pattern.args()[i], t.args()[i], binding)) return false;
  }
  return true;
}

bool uses_only(const Term& t, const std::vector<bool>& allowed) {
  if (t.is_variable()) return allowed[t.var_index()];
  return std::all_of(t.args().begin(), t.args().end(),
                     [&](const Term& a) { return uses_only(a, allowed); });
}

void mark_vars(const Term& t, std::vector<bool>& used) {
  if (t.is_variable()) {
    used[t.var_index()] = true;
    return;
  }
  for (const Term& a : t.args()) mark_vars(a, used);
}

void rewrites_at(const Term& t, std::span<const RewriteRule> rules, std::vector<Term>& out) {
  for (const RewriteRule& r : rules) {
    std::vector<std::optional<Term>> binding(r.variables);
    if (!match(r.pattern, t, binding)) continue;
    std::vector<Term> subst;
    subst.reserve(r.variables);
    for (auto& b : binding) subst.push_back(b ? *b : Term::variable(0));
    out.push_back(substitute(r.replacement, subst));
  }
  if (t.is_variable()) return;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    std::vector<Term> inner;
    rewrites_at(t.args()[i], rules, inner);
    for (Term& replaced : inner) {
      std::vector<Term> args = t.args();
      args[i] = std::move(replaced);
      out.push_back(Term::apply(t.connective(), std::move(args)));
    }
  }
}

}  // namespace

std::vector<RewriteRule> rewrite_rules(const Theory& theory) {
  std::vector<RewriteRule> rules;
  for (const Axiom& a : theory.axioms) {
    std::vector<bool> lhs_vars(a.context_size, false);
    std::vector<bool> rhs_vars(a.context_size, false);
    mark_vars(a.lhs, lhs_vars);
    mark_vars(a.rhs, rhs_vars);
    if (uses_only(a.rhs, lhs_vars)) rules.push_back({a.lhs, a.rhs, a.context_size});
    if (uses_only(a.lhs, rhs_vars)) rules.push_back({a.rhs, a.lhs, a.context_size});
  }
  return rules;
}

std::unordered_set<Term, TermHash> rewrite_closure(const Term& t,
                                                   std::span<const RewriteRule> rules,
                                                   std::size_t depth, std::size_t cap) {
  // Bound on term growth keeps expanding rules (x -> and(x, x)) finite.
  const std::size_t size_limit = 2 * t.node_count() + 8;
  std::unordered_set<Term, TermHash> seen{t};
  std::vector<Term> frontier{t};
  for (std::size_t step = 0; step < depth && !frontier.empty(); ++step) {
    std::vector<Term> next;
    for (const Term& f : frontier) {
      std::vector<Term> produced;
      rewrites_at(f, rules, produced);
      for (Term& p : produced) {
        if (p.node_count() > size_limit || seen.size() >= cap) continue;
        if (seen.insert(p).second) next.push_back(std::move(p));
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

EqualityVerdict equal_modulo_axioms(const Term& a, const Term& b, const Theory& theory,
                                    EqualityMode mode, std::optional<std::size_t> context_size) {
  EqualityVerdict verdict;
  if (a == b) {
    verdict.kind = EqualityVerdict::Kind::equal;
    return verdict;
  }
  if (mode.kind == EqualityMode::Kind::boolean_semantics) {
    if (!has_boolean_interpretation(theory)) {
      throw Error(ErrorCode::unsupported,
                  "theory '" + theory.name + "' has no boolean interpretation");
    }
    const std::size_t n =
        context_size.value_or(std::max(a.context_bound(), b.context_bound()));
    if (n > 20) throw Error(ErrorCode::budget_exceeded, "more than 20 variables");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      if (evaluate_boolean(a, mask) != evaluate_boolean(b, mask)) {
        verdict.kind = EqualityVerdict::Kind::distinct;
        verdict.countermodel = assignment_from_mask(mask, n);
        return verdict;
      }
    }
    verdict.kind = EqualityVerdict::Kind::equal;
    return verdict;
  }
  const std::vector<RewriteRule> rules = rewrite_rules(theory);
  const auto left = rewrite_closure(a, rules, mode.depth, mode.closure_cap);
  const auto right = rewrite_closure(b, rules, mode.depth, mode.closure_cap);
  const auto& small = left.size() <= right.size() ? left : right;
  const auto& large = left.size() <= right.size() ? right : left;
  for (const Term& t : small) {
    if (large.count(t) != 0) {
      verdict.kind = EqualityVerdict::Kind::equal;
      return verdict;
    }
  }
  verdict.kind = EqualityVerdict::Kind::unknown;
  verdict.depth_bound = mode.depth;
  return verdict;
}

// --- enumeration ------------------------------------------------------------

namespace {

// Calls emit(args) for every tuple of `arity` entries drawn from `pool`
// where at least one entry has depth exactly `level`.
template <typename Emit>
void tuples_with_level(const std::vector<Term>& pool, std::size_t arity, std::size_t level,
                       Emit&& emit) {
  std::vector<std::size_t> idx(arity, 0);
  std::vector<Term> args(arity, pool.front());
  while (true) {
    bool fresh = false;
    for (std::size_t i = 0; i < arity; ++i) {
      args[i] = pool[idx[i]];
      fresh = fresh || pool[idx[i]].depth() == level;
    }
    if (fresh) emit(args);
    std::size_t k = arity;
    while (k > 0) {
      --k;
      if (++idx[k] < pool.size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (arity == 0) return;
  }
}

std::vector<Term> base_level(const Theory& theory, std::size_t n) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Term::variable(i));
  for (const Connective& c : theory.connectives) {
    if (c.arity == 0) out.push_back(Term::apply(c.name, {}));
  }
  return out;
}

}  // namespace

std::vector<Term> all_terms(const Theory& theory, std::size_t n, std::size_t max_depth,
                            std::size_t cap) {
  std::vector<Term> pool = base_level(theory, n);
  if (pool.size() > cap) throw Error(ErrorCode::budget_exceeded, "term cap exceeded");
  for (std::size_t level = 1; level <= max_depth && !pool.empty(); ++level) {
    std::vector<Term> added;
    for (const Connective& c : theory.connectives) {
      if (c.arity == 0) continue;
      tuples_with_level(pool, c.arity, level - 1, [&](const std::vector<Term>& args) {
        if (pool.size() + added.size() >= cap) {
          throw Error(ErrorCode::budget_exceeded,
                      "term enumeration exceeds cap of " + std::to_string(cap));
        }
        added.push_back(Term::apply(c.name, args));
      });
    }
    pool.insert(pool.end(), added.begin(), added.end());
  }
  return pool;
}

void for_each_term(const Theory& theory, std::size_t n, std::size_t max_depth,
                   const std::function<void(const Term&)>& visit) {
  if (max_depth == 0) {
    for (const Term& t : base_level(theory, n)) visit(t);
    return;
  }
  const std::vector<Term> lower =
      all_terms(theory, n, max_depth - 1, std::numeric_limits<std::size_t>::max());
  for (const Term& t : lower) visit(t);
  if (lower.empty()) return;
  for (const Connective& c : theory.connectives) {
    if (c.arity == 0) continue;
    tuples_with_level(lower, c.arity, max_depth - 1, [&](const std::vector<Term>& args) {
      visit(Term::apply(c.name, args));
    });
  }
}

std::vector<TermClass> enumerate_terms(const Theory& theory, std::size_t n,
                                       std::size_t max_depth, const EnumerationOptions& options) {
  const EqualityMode mode = options.mode.value_or(
      has_boolean_interpretation(theory) ? EqualityMode::semantic() : EqualityMode::rewriting(2));
  std::vector<Term> terms = all_terms(theory, n, max_depth, options.term_cap);

  std::vector<TermClass> classes;
  if (mode.kind == EqualityMode::Kind::boolean_semantics) {
    if (!has_boolean_interpretation(theory)) {
      throw Error(ErrorCode::unsupported,
                  "theory '" + theory.name + "' has no boolean interpretation");
    }
    std::map<std::uint64_t, std::size_t> by_table;
    for (const Term& t : terms) {
      const std::uint64_t table = truth_table(t, n);
      auto [it, inserted] = by_table.emplace(table, classes.size());
      if (inserted) classes.push_back({t, {}, table});
      classes[it->second].members.push_back(t);
    }
  } else {
    // Union terms whose bounded rewrite closures meet.
    const std::vector<RewriteRule> rules = rewrite_rules(theory);
    std::vector<std::size_t> parent(terms.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::unordered_map<Term, std::size_t, TermHash> owner;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (const Term& r : rewrite_closure(terms[i], rules, mode.depth, mode.closure_cap)) {
        auto [it, inserted] = owner.emplace(r, i);
        if (!inserted) {
          const std::size_t a = find(i);
          const std::size_t b = find(it->second);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
    std::map<std::size_t, std::size_t> by_root;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      auto [it, inserted] = by_root.emplace(find(i), classes.size());
      if (inserted) classes.push_back({terms[i], {}, std::nullopt});
      classes[it->second].members.push_back(terms[i]);
    }
  }
  for (TermClass& c : classes) {
    std::sort(c.members.begin(), c.members.end(), term_less);
    c.representative = c.members.front();
  }
  std::sort(classes.begin(), classes.end(), [](const TermClass& a, const TermClass& b) {
    return term_less(a.representative, b.representative);
  });
  return classes;
}

}  // namespace logikon
