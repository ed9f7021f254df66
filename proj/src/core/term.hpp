#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace logikon {

// Immutable syntax tree over a signature. Variables are positional indices
// into the enclosing context. Copies share structure, so building large
// families of terms from common subterms is cheap.
class Term {
 public:
  static Term variable(std::size_t index);
  static Term apply(std::string connective, std::vector<Term> args);

  bool is_variable() const noexcept;
  std::size_t var_index() const;
  const std::string& connective() const;
  const std::vector<Term>& args() const;

  // Gate nesting depth. Variables and constants have depth 0.
  std::size_t depth() const noexcept;
  std::size_t node_count() const noexcept;
  // One past the largest variable index used (0 for closed terms).
  std::size_t context_bound() const noexcept;
  std::size_t hash() const noexcept;

  // Identity of the shared node; equal ids imply structural equality.
  const void* identity() const noexcept { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b) noexcept;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

// Replaces variable i by replacement[i].
Term substitute(const Term& t, std::span<const Term> replacement);
Term shift_variables(const Term& t, std::size_t offset);

// Representative order: depth first, variables before applications, then
// variable index or connective name, then arguments lexicographically.
bool term_less(const Term& a, const Term& b);

std::string default_variable_name(std::size_t index);
std::string to_string(const Term& t, std::span<const std::string> names = {});

}  // namespace logikon
