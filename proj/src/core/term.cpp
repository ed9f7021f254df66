#include "core/term.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace logikon {

struct Term::Node {
  bool variable = false;
  std::size_t index = 0;
  std::string connective;
  std::vector<Term> args;
  std::size_t depth = 0;
  std::size_t nodes = 1;
  std::size_t context = 0;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Term Term::variable(std::size_t index) {
  auto node = std::make_shared<Node>();
  node->variable = true;
  node->index = index;
  node->context = index + 1;
  node->hash = mix(0x51ed27, index);
  return Term(std::move(node));
}

Term Term::apply(std::string connective, std::vector<Term> args) {
  auto node = std::make_shared<Node>();
  std::size_t h = std::hash<std::string>{}(connective);
  std::size_t depth = 0;
  for (const Term& a : args) {
    depth = std::max(depth, a.depth() + 1);
    node->nodes += a.node_count();
    node->context = std::max(node->context, a.context_bound());
    h = mix(h, a.hash());
  }
  node->depth = depth;
  node->hash = mix(h, args.size());
  node->connective = std::move(connective);
  node->args = std::move(args);
  return Term(std::move(node));
}

bool Term::is_variable() const noexcept { return node_->variable; }

std::size_t Term::var_index() const {
  if (!node_->variable) {
    throw Error(ErrorCode::invalid_argument, "term is not a variable");
  }
  return node_->index;
}

const std::string& Term::connective() const {
  if (node_->variable) {
    throw Error(ErrorCode::invalid_argument, "variable has no connective");
  }
  return node_->connective;
}

const std::vector<Term>& Term::args() const { return node_->args; }
std::size_t Term::depth() const noexcept { return node_->depth; }
std::size_t Term::node_count() const noexcept { return node_->nodes; }
std::size_t Term::context_bound() const noexcept { return node_->context; }
std::size_t Term::hash() const noexcept { return node_->hash; }

bool operator==(const Term& a, const Term& b) noexcept {
  if (a.node_ == b.node_) return true;
  const Term::Node& x = *a.node_;
  const Term::Node& y = *b.node_;
  if (x.hash != y.hash || x.variable != y.variable) return false;
  if (x.variable) return x.index == y.index;
  return x.connective == y.connective && x.args == y.args;
}

Term substitute(const Term& t, std::span<const Term> replacement) {
  if (t.is_variable()) {
    const std::size_t i = t.var_index();
    if (i >= replacement.size()) {
      throw Error(ErrorCode::out_of_range,
                  "substitution has no entry for variable " + std::to_string(i));
    }
    return replacement[i];
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(substitute(a, replacement));
  return Term::apply(t.connective(), std::move(args));
}

Term shift_variables(const Term& t, std::size_t offset) {
  if (offset == 0) return t;
  if (t.is_variable()) return Term::variable(t.var_index() + offset);
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(shift_variables(a, offset));
  return Term::apply(t.connective(), std::move(args));
}

bool term_less(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return false;
  if (a.depth() != b.depth()) return a.depth() < b.depth();
  if (a.is_variable() != b.is_variable()) return a.is_variable();
  if (a.is_variable()) return a.var_index() < b.var_index();
  if (a.connective() != b.connective()) return a.connective() < b.connective();
  return std::lexicographical_compare(a.args().begin(), a.args().end(),
                                      b.args().begin(), b.args().end(),
                                      term_less);
}

std::string default_variable_name(std::size_t index) {
  return "x" + std::to_string(index);
}

namespace {

void print(const Term& t, std::span<const std::string> names, std::string& out) {
  if (t.is_variable()) {
    const std::size_t i = t.var_index();
    out += i < names.size() ? names[i] : default_variable_name(i);
    return;
  }
  out += t.connective();
  if (t.args().empty()) return;
  out += '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i > 0) out += ", ";
    print(t.args()[i], names, out);
  }
  out += ')';
}

}  // namespace

std::string to_string(const Term& t, std::span<const std::string> names) {
  std::string out;
  print(t, names, out);
  return out;
}

}  // namespace logikon
