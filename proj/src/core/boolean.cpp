#include "core/boolean.hpp"

#include <vector>

#include "core/error.hpp"

namespace logikon {

std::optional<BooleanOp> boolean_interpretation(std::string_view name, std::size_t arity) {
  struct Entry {
    std::string_view name;
    std::size_t arity;
    BooleanOp op;
  };
  static constexpr Entry table[] = {
      {"and", 2, BooleanOp::and_},   {"or", 2, BooleanOp::or_},
      {"not", 1, BooleanOp::not_},   {"nand", 2, BooleanOp::nand},
      {"nor", 2, BooleanOp::nor},    {"xor", 2, BooleanOp::xor_},
      {"implies", 2, BooleanOp::implies}, {"iff", 2, BooleanOp::iff},
      {"true", 0, BooleanOp::true_}, {"false", 0, BooleanOp::false_},
  };
  for (const Entry& e : table) {
    if (e.name == name && e.arity == arity) return e.op;
  }
  return std::nullopt;
}

bool has_boolean_interpretation(const Theory& theory) {
  for (const Connective& c : theory.connectives) {
    if (!boolean_interpretation(c.name, c.arity)) return false;
  }
  return true;
}

bool apply_boolean(BooleanOp op, std::span<const bool> a) {
  switch (op) {
    case BooleanOp::and_: return a[0] && a[1];
    case BooleanOp::or_: return a[0] || a[1];
    case BooleanOp::not_: return !a[0];
    case BooleanOp::nand: return !(a[0] && a[1]);
    case BooleanOp::nor: return !(a[0] || a[1]);
    case BooleanOp::xor_: return a[0] != a[1];
    case BooleanOp::implies: return !a[0] || a[1];
    case BooleanOp::iff: return a[0] == a[1];
    case BooleanOp::true_: return true;
    case BooleanOp::false_: return false;
  }
  return false;
}

namespace {

BooleanOp op_of(const Term& t) {
  auto op = boolean_interpretation(t.connective(), t.args().size());
  if (!op) {
    throw Error(ErrorCode::unsupported,
                "connective '" + t.connective() + "' has no boolean interpretation");
  }
  return *op;
}

std::uint64_t table_rec(const Term& t, std::size_t n, std::uint64_t full) {
  if (t.is_variable()) {
    const std::size_t v = t.var_index();
    if (v >= n) throw Error(ErrorCode::out_of_range, "variable outside context");
    std::uint64_t bits = 0;
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
      if ((r >> v) & 1U) bits |= std::uint64_t{1} << r;
    }
    return bits;
  }
  const BooleanOp op = op_of(t);
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  if (!t.args().empty()) a = table_rec(t.args()[0], n, full);
  if (t.args().size() > 1) b = table_rec(t.args()[1], n, full);
  switch (op) {
    case BooleanOp::and_: return a & b;
    case BooleanOp::or_: return a | b;
    case BooleanOp::not_: return ~a & full;
    case BooleanOp::nand: return ~(a & b) & full;
    case BooleanOp::nor: return ~(a | b) & full;
    case BooleanOp::xor_: return a ^ b;
    case BooleanOp::implies: return (~a | b) & full;
    case BooleanOp::iff: return ~(a ^ b) & full;
    case BooleanOp::true_: return full;
    case BooleanOp::false_: return 0;
  }
  return 0;
}

}  // namespace

bool evaluate_boolean(const Term& t, std::uint64_t assignment) {
  if (t.is_variable()) {
    if (t.var_index() >= 64) throw Error(ErrorCode::out_of_range, "variable outside assignment");
    return ((assignment >> t.var_index()) & 1U) != 0;
  }
  const BooleanOp op = op_of(t);
  bool args[2] = {false, false};
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    args[i] = evaluate_boolean(t.args()[i], assignment);
  }
  return apply_boolean(op, std::span<const bool>(args, t.args().size()));
}

std::uint64_t truth_table(const Term& t, std::size_t context_size) {
  if (context_size > 6) {
    throw Error(ErrorCode::budget_exceeded, "packed truth tables support at most 6 variables");
  }
  const std::size_t rows = std::size_t{1} << context_size;
  const std::uint64_t full = rows == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << rows) - 1;
  return table_rec(t, context_size, full);
}

std::vector<bool> assignment_from_mask(std::uint64_t mask, std::size_t context_size) {
  std::vector<bool> out(context_size);
  for (std::size_t i = 0; i < context_size; ++i) out[i] = ((mask >> i) & 1U) != 0;
  return out;
}

}  // namespace logikon
