#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "core/term.hpp"
#include "core/theory.hpp"

namespace logikon {

enum class BooleanOp { and_, or_, not_, nand, nor, xor_, implies, iff, true_, false_ };

// Standard two-valued reading of a connective, recognised by name and arity.
std::optional<BooleanOp> boolean_interpretation(std::string_view name, std::size_t arity);
bool has_boolean_interpretation(const Theory& theory);

bool apply_boolean(BooleanOp op, std::span<const bool> args);

// Discrete evaluation; variable i takes bit i of `assignment`. Throws
// unsupported for connectives without a boolean reading.
bool evaluate_boolean(const Term& t, std::uint64_t assignment);

// Bit r of the result is the value on the assignment where variable i is
// bit i of r. Requires context_size <= 6.
std::uint64_t truth_table(const Term& t, std::size_t context_size);

// Assignment for row `mask`: variable i is bit i.
std::vector<bool> assignment_from_mask(std::uint64_t mask, std::size_t context_size);

}  // namespace logikon
