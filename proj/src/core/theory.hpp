#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/error.hpp"
#include "core/term.hpp"

namespace logikon {

struct Connective {
  std::string name;
  std::size_t arity = 0;

  friend bool operator==(const Connective&, const Connective&) = default;
};

struct Axiom {
  std::string name;
  std::size_t context_size = 0;
  Term lhs = Term::variable(0);
  Term rhs = Term::variable(0);
  // Source spelling of the positional variables; may be empty.
  std::vector<std::string> variable_names;
  SourceLocation location;
};

struct Theory {
  std::string name;
  std::vector<Connective> connectives;
  std::vector<Axiom> axioms;

  const Connective* find_connective(std::string_view name) const;
  const Axiom* find_axiom(std::string_view name) const;
};

// Structural identity: names, arities, contexts and term trees. Source
// locations and variable spellings are ignored.
bool same_structure(const Theory& a, const Theory& b);

// Parses the .thy DSL:
//   theory := "theory" IDENT "{" (opdecl | axiom)* "}"
//   opdecl := "op" IDENT ":" NAT ";"
//   axiom  := "axiom" IDENT ":" term "=" term ";"
//   term   := IDENT | IDENT "(" term ("," term)* ")"
// Identifiers naming a declared connective are applications (arity-0
// connectives are constants); all other bare identifiers are variables,
// numbered per axiom in order of first appearance. Throws Error with a
// source location.
Theory parse_theory(std::string_view source);

struct ParsedExpression {
  Term term;
  std::vector<std::string> variables;
};

// Parses a single term against a theory's signature. Variables listed in
// `variables` keep their positions; new ones are appended in order of
// appearance.
ParsedExpression parse_expression(std::string_view source, const Theory& theory,
                                  std::vector<std::string> variables = {});

struct Diagnostic {
  std::string subject;  // axiom or connective name
  SourceLocation location;
  std::string message;
};

std::vector<Diagnostic> validate_theory(const Theory& theory);

// Checks a term against the signature and a context size; returns an
// empty string when well-formed.
std::string check_term(const Term& t, const Theory& theory, std::size_t context_size);

std::string print_theory(const Theory& theory);

// Copy of `theory` keeping only the named axioms (in the given order).
Theory with_axioms(const Theory& theory, std::span<const std::string> names);

inline constexpr std::string_view kDslVersionComment = "// logikon-thy v1";

}  // namespace logikon
