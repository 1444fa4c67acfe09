#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace relexp::ilp {

struct Term {
  enum class Kind { constant, variable };

  Kind kind = Kind::constant;
  std::string name;

  static Term constant(std::string name) { return {Kind::constant, std::move(name)}; }
  static Term variable(std::string name) { return {Kind::variable, std::move(name)}; }
  bool is_variable() const { return kind == Kind::variable; }

  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;
};

// Definite Horn clause; an empty body is a fact or the most general rule.
struct Clause {
  Atom head;
  std::vector<Atom> body;

  bool operator==(const Clause&) const = default;
};

// "left_of(B,C)"; facts pass ", " to get "left_of(sp1, sp2)".
std::string to_string(const Atom& atom, std::string_view separator = ",");
// "concept(A) :- contains(B,A), has_color(B,green)."
std::string to_string(const Clause& clause);

// Renames variables to A, B, C, ... in order of first appearance (head first).
Clause canonical_variables(const Clause& clause);
std::string variable_name(std::size_t index);

enum class ArgMode { input, output, constant };

struct ModeArg {
  ArgMode mode = ArgMode::input;
  std::string type;
  bool operator==(const ModeArg&) const = default;
};

struct ModeDecl {
  std::string predicate;
  std::vector<ModeArg> args;
  bool operator==(const ModeDecl&) const = default;
};

// Language bias: one head mode and the body modes in declaration order.
struct ModeSet {
  ModeDecl head;
  std::vector<ModeDecl> body;

  const ModeDecl* find_body(std::string_view predicate, std::size_t arity) const;
};

// Examples and ground background facts for one learning problem.
struct Program {
  std::string target = "concept";
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
  std::vector<Atom> facts;

  bool operator==(const Program&) const = default;
};

// Positives as "concept(e1).", negatives as ":- concept(e2).", then facts.
std::string to_text(const Program& program);
std::string to_text(const ModeSet& modes);

// Relation-flip blocksworld bias: contains/2 links blocks to the example,
// has_color/2 carries #color constants, six spatial relations over blocks.
std::string default_modes_text();
ModeSet default_modes();

}  // namespace relexp::ilp
