#pragma once

#include <map>
#include <string>
#include <string_view>

#include "relexp/ilp/induction.hpp"
#include "relexp/ilp/syntax.hpp"

namespace relexp::explain {

// Wording for the verbal explanation, loaded from JSON.
struct Templates {
  std::string sentence;      // {concept} {body}
  std::string unconditional;  // {concept}
  std::string contains;      // {blocks}
  std::string block;         // {var}
  std::string block_with;    // {var} {attributes}
  std::string relation;      // {subject} {phrase} {object}
  std::string conjunction;   // between fragments
  std::map<std::string, std::string> attributes;  // predicate -> fragment with {value}
  std::map<std::string, std::string> phrases;     // relation predicate -> phrase

  static Templates from_json(std::string_view text);  // throws ConfigError
  static Templates defaults();
};

std::string_view default_templates_json();

// One sentence per clause, one line each.
std::string verbalize(const ilp::Clause& clause, const Templates& templates = Templates::defaults());
std::string verbalize(const ilp::Theory& theory, const Templates& templates = Templates::defaults());

}  // namespace relexp::explain
