#pragma once

#include <string_view>
#include <vector>

#include "relexp/ilp/syntax.hpp"

namespace relexp::ilp {

// Example files: "target(e)." is a positive, ":- target(e)." a negative, any
// other ground fact is background knowledge. Throws ParseError with 1-based
// line and column.
Program parse_program(std::string_view text, std::string_view target = "concept");

// Rules and facts, e.g. the content of theory.pl.
std::vector<Clause> parse_clauses(std::string_view text);

// modeh(concept(+example)). modeb(has_color(+block, #color)). An optional
// leading recall argument (modeb(*, ...)) and ":-" prefix are accepted.
ModeSet parse_modes(std::string_view text);

}  // namespace relexp::ilp
