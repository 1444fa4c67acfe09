#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "relexp/ilp/syntax.hpp"
#include "relexp/pipeline/pipeline.hpp"

namespace relexp::explain {

struct Highlight {
  int cell = 0;       // super-pixel id
  std::string label;  // clause variable, e.g. "B"
  std::array<std::uint8_t, 3> outline{255, 255, 0};
};

struct Edge {
  int from = 0;
  int to = 0;
  std::string relation;
};

struct Annotation {
  std::string clause;
  std::map<std::string, std::string> substitution;  // variable -> constant
  std::vector<Highlight> highlights;                // in order of first appearance
  std::vector<Edge> edges;                          // one per relation literal
  std::string caption;
};

// Grounds the first clause of the theory on the unperturbed example. Throws
// Error if the theory is empty or does not cover that example.
Annotation instantiate(const ilp::Theory& theory, const pipeline::ExplanationRun& run);
Annotation instantiate(const ilp::Clause& clause, const pipeline::ExplanationRun& run);
Annotation instantiate(const ilp::Clause& clause, const ilp::Program& program, std::string_view example);

}  // namespace relexp::explain
