#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relexp/ilp/knowledge_base.hpp"
#include "relexp/ilp/syntax.hpp"

namespace relexp::ilp {

struct SearchConfig {
  double min_accuracy = 0.8;
  int min_positives = 1;
  int max_body = 6;
  int beam_width = 64;
  int node_budget = 5000;
  int saturation_depth = 3;
  int threads = 1;

  void validate() const;  // throws ConfigError
};

// Most specific clause for one positive, with the typed variables each body
// literal consumes (+) and introduces (-).
struct BottomClause {
  Clause clause;
  std::vector<std::vector<std::string>> inputs;
  std::vector<std::vector<std::string>> outputs;
};

BottomClause saturate(std::string_view example, const KnowledgeBase& kb, const ModeSet& modes,
                      int max_depth);

struct ScoredClause {
  Clause clause;  // canonical variable names
  std::vector<int> literals;  // sorted indices into the bottom clause
  int positives = 0;
  int negatives = 0;

  int score() const { return positives - negatives; }
  double accuracy() const;
};

// Orders a subset of bottom literals so every variable is bound before it is
// consumed: literals closing over bound variables come first, otherwise the
// earliest literal that introduces new ones.
Clause build_clause(const BottomClause& bottom, std::span<const int> subset);

struct SearchStats {
  int nodes = 0;
  bool budget_exhausted = false;
};

// Beam search over body subsets of the bottom clause scored by P - N.
std::optional<ScoredClause> search(const BottomClause& bottom, std::span<const std::string> positives,
                                   std::span<const std::string> negatives, const KnowledgeBase& kb,
                                   const SearchConfig& config, SearchStats* stats = nullptr);

struct TheoryClause {
  ScoredClause clause;      // counts against the examples left when it was learned
  int positives_total = 0;  // against the full example set
  int negatives_total = 0;
  int nodes = 0;
};

struct Theory {
  std::vector<TheoryClause> clauses;
  int positives = 0;
  int negatives = 0;
  int covered_positives = 0;
  int covered_negatives = 0;
  std::string diagnostic;

  bool empty() const { return clauses.empty(); }
  double accuracy() const;
  bool covers(std::string_view example, const KnowledgeBase& kb) const;
};

// Sequential covering: learn a clause from the first uncovered positive,
// drop the positives it covers, repeat.
Theory induce(const Program& program, const ModeSet& modes, const SearchConfig& config);

std::string to_text(const Theory& theory);
std::string stats_json(const Theory& theory, const SearchConfig& config);

}  // namespace relexp::ilp
