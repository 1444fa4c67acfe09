#include "relexp/ilp/induction.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "relexp/common/error.hpp"

namespace relexp::ilp {

void SearchConfig::validate() const {
  if (!(min_accuracy >= 0.0 && min_accuracy <= 1.0)) throw ConfigError("min accuracy must lie in [0, 1]");
  if (min_positives < 1) throw ConfigError("min positives must be at least 1");
  if (max_body < 0) throw ConfigError("max body length must be non-negative");
  if (beam_width < 1) throw ConfigError("beam width must be at least 1");
  if (node_budget < 1) throw ConfigError("node budget must be at least 1");
  if (saturation_depth < 0) throw ConfigError("saturation depth must be non-negative");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

double ScoredClause::accuracy() const {
  const int n = positives + negatives;
  return n ? static_cast<double>(positives) / n : 0.0;
}

BottomClause saturate(std::string_view example, const KnowledgeBase& kb, const ModeSet& modes,
                      int max_depth) {
  if (modes.head.args.size() != 1) throw ConfigError("head mode must have exactly one argument");
  BottomClause out;
  out.clause.head.predicate = modes.head.predicate;
  out.clause.head.args = {Term::variable(variable_name(0))};

  auto ex = kb.lookup(example);
  if (!ex) return out;

  std::map<int, std::string> var_of;
  std::map<std::string, std::set<int>> known;
  var_of[*ex] = variable_name(0);
  known[modes.head.args[0].type].insert(*ex);
  std::set<std::pair<const void*, std::vector<int>>> seen;

  for (int depth = 1; depth <= max_depth; ++depth) {
    const auto snapshot = known;
    bool added = false;
    for (const ModeDecl& m : modes.body) {
      const KnowledgeBase::Table* t = kb.table(m.predicate, m.args.size());
      if (!t) continue;
      for (std::size_t r = 0; r < t->size(); ++r) {
        const int* row = t->row(r);
        bool ok = true;
        for (std::size_t i = 0; i < m.args.size() && ok; ++i) {
          if (m.args[i].mode != ArgMode::input) continue;
          auto it = snapshot.find(m.args[i].type);
          ok = it != snapshot.end() && it->second.count(row[i]);
        }
        if (!ok) continue;
        std::vector<int> key(row, row + t->arity);
        if (!seen.insert({t, key}).second) continue;

        Atom lit;
        lit.predicate = m.predicate;
        std::vector<std::string> in, outv;
        for (std::size_t i = 0; i < m.args.size(); ++i) {
          const ModeArg& a = m.args[i];
          if (a.mode == ArgMode::constant) {
            lit.args.push_back(Term::constant(kb.symbol(row[i])));
            continue;
          }
          auto [vit, fresh] = var_of.try_emplace(row[i], "");
          if (fresh) vit->second = variable_name(var_of.size() - 1);
          lit.args.push_back(Term::variable(vit->second));
          if (a.mode == ArgMode::input) {
            in.push_back(vit->second);
          } else {
            outv.push_back(vit->second);
            known[a.type].insert(row[i]);
          }
        }
        out.clause.body.push_back(std::move(lit));
        out.inputs.push_back(std::move(in));
        out.outputs.push_back(std::move(outv));
        added = true;
      }
    }
    if (!added) break;
  }
  return out;
}

namespace {

bool subset_of(const std::vector<std::string>& vars, const std::set<std::string>& bound) {
  return std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return bound.count(v) > 0; });
}

std::set<std::string> head_vars(const BottomClause& b) {
  std::set<std::string> out;
  for (const Term& t : b.clause.head.args)
    if (t.is_variable()) out.insert(t.name);
  return out;
}

}  // namespace

Clause build_clause(const BottomClause& bottom, std::span<const int> subset) {
  std::vector<int> remaining(subset.begin(), subset.end());
  std::sort(remaining.begin(), remaining.end());
  std::set<std::string> bound = head_vars(bottom);
  Clause c;
  c.head = bottom.clause.head;
  while (!remaining.empty()) {
    auto pick = remaining.end();
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      const auto i = static_cast<std::size_t>(*it);
      if (subset_of(bottom.inputs[i], bound) && subset_of(bottom.outputs[i], bound)) {
        pick = it;
        break;
      }
    }
    if (pick == remaining.end()) {
      for (auto it = remaining.begin(); it != remaining.end(); ++it) {
        if (subset_of(bottom.inputs[static_cast<std::size_t>(*it)], bound)) {
          pick = it;
          break;
        }
      }
    }
    if (pick == remaining.end()) throw InvalidSelectionError("literal subset is not linked to the head");
    const auto i = static_cast<std::size_t>(*pick);
    c.body.push_back(bottom.clause.body[i]);
    bound.insert(bottom.outputs[i].begin(), bottom.outputs[i].end());
    remaining.erase(pick);
  }
  return canonical_variables(c);
}

namespace {

struct Node {
  ScoredClause scored;
  std::string text;
};

// Higher score, then shorter body, then lexicographically smaller clause.
bool better(const Node& a, const Node& b) {
  if (a.scored.score() != b.scored.score()) return a.scored.score() > b.scored.score();
  if (a.scored.clause.body.size() != b.scored.clause.body.size())
    return a.scored.clause.body.size() < b.scored.clause.body.size();
  return a.text < b.text;
}

Node evaluate(const BottomClause& bottom, std::vector<int> subset, std::span<const std::string> pos,
              std::span<const std::string> neg, const KnowledgeBase& kb) {
  Node n;
  n.scored.clause = build_clause(bottom, subset);
  n.scored.literals = std::move(subset);
  const CompiledClause cc(n.scored.clause, kb);
  for (const auto& e : pos) n.scored.positives += cc.covers(e);
  for (const auto& e : neg) n.scored.negatives += cc.covers(e);
  n.text = to_string(n.scored.clause);
  return n;
}

std::vector<Node> evaluate_all(const BottomClause& bottom, std::vector<std::vector<int>> subsets,
                               std::span<const std::string> pos, std::span<const std::string> neg,
                               const KnowledgeBase& kb, int threads) {
  std::vector<Node> out(subsets.size());
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), subsets.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < subsets.size(); ++i) out[i] = evaluate(bottom, std::move(subsets[i]), pos, neg, kb);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < subsets.size(); i += workers)
        out[i] = evaluate(bottom, std::move(subsets[i]), pos, neg, kb);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace

std::optional<ScoredClause> search(const BottomClause& bottom, std::span<const std::string> positives,
                                   std::span<const std::string> negatives, const KnowledgeBase& kb,
                                   const SearchConfig& config, SearchStats* stats) {
  config.validate();
  SearchStats local;
  SearchStats& st = stats ? *stats : local;
  st = {};

  auto acceptable = [&](const Node& n) {
    return n.scored.positives >= config.min_positives && n.scored.accuracy() >= config.min_accuracy;
  };

  std::optional<Node> best;
  auto offer = [&](const Node& n) {
    if (acceptable(n) && (!best || better(n, *best))) best = n;
  };

  Node root = evaluate(bottom, {}, positives, negatives, kb);
  st.nodes = 1;
  offer(root);
  std::vector<Node> beam;
  if (root.scored.positives >= config.min_positives) beam.push_back(std::move(root));

  std::set<std::vector<int>> visited{{}};
  const int n_lits = static_cast<int>(bottom.clause.body.size());
  const std::set<std::string> head = head_vars(bottom);

  for (int len = 1; len <= config.max_body && !beam.empty() && !st.budget_exhausted; ++len) {
    std::vector<std::vector<int>> candidates;
    for (const Node& node : beam) {
      const ScoredClause& s = node.scored;
      if (s.negatives == 0) continue;  // refinements cannot score higher
      if (best) {
        const int bs = best->scored.score();
        if (s.positives < bs) continue;
        if (s.positives == bs && best->scored.clause.body.size() <= s.clause.body.size() + 1) continue;
      }
      std::set<std::string> bound = head;
      for (int i : s.literals) {
        const auto& o = bottom.outputs[static_cast<std::size_t>(i)];
        bound.insert(o.begin(), o.end());
      }
      for (int i = 0; i < n_lits; ++i) {
        if (std::binary_search(s.literals.begin(), s.literals.end(), i)) continue;
        if (!subset_of(bottom.inputs[static_cast<std::size_t>(i)], bound)) continue;
        std::vector<int> child = s.literals;
        child.insert(std::upper_bound(child.begin(), child.end(), i), i);
        if (!visited.insert(child).second) continue;
        if (st.nodes + static_cast<int>(candidates.size()) >= config.node_budget) {
          st.budget_exhausted = true;
          break;
        }
        candidates.push_back(std::move(child));
      }
      if (st.budget_exhausted) break;
    }
    st.nodes += static_cast<int>(candidates.size());
    std::vector<Node> children =
        evaluate_all(bottom, std::move(candidates), positives, negatives, kb, config.threads);
    std::vector<Node> next;
    for (Node& c : children) {
      if (c.scored.positives < config.min_positives) continue;
      offer(c);
      next.push_back(std::move(c));
    }
    std::sort(next.begin(), next.end(), better);
    if (next.size() > static_cast<std::size_t>(config.beam_width))
      next.resize(static_cast<std::size_t>(config.beam_width));
    beam = std::move(next);
  }
  if (!best) return std::nullopt;
  return best->scored;
}

double Theory::accuracy() const {
  const int total = positives + negatives;
  if (!total) return 0.0;
  return static_cast<double>(covered_positives + (negatives - covered_negatives)) / total;
}

bool Theory::covers(std::string_view example, const KnowledgeBase& kb) const {
  return std::any_of(clauses.begin(), clauses.end(),
                     [&](const TheoryClause& c) { return ilp::covers(c.clause.clause, example, kb); });
}

Theory induce(const Program& program, const ModeSet& modes, const SearchConfig& config) {
  config.validate();
  if (modes.head.predicate != program.target || modes.head.args.size() != 1)
    throw ConfigError("head mode does not match target " + program.target + "/1");
  const KnowledgeBase kb(program.facts);
  Theory th;
  th.positives = static_cast<int>(program.positives.size());
  th.negatives = static_cast<int>(program.negatives.size());

  std::vector<std::string> uncovered = program.positives;
  std::set<std::string> tried;
  while (true) {
    auto seed = std::find_if(uncovered.begin(), uncovered.end(),
                             [&](const std::string& e) { return !tried.count(e); });
    if (seed == uncovered.end()) break;
    tried.insert(*seed);
    const BottomClause bottom = saturate(*seed, kb, modes, config.saturation_depth);
    SearchStats st;
    auto found = search(bottom, uncovered, program.negatives, kb, config, &st);
    if (!found) continue;
    const CompiledClause cc(found->clause, kb);
    TheoryClause tc;
    tc.clause = *found;
    tc.nodes = st.nodes;
    for (const auto& e : program.positives) tc.positives_total += cc.covers(e);
    for (const auto& e : program.negatives) tc.negatives_total += cc.covers(e);
    th.clauses.push_back(std::move(tc));
    std::erase_if(uncovered, [&](const std::string& e) { return cc.covers(e); });
  }

  for (const auto& e : program.positives) th.covered_positives += th.covers(e, kb);
  for (const auto& e : program.negatives) th.covered_negatives += th.covers(e, kb);
  if (th.empty()) {
    th.diagnostic = program.positives.empty()
                        ? "no positive examples"
                        : "no clause reached minimum accuracy " + std::to_string(config.min_accuracy);
  } else if (th.covered_positives < th.positives) {
    th.diagnostic = std::to_string(th.positives - th.covered_positives) + " positive example(s) left uncovered";
  }
  return th;
}

std::string to_text(const Theory& theory) {
  std::string out;
  for (const auto& c : theory.clauses) out += to_string(c.clause.clause) + "\n";
  return out;
}

std::string stats_json(const Theory& theory, const SearchConfig& config) {
  nlohmann::ordered_json j;
  j["accuracy"] = theory.accuracy();
  j["positives"] = theory.positives;
  j["negatives"] = theory.negatives;
  j["covered_positives"] = theory.covered_positives;
  j["covered_negatives"] = theory.covered_negatives;
  auto clauses = nlohmann::ordered_json::array();
  for (const auto& c : theory.clauses) {
    clauses.push_back({{"clause", to_string(c.clause.clause)},
                       {"positives", c.positives_total},
                       {"negatives", c.negatives_total},
                       {"score", c.clause.score()},
                       {"nodes", c.nodes}});
  }
  j["clauses"] = clauses;
  j["diagnostic"] = theory.diagnostic;
  j["config"] = {{"min_accuracy", config.min_accuracy},   {"min_positives", config.min_positives},
                 {"max_body", config.max_body},           {"beam_width", config.beam_width},
                 {"node_budget", config.node_budget},     {"saturation_depth", config.saturation_depth}};
  return j.dump(2) + "\n";
}

}  // namespace relexp::ilp
