#include "relexp/explain/annotation.hpp"

#include <algorithm>

#include "relexp/common/error.hpp"
#include "relexp/ilp/knowledge_base.hpp"

namespace relexp::explain {

namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 5> kPalette = {{
    {255, 255, 0},
    {255, 255, 255},
    {255, 0, 255},
    {255, 160, 0},
    {0, 0, 0},
}};

// "sp26_e1" -> 26
int cell_of(const std::string& constant) {
  if (constant.rfind("sp", 0) != 0) return -1;
  const auto end = constant.find('_');
  try {
    return std::stoi(constant.substr(2, end == std::string::npos ? std::string::npos : end - 2));
  } catch (const std::exception&) {
    return -1;
  }
}

}  // namespace

Annotation instantiate(const ilp::Theory& theory, const pipeline::ExplanationRun& run) {
  if (theory.empty()) throw Error("cannot annotate an empty theory");
  return instantiate(theory.clauses.front().clause.clause, run);
}

Annotation instantiate(const ilp::Clause& clause, const pipeline::ExplanationRun& run) {
  if (run.examples.empty()) throw Error("run has no logical examples");
  return instantiate(clause, run.program, run.examples.front().constant);
}

Annotation instantiate(const ilp::Clause& clause, const ilp::Program& program, std::string_view example) {
  const ilp::KnowledgeBase kb(program.facts);
  auto sub = ilp::find_substitution(clause, example, kb);
  if (!sub) throw Error("explanation inconsistent with instance: clause does not cover " + std::string(example));

  Annotation a;
  a.clause = ilp::to_string(clause);
  a.substitution = *sub;
  auto cell = [&](const ilp::Term& t) {
    const std::string& c = t.is_variable() ? a.substitution.at(t.name) : t.name;
    return cell_of(c);
  };
  auto highlight = [&](const ilp::Term& t) {
    const int id = cell(t);
    if (id < 0) return;
    if (std::any_of(a.highlights.begin(), a.highlights.end(), [&](const Highlight& h) { return h.cell == id; }))
      return;
    Highlight h;
    h.cell = id;
    h.label = t.name;
    h.outline = kPalette[a.highlights.size() % kPalette.size()];
    a.highlights.push_back(h);
  };

  std::vector<std::string> fragments;
  for (const ilp::Atom& lit : clause.body) {
    for (const ilp::Term& t : lit.args)
      if (t.is_variable() && cell(t) >= 0) highlight(t);
    if (lit.args.size() != 2) continue;
    if (lit.predicate == "has_color") {
      fragments.push_back(lit.args[0].name + " is " + lit.args[1].name);
    } else if (percept::parse_relation(lit.predicate)) {
      const int from = cell(lit.args[0]), to = cell(lit.args[1]);
      if (from >= 0 && to >= 0) a.edges.push_back({from, to, lit.predicate});
    }
  }
  for (std::size_t i = 0; i < fragments.size(); ++i) a.caption += (i ? ", " : "") + fragments[i];
  return a;
}

}  // namespace relexp::explain
