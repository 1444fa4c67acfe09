#include "relexp/ilp/syntax.hpp"

#include <algorithm>
#include <map>

#include "relexp/ilp/parser.hpp"

namespace relexp::ilp {

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::string to_string(const Atom& atom, std::string_view separator) {
  std::string out = atom.predicate;
  if (atom.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += separator;
    out += atom.args[i].name;
  }
  out += ')';
  return out;
}

std::string to_string(const Clause& clause) {
  std::string out = to_string(clause.head);
  for (std::size_t i = 0; i < clause.body.size(); ++i) {
    out += i ? ", " : " :- ";
    out += to_string(clause.body[i]);
  }
  out += '.';
  return out;
}

std::string variable_name(std::size_t index) {
  std::string name(1, static_cast<char>('A' + index % 26));
  if (index >= 26) name += std::to_string(index / 26);
  return name;
}

Clause canonical_variables(const Clause& clause) {
  std::map<std::string, std::string> rename;
  auto fix = [&](Atom a) {
    for (Term& t : a.args) {
      if (!t.is_variable()) continue;
      auto [it, fresh] = rename.try_emplace(t.name, "");
      if (fresh) it->second = variable_name(rename.size() - 1);
      t.name = it->second;
    }
    return a;
  };
  Clause out;
  out.head = fix(clause.head);
  for (const Atom& a : clause.body) out.body.push_back(fix(a));
  return out;
}

const ModeDecl* ModeSet::find_body(std::string_view predicate, std::size_t arity) const {
  for (const ModeDecl& m : body)
    if (m.predicate == predicate && m.args.size() == arity) return &m;
  return nullptr;
}

std::string to_text(const Program& program) {
  std::string out = "% positive examples\n";
  for (const auto& e : program.positives) out += program.target + "(" + e + ").\n";
  out += "% negative examples\n";
  for (const auto& e : program.negatives) out += ":- " + program.target + "(" + e + ").\n";
  out += "% background knowledge\n";
  for (const Atom& a : program.facts) out += to_string(a, ", ") + ".\n";
  return out;
}

namespace {

std::string mode_text(const ModeDecl& m) {
  std::string out = m.predicate + "(";
  for (std::size_t i = 0; i < m.args.size(); ++i) {
    if (i) out += ",";
    switch (m.args[i].mode) {
      case ArgMode::input: out += '+'; break;
      case ArgMode::output: out += '-'; break;
      case ArgMode::constant: out += '#'; break;
    }
    out += m.args[i].type;
  }
  return out + ")";
}

}  // namespace

std::string to_text(const ModeSet& modes) {
  std::string out = "modeh(" + mode_text(modes.head) + ").\n";
  for (const auto& m : modes.body) out += "modeb(" + mode_text(m) + ").\n";
  return out;
}

std::string default_modes_text() {
  return "modeh(concept(+example)).\n"
         "modeb(contains(-block,+example)).\n"
         "modeb(has_color(+block,#color)).\n"
         "modeb(left_of(+block,+block)).\n"
         "modeb(right_of(+block,+block)).\n"
         "modeb(top_of(+block,+block)).\n"
         "modeb(bottom_of(+block,+block)).\n"
         "modeb(on(+block,+block)).\n"
         "modeb(under(+block,+block)).\n";
}

ModeSet default_modes() { return parse_modes(default_modes_text()); }

}  // namespace relexp::ilp
