#include "relexp/ilp/knowledge_base.hpp"

#include <algorithm>

#include "relexp/common/error.hpp"

namespace relexp::ilp {

KnowledgeBase::KnowledgeBase(std::span<const Atom> facts) {
  for (const Atom& a : facts) add(a);
}

int KnowledgeBase::intern(std::string_view symbol) {
  auto it = ids_.find(std::string(symbol));
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(symbols_.size());
  symbols_.emplace_back(symbol);
  ids_.emplace(symbols_.back(), id);
  return id;
}

std::optional<int> KnowledgeBase::lookup(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const KnowledgeBase::Table* KnowledgeBase::table(std::string_view predicate, std::size_t arity) const {
  auto it = tables_.find(std::pair<std::string, std::size_t>(std::string(predicate), arity));
  return it == tables_.end() ? nullptr : &it->second;
}

bool KnowledgeBase::contains(const Atom& fact) const {
  const Table* t = table(fact.predicate, fact.args.size());
  if (!t) return false;
  std::vector<int> ids;
  for (const Term& a : fact.args) {
    auto id = lookup(a.name);
    if (!id || a.is_variable()) return false;
    ids.push_back(*id);
  }
  if (ids.empty()) return t->size() > 0 || t->arity == 0;
  auto hit = t->index[0].find(ids[0]);
  if (hit == t->index[0].end()) return false;
  return std::any_of(hit->second.begin(), hit->second.end(), [&](int r) {
    return std::equal(ids.begin(), ids.end(), t->row(static_cast<std::size_t>(r)));
  });
}

void KnowledgeBase::add(const Atom& fact) {
  if (!fact.is_ground()) throw ConfigError("background fact is not ground: " + to_string(fact));
  if (contains(fact)) return;
  Table& t = tables_[{fact.predicate, fact.args.size()}];
  t.arity = fact.args.size();
  t.index.resize(t.arity);
  const int r = static_cast<int>(t.size());
  for (std::size_t i = 0; i < t.arity; ++i) {
    const int id = intern(fact.args[i].name);
    t.rows.push_back(id);
    t.index[i][id].push_back(r);
  }
  ++facts_;
}

CompiledClause::CompiledClause(const Clause& clause, const KnowledgeBase& kb) : kb_(&kb) {
  auto slot = [&](const Term& t, bool in_body) -> Arg {
    if (t.is_variable()) {
      auto it = std::find(variables_.begin(), variables_.end(), t.name);
      if (it != variables_.end()) return {true, static_cast<int>(it - variables_.begin())};
      variables_.push_back(t.name);
      return {true, static_cast<int>(variables_.size() - 1)};
    }
    auto id = kb.lookup(t.name);
    if (!id && in_body) impossible_ = true;
    return {false, id.value_or(-1)};
  };
  head_arity_ = clause.head.args.size();
  if (head_arity_ == 1) {
    head_arg_ = slot(clause.head.args[0], false);
    if (!head_arg_.variable) head_constant_ = clause.head.args[0].name;
  }
  for (const Atom& a : clause.body) {
    Literal lit{kb.table(a.predicate, a.args.size()), {}};
    if (!lit.table) impossible_ = true;
    for (const Term& t : a.args) lit.args.push_back(slot(t, true));
    body_.push_back(std::move(lit));
  }
}

bool CompiledClause::bind_head(std::string_view example, std::vector<int>& env) const {
  if (head_arity_ != 1 || impossible_) return false;
  env.assign(variables_.size(), -1);
  if (!head_arg_.variable) return head_constant_ == example;
  // an example unknown to the KB matches no fact but may satisfy literals
  // that do not mention it
  env[static_cast<std::size_t>(head_arg_.id)] = kb_->lookup(example).value_or(kUnknown);
  return true;
}

bool CompiledClause::solve(std::size_t k, std::vector<int>& env) const {
  if (k == body_.size()) return true;
  const Literal& lit = body_[k];
  const auto& t = *lit.table;
  auto value = [&](const Arg& a) { return a.variable ? env[static_cast<std::size_t>(a.id)] : a.id; };

  // Narrowest index among bound positions.
  const std::vector<int>* candidates = nullptr;
  for (std::size_t i = 0; i < lit.args.size(); ++i) {
    const int v = value(lit.args[i]);
    if (v < 0) continue;
    auto it = t.index[i].find(v);
    if (it == t.index[i].end()) return false;
    if (!candidates || it->second.size() < candidates->size()) candidates = &it->second;
  }
  const std::size_t n = candidates ? candidates->size() : t.size();
  std::vector<std::size_t> newly;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t r = candidates ? static_cast<std::size_t>((*candidates)[c]) : c;
    const int* row = t.row(r);
    newly.clear();
    bool ok = true;
    for (std::size_t i = 0; i < lit.args.size() && ok; ++i) {
      const Arg& a = lit.args[i];
      if (!a.variable) {
        ok = row[i] == a.id;
        continue;
      }
      int& slot = env[static_cast<std::size_t>(a.id)];
      if (slot < 0) {
        slot = row[i];
        newly.push_back(static_cast<std::size_t>(a.id));
      } else {
        ok = slot == row[i];
      }
    }
    if (ok && solve(k + 1, env)) return true;
    for (std::size_t v : newly) env[v] = -1;
  }
  return false;
}

bool CompiledClause::covers(std::string_view example) const {
  std::vector<int> env;
  if (!bind_head(example, env)) return false;
  return solve(0, env);
}

std::optional<std::map<std::string, std::string>> CompiledClause::substitution(
    std::string_view example) const {
  std::vector<int> env;
  if (!bind_head(example, env) || !solve(0, env)) return std::nullopt;
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < variables_.size(); ++i)
    out[variables_[i]] = env[i] >= 0 && env[i] != kUnknown ? kb_->symbol(env[i]) : std::string(example);
  return out;
}

bool covers(const Clause& clause, std::string_view example, const KnowledgeBase& kb) {
  return CompiledClause(clause, kb).covers(example);
}

std::optional<std::map<std::string, std::string>> find_substitution(const Clause& clause,
                                                                    std::string_view example,
                                                                    const KnowledgeBase& kb) {
  return CompiledClause(clause, kb).substitution(example);
}

}  // namespace relexp::ilp
