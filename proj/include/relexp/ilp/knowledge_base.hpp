#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relexp/ilp/syntax.hpp"

namespace relexp::ilp {

// Ground facts with interned symbols and per-argument indexes.
class KnowledgeBase {
 public:
  struct Table {
    std::size_t arity = 0;
    std::vector<int> rows;  // row-major, arity symbols per fact
    std::vector<std::unordered_map<int, std::vector<int>>> index;  // per position: symbol -> row ids

    std::size_t size() const { return arity ? rows.size() / arity : 0; }
    const int* row(std::size_t r) const { return rows.data() + r * arity; }
  };

  KnowledgeBase() = default;
  explicit KnowledgeBase(std::span<const Atom> facts);

  void add(const Atom& fact);  // duplicates are ignored
  int intern(std::string_view symbol);
  std::optional<int> lookup(std::string_view symbol) const;
  const std::string& symbol(int id) const { return symbols_[static_cast<std::size_t>(id)]; }

  bool contains(const Atom& fact) const;
  const Table* table(std::string_view predicate, std::size_t arity) const;
  std::size_t fact_count() const { return facts_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
  std::map<std::pair<std::string, std::size_t>, Table, std::less<>> tables_;
  std::size_t facts_ = 0;
};

// Clause resolved against a knowledge base for repeated coverage tests.
class CompiledClause {
 public:
  CompiledClause(const Clause& clause, const KnowledgeBase& kb);

  bool covers(std::string_view example) const;
  // Variable bindings of the first proof found, in depth-first literal order.
  std::optional<std::map<std::string, std::string>> substitution(std::string_view example) const;

 private:
  struct Arg {
    bool variable;
    int id;  // variable slot or symbol
  };
  struct Literal {
    const KnowledgeBase::Table* table;
    std::vector<Arg> args;
  };

  bool bind_head(std::string_view example, std::vector<int>& env) const;
  bool solve(std::size_t k, std::vector<int>& env) const;

  static constexpr int kUnknown = std::numeric_limits<int>::max();

  const KnowledgeBase* kb_;
  std::string head_constant_;
  std::vector<std::string> variables_;
  Arg head_arg_{false, -1};
  std::size_t head_arity_ = 0;
  std::vector<Literal> body_;
  bool impossible_ = false;
};

bool covers(const Clause& clause, std::string_view example, const KnowledgeBase& kb);
std::optional<std::map<std::string, std::string>> find_substitution(const Clause& clause,
                                                                    std::string_view example,
                                                                    const KnowledgeBase& kb);

}  // namespace relexp::ilp
