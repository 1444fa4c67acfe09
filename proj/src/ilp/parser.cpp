#include "relexp/ilp/parser.hpp"

#include <cctype>
#include <map>
#include <optional>

#include "relexp/common/error.hpp"

namespace relexp::ilp {

namespace {

enum class Tok { name, variable, number, lparen, rparen, comma, dot, neck, plus, minus, hash, star, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::name: return "name";
    case Tok::variable: return "variable";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::comma: return "','";
    case Tok::dot: return "'.'";
    case Tok::neck: return "':-'";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::hash: return "'#'";
    case Tok::star: return "'*'";
    case Tok::end: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  Token next() {
    skip();
    const int line = line_, col = col_;
    if (i_ >= s_.size()) return {Tok::end, "", line, col};
    const char c = s_[i_];
    auto single = [&](Tok k) {
      advance();
      return Token{k, std::string(1, c), line, col};
    };
    switch (c) {
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case ',': return single(Tok::comma);
      case '.': return single(Tok::dot);
      case '+': return single(Tok::plus);
      case '-': return single(Tok::minus);
      case '#': return single(Tok::hash);
      case '*': return single(Tok::star);
      case ':':
        if (i_ + 1 < s_.size() && s_[i_ + 1] == '-') {
          advance();
          advance();
          return {Tok::neck, ":-", line, col};
        }
        throw ParseError(line, col, "unexpected ':'");
      case '\'': return quoted(line, col);
      default: break;
    }
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      std::string word;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
        word += s_[i_];
        advance();
      }
      const bool var = std::isupper(uc) || c == '_';
      return {var ? Tok::variable : Tok::name, word, line, col};
    }
    if (std::isdigit(uc)) {
      std::string num;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        num += s_[i_];
        advance();
      }
      return {Tok::number, num, line, col};
    }
    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        advance();
      } else if (s_[i_] == '%') {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token quoted(int line, int col) {
    advance();
    std::string word;
    while (i_ < s_.size() && s_[i_] != '\'') {
      if (s_[i_] == '\n') break;
      word += s_[i_];
      advance();
    }
    if (i_ >= s_.size() || s_[i_] != '\'') throw ParseError(line, col, "unterminated quoted atom");
    advance();
    return {Tok::name, word, line, col};
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Generic term tree; mode markers are kept as a prefix.
struct PTerm {
  char prefix = 0;
  Tok kind = Tok::name;
  std::string name;
  std::vector<PTerm> args;
  int line = 0;
  int column = 0;
};

struct PClause {
  bool directive = false;  // starts with ":-"
  std::optional<PTerm> head;
  std::vector<PTerm> body;
  int line = 0;
  int column = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  bool done() const { return tok_.kind == Tok::end; }

  PClause clause() {
    PClause c;
    c.line = tok_.line;
    c.column = tok_.column;
    if (tok_.kind == Tok::neck) {
      c.directive = true;
      shift();
      c.body = conjunction();
    } else {
      c.head = term();
      if (tok_.kind == Tok::neck) {
        shift();
        c.body = conjunction();
      }
    }
    expect(Tok::dot, "expected '.' at end of clause");
    return c;
  }

 private:
  void shift() { tok_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok_.line, tok_.column, msg + ", found " + describe(tok_.kind));
  }

  void expect(Tok k, const char* msg) {
    if (tok_.kind != k) fail(msg);
    shift();
  }

  std::vector<PTerm> conjunction() {
    std::vector<PTerm> out;
    out.push_back(term());
    while (tok_.kind == Tok::comma) {
      shift();
      out.push_back(term());
    }
    return out;
  }

  PTerm term() {
    PTerm t;
    t.line = tok_.line;
    t.column = tok_.column;
    if (tok_.kind == Tok::plus || tok_.kind == Tok::minus || tok_.kind == Tok::hash) {
      t.prefix = tok_.text[0];
      shift();
    }
    switch (tok_.kind) {
      case Tok::name:
      case Tok::variable:
      case Tok::number:
      case Tok::star:
        break;
      default:
        fail("expected a term");
    }
    t.kind = tok_.kind;
    t.name = tok_.text;
    shift();
    if (t.kind == Tok::name && tok_.kind == Tok::lparen) {
      shift();
      t.args.push_back(term());
      while (tok_.kind == Tok::comma) {
        shift();
        t.args.push_back(term());
      }
      if (tok_.kind != Tok::rparen) fail("expected ',' or ')'");
      shift();
    }
    return t;
  }

  Lexer lex_;
  Token tok_;
};

// Checks one arity per predicate across a file.
class ArityTable {
 public:
  void check(const PTerm& t) {
    auto [it, fresh] = arity_.try_emplace(t.name, t.args.size());
    if (!fresh && it->second != t.args.size())
      throw ParseError(t.line, t.column,
                       "predicate " + t.name + " used with arity " + std::to_string(t.args.size()) +
                           " and " + std::to_string(it->second));
  }

 private:
  std::map<std::string, std::size_t> arity_;
};

Term to_term(const PTerm& p) {
  if (p.prefix) throw ParseError(p.line, p.column, "mode marker outside a mode declaration");
  if (!p.args.empty()) throw ParseError(p.line, p.column, "compound arguments are not supported");
  if (p.kind == Tok::star) throw ParseError(p.line, p.column, "unexpected '*'");
  return p.kind == Tok::variable ? Term::variable(p.name) : Term::constant(p.name);
}

Atom to_atom(const PTerm& p, ArityTable& arities) {
  if (p.kind != Tok::name || p.prefix)
    throw ParseError(p.line, p.column, "expected a predicate");
  arities.check(p);
  Atom a;
  a.predicate = p.name;
  for (const PTerm& arg : p.args) a.args.push_back(to_term(arg));
  return a;
}

}  // namespace

Program parse_program(std::string_view text, std::string_view target) {
  Program prog;
  prog.target = std::string(target);
  Parser parser(text);
  ArityTable arities;
  while (!parser.done()) {
    PClause c = parser.clause();
    if (c.directive) {
      if (c.body.size() != 1)
        throw ParseError(c.line, c.column, "a negative example must be a single literal");
      Atom a = to_atom(c.body[0], arities);
      if (a.predicate != target || a.args.size() != 1 || !a.is_ground())
        throw ParseError(c.line, c.column, "negative example must be " + prog.target + "(constant)");
      prog.negatives.push_back(a.args[0].name);
      continue;
    }
    if (!c.body.empty())
      throw ParseError(c.line, c.column, "rules are not allowed in an example file");
    Atom a = to_atom(*c.head, arities);
    if (!a.is_ground()) throw ParseError(c.line, c.column, "background facts must be ground");
    if (a.predicate == target) {
      if (a.args.size() != 1)
        throw ParseError(c.line, c.column, "positive example must be " + prog.target + "(constant)");
      prog.positives.push_back(a.args[0].name);
    } else {
      prog.facts.push_back(std::move(a));
    }
  }
  return prog;
}

std::vector<Clause> parse_clauses(std::string_view text) {
  std::vector<Clause> out;
  Parser parser(text);
  ArityTable arities;
  while (!parser.done()) {
    PClause c = parser.clause();
    if (c.directive) throw ParseError(c.line, c.column, "directives are not allowed here");
    Clause cl;
    cl.head = to_atom(*c.head, arities);
    for (const PTerm& b : c.body) cl.body.push_back(to_atom(b, arities));
    out.push_back(std::move(cl));
  }
  return out;
}

namespace {

ModeDecl to_mode(const PTerm& p) {
  if (p.kind != Tok::name || p.prefix) throw ParseError(p.line, p.column, "expected a mode template");
  ModeDecl m;
  m.predicate = p.name;
  for (const PTerm& a : p.args) {
    if (!a.args.empty() || a.kind != Tok::name)
      throw ParseError(a.line, a.column, "mode argument must be +type, -type or #type");
    ModeArg arg;
    arg.type = a.name;
    switch (a.prefix) {
      case '+': arg.mode = ArgMode::input; break;
      case '-': arg.mode = ArgMode::output; break;
      case '#': arg.mode = ArgMode::constant; break;
      default: throw ParseError(a.line, a.column, "mode argument must be +type, -type or #type");
    }
    m.args.push_back(arg);
  }
  return m;
}

}  // namespace

ModeSet parse_modes(std::string_view text) {
  ModeSet set;
  bool have_head = false;
  Parser parser(text);
  while (!parser.done()) {
    PClause c = parser.clause();
    const PTerm* decl = nullptr;
    if (c.directive && c.body.size() == 1) decl = &c.body[0];
    if (!c.directive && c.body.empty()) decl = &*c.head;
    if (!decl || (decl->name != "modeh" && decl->name != "modeb") || decl->prefix)
      throw ParseError(c.line, c.column, "expected modeh(...) or modeb(...)");
    if (decl->args.empty() || decl->args.size() > 2)
      throw ParseError(decl->line, decl->column, "mode declaration takes a template and an optional recall");
    ModeDecl m = to_mode(decl->args.back());
    if (decl->name == "modeh") {
      if (have_head) throw ParseError(c.line, c.column, "more than one modeh declaration");
      if (m.args.empty()) throw ParseError(c.line, c.column, "head mode needs an argument");
      for (const ModeArg& a : m.args)
        if (a.mode != ArgMode::input) throw ParseError(c.line, c.column, "head mode arguments must be +type");
      set.head = m;
      have_head = true;
    } else {
      set.body.push_back(m);
    }
  }
  if (!have_head) throw ParseError(1, 1, "no modeh declaration");
  return set;
}

}  // namespace relexp::ilp
