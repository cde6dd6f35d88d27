#include "hc/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hc {

// ---------------------------------------------------------------------------
// Hybrid constructors

namespace {

Hybrid make_h(HybridKind kind, std::string name = {}, int nominal = 0, Hybrid l = nullptr,
              Hybrid r = nullptr) {
  return std::make_shared<const HybridNode>(
      HybridNode{kind, std::move(name), nominal, std::move(l), std::move(r)});
}

}  // namespace

namespace hy {
Hybrid truth() { return make_h(HybridKind::True); }
Hybrid falsity() { return make_h(HybridKind::False); }
Hybrid atom(std::string p) { return make_h(HybridKind::Atom, std::move(p)); }
Hybrid var(std::string x) { return make_h(HybridKind::Var, std::move(x)); }
Hybrid nominal(int i) {
  if (i < 1) throw Error("nominal index must be positive");
  return make_h(HybridKind::Nominal, {}, i);
}
Hybrid neg(Hybrid f) { return make_h(HybridKind::Not, {}, 0, std::move(f)); }
Hybrid conj(Hybrid f, Hybrid g) { return make_h(HybridKind::And, {}, 0, std::move(f), std::move(g)); }
Hybrid disj(Hybrid f, Hybrid g) { return make_h(HybridKind::Or, {}, 0, std::move(f), std::move(g)); }
Hybrid box(Hybrid f) { return make_h(HybridKind::Box, {}, 0, std::move(f)); }
Hybrid dia(Hybrid f) { return make_h(HybridKind::Dia, {}, 0, std::move(f)); }
Hybrid boxinv(Hybrid f) { return make_h(HybridKind::BoxInv, {}, 0, std::move(f)); }
Hybrid diainv(Hybrid f) { return make_h(HybridKind::DiaInv, {}, 0, std::move(f)); }
Hybrid down(std::string x, Hybrid f) { return make_h(HybridKind::Down, std::move(x), 0, std::move(f)); }
Hybrid at(std::string x, Hybrid f) { return make_h(HybridKind::At, std::move(x), 0, std::move(f)); }
Hybrid at_nominal(int i, Hybrid f) {
  if (i < 1) throw Error("nominal index must be positive");
  return make_h(HybridKind::At, {}, i, std::move(f));
}
}  // namespace hy

bool equal(const Hybrid& f, const Hybrid& g) {
  if (f == g) return true;
  if (!f || !g) return false;
  return f->kind == g->kind && f->name == g->name && f->nominal == g->nominal &&
         equal(f->left, g->left) && equal(f->right, g->right);
}

// ---------------------------------------------------------------------------
// First-order constructors

std::string Term::to_string() const {
  return is_constant ? "c" + std::to_string(constant) : var;
}

namespace {

void add_term_var(std::vector<std::string>& out, const Term& t) {
  if (!t.is_constant) out.push_back(t.var);
}

Formula finish(FoNode n) {
  std::vector<std::string> fv;
  switch (n.kind) {
    case FoKind::True:
    case FoKind::False:
      break;
    case FoKind::Atom:
    case FoKind::Eq:
      for (const auto& t : n.args) add_term_var(fv, t);
      break;
    case FoKind::Not:
      fv = n.left->free_vars;
      n.rank = n.left->rank;
      break;
    case FoKind::And:
    case FoKind::Or:
      fv = n.left->free_vars;
      fv.insert(fv.end(), n.right->free_vars.begin(), n.right->free_vars.end());
      n.rank = std::max(n.left->rank, n.right->rank);
      break;
    case FoKind::Forall:
    case FoKind::Exists:
    case FoKind::BoundedForall:
    case FoKind::BoundedExists:
    case FoKind::CountExists: {
      fv = n.left->free_vars;
      for (const auto& g : n.guard) add_term_var(fv, g.from);
      std::erase(fv, n.var);
      n.rank = n.left->rank + 1;
      break;
    }
  }
  std::sort(fv.begin(), fv.end());
  fv.erase(std::unique(fv.begin(), fv.end()), fv.end());
  n.free_vars = std::move(fv);
  return std::make_shared<const FoNode>(std::move(n));
}

FoNode node(FoKind k) {
  FoNode n;
  n.kind = k;
  return n;
}

Formula guarded(FoKind kind, std::string x, std::vector<GuardAtom> guard, Formula body, int count) {
  if (guard.empty()) throw Error("guarded quantifier needs at least one guard atom");
  if (x.empty()) throw Error("quantified variable has an empty name");
  FoNode n = node(kind);
  n.var = std::move(x);
  n.guard = std::move(guard);
  n.left = std::move(body);
  n.count = count;
  return finish(std::move(n));
}

}  // namespace

namespace fo {
Formula truth() { return finish(node(FoKind::True)); }
Formula falsity() { return finish(node(FoKind::False)); }
Formula atom(std::string rel, std::vector<Term> args) {
  if (args.empty()) throw Error("atom '" + rel + "' has no arguments");
  FoNode n = node(FoKind::Atom);
  n.rel = std::move(rel);
  n.args = std::move(args);
  return finish(std::move(n));
}
Formula eq(Term t, Term u) {
  FoNode n = node(FoKind::Eq);
  n.args = {std::move(t), std::move(u)};
  return finish(std::move(n));
}
Formula neg(Formula f) {
  FoNode n = node(FoKind::Not);
  n.left = std::move(f);
  return finish(std::move(n));
}
Formula conj(Formula f, Formula g) {
  FoNode n = node(FoKind::And);
  n.left = std::move(f);
  n.right = std::move(g);
  return finish(std::move(n));
}
Formula disj(Formula f, Formula g) {
  FoNode n = node(FoKind::Or);
  n.left = std::move(f);
  n.right = std::move(g);
  return finish(std::move(n));
}
Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return truth();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}
Formula disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return falsity();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}
Formula forall(std::string x, Formula body) {
  FoNode n = node(FoKind::Forall);
  n.var = std::move(x);
  n.left = std::move(body);
  return finish(std::move(n));
}
Formula exists(std::string x, Formula body) {
  FoNode n = node(FoKind::Exists);
  n.var = std::move(x);
  n.left = std::move(body);
  return finish(std::move(n));
}
Formula bounded_forall(std::string x, std::vector<GuardAtom> guard, Formula body) {
  return guarded(FoKind::BoundedForall, std::move(x), std::move(guard), std::move(body), 0);
}
Formula bounded_exists(std::string x, std::vector<GuardAtom> guard, Formula body) {
  return guarded(FoKind::BoundedExists, std::move(x), std::move(guard), std::move(body), 0);
}
Formula count_exists(int threshold, std::string x, std::vector<GuardAtom> guard, Formula body) {
  if (threshold < 1) throw Error("counting threshold must be at least 1");
  return guarded(FoKind::CountExists, std::move(x), std::move(guard), std::move(body), threshold);
}
Formula exactly(int i, std::string x, std::vector<GuardAtom> guard, Formula body) {
  Formula more = count_exists(i + 1, x, guard, body);
  if (i == 0) return neg(more);
  return conj(count_exists(i, std::move(x), std::move(guard), std::move(body)), neg(more));
}
}  // namespace fo

bool equal(const Formula& f, const Formula& g) {
  if (f == g) return true;
  if (!f || !g) return false;
  return f->kind == g->kind && f->rel == g->rel && f->args == g->args && f->var == g->var &&
         f->guard == g->guard && f->count == g->count && equal(f->left, g->left) &&
         equal(f->right, g->right);
}

Assignment& Assignment::bind(std::string var, int element) {
  for (auto& [name, value] : entries_)
    if (name == var) {
      value = element;
      return *this;
    }
  entries_.emplace_back(std::move(var), element);
  return *this;
}

std::optional<int> Assignment::lookup(std::string_view var) const {
  for (const auto& [name, value] : entries_)
    if (name == var) return value;
  return std::nullopt;
}

std::string predicate_for_atom(std::string_view atom) {
  std::string p(atom);
  if (!p.empty()) p[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(p[0])));
  return p;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Dot, Amp, Bar, Bang, At, Eq, Ge, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < s.size() && s[i + 1] == b; };
    if (two('>', '=')) {
      out.push_back({Tok::Ge, ">=", start});
      i += 2;
      continue;
    }
    if (two('-', '>')) {
      out.push_back({Tok::Arrow, "->", start});
      i += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Dot; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case '!': k = Tok::Bang; break;
      case '@': k = Tok::At; break;
      case '=': k = Tok::Eq; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

std::optional<int> constant_index(std::string_view id) {
  if (id.size() < 2 || id[0] != 'c') return std::nullopt;
  int v = 0;
  for (std::size_t i = 1; i < id.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return std::nullopt;
    if (v > 100000) return std::nullopt;
    v = v * 10 + (id[i] - '0');
  }
  return v;
}

bool is_world_variable(std::string_view id) {
  return !id.empty() && std::string_view("xyzuvw").find(id[0]) != std::string_view::npos;
}

const std::set<std::string, std::less<>> kHybridKeywords = {"box", "dia", "boxinv", "diainv",
                                                             "down", "true", "false"};
const std::set<std::string, std::less<>> kFoKeywords = {"forall", "exists", "true", "false"};

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) : toks_(lex(text)) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(i_++, toks_.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++i_;
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return next();
  }
  bool accept_word(std::string_view w) {
    if (peek().kind == Tok::Ident && peek().text == w) {
      ++i_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw ParseError(what + (t.kind == Tok::End ? " but found end of input"
                                                : " but found '" + t.text + "'"),
                     t.pos);
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Hybrid parser

class HybridParser {
 public:
  HybridParser(std::string_view text, const ParseOptions& opts) : ts_(text), opts_(opts) {}

  Hybrid parse() {
    Hybrid f = parse_or();
    if (ts_.peek().kind != Tok::End) ts_.fail("expected end of formula");
    return f;
  }

 private:
  Hybrid parse_or() {
    Hybrid f = parse_and();
    while (ts_.accept(Tok::Bar)) f = hy::disj(f, parse_and());
    return f;
  }
  Hybrid parse_and() {
    Hybrid f = parse_unary();
    while (ts_.accept(Tok::Amp)) f = hy::conj(f, parse_unary());
    return f;
  }

  std::string parse_bound_name(const char* ctx) {
    const Token& t = ts_.peek();
    if (t.kind != Tok::Ident || !is_world_variable(t.text) || kHybridKeywords.count(t.text))
      ts_.fail(std::string("expected a world variable after ") + ctx);
    return ts_.next().text;
  }

  void check_variable(const Token& t) {
    if (!opts_.closed) return;
    if (std::find(bound_.begin(), bound_.end(), t.text) == bound_.end())
      throw ScopeError("unbound world variable '" + t.text + "' at position " +
                       std::to_string(t.pos));
  }

  int check_nominal(const Token& t, int idx) {
    if (idx < 1) throw ParseError("nominal index must be positive", t.pos);
    if (opts_.max_constant && idx > *opts_.max_constant)
      throw ScopeError("nominal '" + t.text + "' exceeds the " +
                       std::to_string(*opts_.max_constant) + " available basepoints");
    return idx;
  }

  Hybrid parse_unary() {
    if (ts_.accept(Tok::Bang)) return hy::neg(parse_unary());
    if (ts_.accept(Tok::At)) {
      const Token& t = ts_.peek();
      if (t.kind == Tok::Ident) {
        if (auto idx = constant_index(t.text)) {
          const Token tok = ts_.next();
          int i = check_nominal(tok, *idx);
          return hy::at_nominal(i, parse_unary());
        }
        if (is_world_variable(t.text) && !kHybridKeywords.count(t.text)) {
          const Token tok = ts_.next();
          check_variable(tok);
          return hy::at(tok.text, parse_unary());
        }
      }
      ts_.fail("expected a world variable or nominal after '@'");
    }
    if (ts_.peek().kind == Tok::Ident) {
      const std::string& w = ts_.peek().text;
      if (w == "box") return ts_.next(), hy::box(parse_unary());
      if (w == "dia") return ts_.next(), hy::dia(parse_unary());
      if (w == "boxinv") return ts_.next(), hy::boxinv(parse_unary());
      if (w == "diainv") return ts_.next(), hy::diainv(parse_unary());
      if (w == "down") {
        ts_.next();
        std::string x = parse_bound_name("'down'");
        ts_.expect(Tok::Dot, "'.' after bound variable");
        bound_.push_back(x);
        Hybrid body = parse_unary();
        bound_.pop_back();
        return hy::down(std::move(x), std::move(body));
      }
    }
    return parse_primary();
  }

  Hybrid parse_primary() {
    if (ts_.accept(Tok::LParen)) {
      Hybrid f = parse_or();
      ts_.expect(Tok::RParen, "')'");
      return f;
    }
    const Token& t = ts_.peek();
    if (t.kind != Tok::Ident) ts_.fail("expected a formula");
    const Token tok = ts_.next();
    if (tok.text == "true") return hy::truth();
    if (tok.text == "false") return hy::falsity();
    if (kHybridKeywords.count(tok.text)) throw ParseError("misplaced keyword '" + tok.text + "'", tok.pos);
    if (auto idx = constant_index(tok.text)) return hy::nominal(check_nominal(tok, *idx));
    if (is_world_variable(tok.text)) {
      check_variable(tok);
      return hy::var(tok.text);
    }
    if (!std::islower(static_cast<unsigned char>(tok.text[0])))
      throw ParseError("propositional atoms must start with a lowercase letter: '" + tok.text + "'",
                       tok.pos);
    return hy::atom(tok.text);
  }

  TokenStream ts_;
  ParseOptions opts_;
  std::vector<std::string> bound_;
};

// ---------------------------------------------------------------------------
// First-order parser

// A guard-shaped item for bound variable x: R(t,x) or R(x,t) with t != x, or
// a disjunction of such atoms.
std::optional<std::vector<GuardAtom>> as_guard(const Formula& f, const std::string& x) {
  const Term bx = Term::variable(x);
  if (f->kind == FoKind::Atom && f->args.size() == 2) {
    if (f->args[1] == bx && !(f->args[0] == bx))
      return std::vector<GuardAtom>{GuardAtom{f->rel, f->args[0], false}};
    if (f->args[0] == bx && !(f->args[1] == bx))
      return std::vector<GuardAtom>{GuardAtom{f->rel, f->args[1], true}};
    return std::nullopt;
  }
  if (f->kind == FoKind::Or) {
    auto l = as_guard(f->left, x);
    auto r = as_guard(f->right, x);
    if (!l || !r) return std::nullopt;
    l->insert(l->end(), r->begin(), r->end());
    return l;
  }
  return std::nullopt;
}

class FoParser {
 public:
  FoParser(std::string_view text, const ParseOptions& opts) : ts_(text), opts_(opts) {}

  Formula parse() {
    Formula f = parse_or();
    if (ts_.peek().kind != Tok::End) ts_.fail("expected end of formula");
    return f;
  }

 private:
  Formula parse_or() {
    Formula f = parse_and();
    while (ts_.accept(Tok::Bar)) f = fo::disj(f, parse_and());
    return f;
  }
  Formula parse_and() {
    Formula f = parse_unary();
    while (ts_.accept(Tok::Amp)) f = fo::conj(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (ts_.accept(Tok::Bang)) return fo::neg(parse_unary());
    if (ts_.peek().kind == Tok::Ident) {
      if (ts_.peek().text == "forall") return parse_forall();
      if (ts_.peek().text == "exists") return parse_exists();
    }
    return parse_primary();
  }

  std::string parse_quantified_name() {
    const Token& t = ts_.peek();
    if (t.kind != Tok::Ident || kFoKeywords.count(t.text) || constant_index(t.text))
      ts_.fail("expected a variable name");
    return ts_.next().text;
  }

  Formula parse_forall() {
    ts_.next();
    std::string x = parse_quantified_name();
    bound_.push_back(x);
    Formula out;
    if (ts_.accept(Tok::LParen)) {
      Formula f = parse_or();
      if (ts_.peek().kind == Tok::Arrow) {
        const std::size_t pos = ts_.next().pos;
        auto guard = as_guard(f, x);
        if (!guard) throw ParseError("left side of '->' is not a guard on '" + x + "'", pos);
        Formula body = parse_or();
        ts_.expect(Tok::RParen, "')'");
        out = fo::bounded_forall(x, std::move(*guard), body);
      } else {
        ts_.expect(Tok::RParen, "')' or '->'");
        out = fo::forall(x, f);
      }
    } else {
      out = fo::forall(x, parse_unary());
    }
    bound_.pop_back();
    return out;
  }

  Formula parse_exists() {
    const std::size_t start = ts_.next().pos;
    int threshold = 0;
    if (ts_.accept(Tok::Ge)) {
      const Token& n = ts_.expect(Tok::Number, "a counting threshold");
      threshold = std::stoi(n.text);
      if (threshold < 1) throw ParseError("counting threshold must be at least 1", n.pos);
    }
    std::string x = parse_quantified_name();
    bound_.push_back(x);
    Formula out;
    if (ts_.accept(Tok::LParen)) {
      // Flat &-chain at the top of the parentheses; a leading guard makes the
      // quantifier bounded.
      std::vector<Formula> items{parse_unary()};
      while (ts_.accept(Tok::Amp)) items.push_back(parse_unary());
      bool pure = true;
      Formula f = fo::conj_all(items);
      while (ts_.accept(Tok::Bar)) {
        pure = false;
        f = fo::disj(f, parse_and());
      }
      ts_.expect(Tok::RParen, "')'");
      std::optional<std::vector<GuardAtom>> guard;
      if (pure) guard = as_guard(items.front(), x);
      if (guard) {
        Formula body = fo::conj_all(std::vector<Formula>(items.begin() + 1, items.end()));
        out = threshold ? fo::count_exists(threshold, x, std::move(*guard), body)
                        : fo::bounded_exists(x, std::move(*guard), body);
      } else {
        if (threshold) throw ParseError("counting quantifier requires a guard", start);
        out = fo::exists(x, f);
      }
    } else {
      if (threshold) throw ParseError("counting quantifier requires a guard", start);
      out = fo::exists(x, parse_unary());
    }
    bound_.pop_back();
    return out;
  }

  Term parse_term() {
    const Token& t = ts_.peek();
    if (t.kind != Tok::Ident || kFoKeywords.count(t.text)) ts_.fail("expected a term");
    const Token tok = ts_.next();
    if (auto idx = constant_index(tok.text)) {
      if (*idx < 1) throw ParseError("constant index must be positive", tok.pos);
      if (opts_.max_constant && *idx > *opts_.max_constant)
        throw ScopeError("constant '" + tok.text + "' exceeds the " +
                         std::to_string(*opts_.max_constant) + " available basepoints");
      return Term::constant_symbol(*idx);
    }
    if (opts_.closed && std::find(bound_.begin(), bound_.end(), tok.text) == bound_.end())
      throw ScopeError("unbound variable '" + tok.text + "' at position " + std::to_string(tok.pos));
    return Term::variable(tok.text);
  }

  Formula parse_primary() {
    if (ts_.accept(Tok::LParen)) {
      Formula f = parse_or();
      ts_.expect(Tok::RParen, "')'");
      return f;
    }
    const Token& t = ts_.peek();
    if (t.kind != Tok::Ident) ts_.fail("expected a formula");
    if (t.text == "true") return ts_.next(), fo::truth();
    if (t.text == "false") return ts_.next(), fo::falsity();
    if (ts_.peek(1).kind == Tok::LParen) {
      std::string rel = ts_.next().text;
      ts_.next();
      std::vector<Term> args{parse_term()};
      while (ts_.accept(Tok::Comma)) args.push_back(parse_term());
      ts_.expect(Tok::RParen, "')' or ','");
      return fo::atom(std::move(rel), std::move(args));
    }
    Term lhs = parse_term();
    ts_.expect(Tok::Eq, "'=' or '('");
    Term rhs = parse_term();
    return fo::eq(std::move(lhs), std::move(rhs));
  }

  TokenStream ts_;
  ParseOptions opts_;
  std::vector<std::string> bound_;
};

// ---------------------------------------------------------------------------
// Printers

enum Level { kOr = 0, kAnd = 1, kUnary = 2 };

void print_h(std::ostream& os, const Hybrid& f, Level ctx) {
  switch (f->kind) {
    case HybridKind::True: os << "true"; return;
    case HybridKind::False: os << "false"; return;
    case HybridKind::Atom:
    case HybridKind::Var: os << f->name; return;
    case HybridKind::Nominal: os << 'c' << f->nominal; return;
    case HybridKind::Not: os << '!'; print_h(os, f->left, kUnary); return;
    case HybridKind::Box: os << "box "; print_h(os, f->left, kUnary); return;
    case HybridKind::Dia: os << "dia "; print_h(os, f->left, kUnary); return;
    case HybridKind::BoxInv: os << "boxinv "; print_h(os, f->left, kUnary); return;
    case HybridKind::DiaInv: os << "diainv "; print_h(os, f->left, kUnary); return;
    case HybridKind::Down: os << "down " << f->name << ". "; print_h(os, f->left, kUnary); return;
    case HybridKind::At:
      os << '@';
      if (f->name.empty()) os << 'c' << f->nominal;
      else os << f->name;
      os << ' ';
      print_h(os, f->left, kUnary);
      return;
    case HybridKind::And:
    case HybridKind::Or: {
      const bool is_and = f->kind == HybridKind::And;
      const Level own = is_and ? kAnd : kOr;
      const bool paren = ctx > own;
      if (paren) os << '(';
      print_h(os, f->left, own);
      os << (is_and ? " & " : " | ");
      print_h(os, f->right, static_cast<Level>(own + 1));
      if (paren) os << ')';
      return;
    }
  }
}

std::string guard_atom_text(const GuardAtom& g, const std::string& x) {
  return g.backward ? g.rel + "(" + x + "," + g.from.to_string() + ")"
                    : g.rel + "(" + g.from.to_string() + "," + x + ")";
}

std::string guard_text(const std::vector<GuardAtom>& guard, const std::string& x) {
  if (guard.size() == 1) return guard_atom_text(guard.front(), x);
  std::string out = "(";
  for (std::size_t i = 0; i < guard.size(); ++i) {
    if (i) out += " | ";
    out += guard_atom_text(guard[i], x);
  }
  return out + ")";
}

Formula leftmost_chain_item(Formula f) {
  while (f->kind == FoKind::And) f = f->left;
  return f;
}

void print_f(std::ostream& os, const Formula& f, Level ctx) {
  switch (f->kind) {
    case FoKind::True: os << "true"; return;
    case FoKind::False: os << "false"; return;
    case FoKind::Atom:
      os << f->rel << '(';
      for (std::size_t i = 0; i < f->args.size(); ++i) os << (i ? "," : "") << f->args[i].to_string();
      os << ')';
      return;
    case FoKind::Eq:
      os << f->args[0].to_string() << " = " << f->args[1].to_string();
      return;
    case FoKind::Not: os << '!'; print_f(os, f->left, kUnary); return;
    case FoKind::And:
    case FoKind::Or: {
      const bool is_and = f->kind == FoKind::And;
      const Level own = is_and ? kAnd : kOr;
      const bool paren = ctx > own;
      if (paren) os << '(';
      print_f(os, f->left, own);
      os << (is_and ? " & " : " | ");
      print_f(os, f->right, static_cast<Level>(own + 1));
      if (paren) os << ')';
      return;
    }
    case FoKind::Forall:
    case FoKind::Exists: {
      os << (f->kind == FoKind::Forall ? "forall " : "exists ") << f->var << ' ';
      const Formula& body = f->left;
      const bool unary_body = body->kind != FoKind::And && body->kind != FoKind::Or;
      if (unary_body) {
        print_f(os, body, kUnary);
      } else if (f->kind == FoKind::Exists && body->kind == FoKind::And &&
                 as_guard(leftmost_chain_item(body), f->var)) {
        os << "((";
        print_f(os, body, kOr);
        os << "))";
      } else {
        os << '(';
        print_f(os, body, kOr);
        os << ')';
      }
      return;
    }
    case FoKind::BoundedForall:
      os << "forall " << f->var << " (" << guard_text(f->guard, f->var) << " -> ";
      print_f(os, f->left, kOr);
      os << ')';
      return;
    case FoKind::BoundedExists:
    case FoKind::CountExists:
      os << "exists";
      if (f->kind == FoKind::CountExists) os << ">=" << f->count;
      os << ' ' << f->var << " (" << guard_text(f->guard, f->var) << " & ";
      print_f(os, f->left, kAnd);
      os << ')';
      return;
  }
}

}  // namespace

Hybrid parse_hybrid(std::string_view text, const ParseOptions& opts) {
  return HybridParser(text, opts).parse();
}

Formula parse_fo(std::string_view text, const ParseOptions& opts) {
  return FoParser(text, opts).parse();
}

std::string to_string(const Hybrid& f) {
  std::ostringstream os;
  print_h(os, f, kOr);
  return os.str();
}

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print_f(os, f, kOr);
  return os.str();
}

// ---------------------------------------------------------------------------
// Measures

int hybrid_depth(const Hybrid& f) {
  switch (f->kind) {
    case HybridKind::True:
    case HybridKind::False:
    case HybridKind::Atom:
    case HybridKind::Var:
    case HybridKind::Nominal:
      return 0;
    case HybridKind::Not:
    case HybridKind::Down:
    case HybridKind::At:
      return hybrid_depth(f->left);
    case HybridKind::And:
    case HybridKind::Or:
      return std::max(hybrid_depth(f->left), hybrid_depth(f->right));
    case HybridKind::Dia:
    case HybridKind::DiaInv:
      if (f->left->kind == HybridKind::Var) return 0;
      [[fallthrough]];
    case HybridKind::Box:
    case HybridKind::BoxInv:
      return 1 + hybrid_depth(f->left);
  }
  return 0;
}

int quantifier_rank(const Formula& f) { return f->rank; }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class FoEvaluator {
 public:
  FoEvaluator(const Structure& s) : s_(s) {}

  bool eval(const Formula& f, std::vector<std::pair<std::string, int>>& env) {
    std::vector<int> key;
    key.reserve(f->free_vars.size());
    for (const auto& v : f->free_vars) key.push_back(value_of(v, env));
    auto mk = std::make_pair(f.get(), key);
    if (auto it = memo_.find(mk); it != memo_.end()) return it->second;
    const bool r = compute(f, env);
    memo_.emplace(std::move(mk), r);
    return r;
  }

 private:
  int value_of(const std::string& v, const std::vector<std::pair<std::string, int>>& env) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == v) return it->second;
    throw ScopeError("unbound variable '" + v + "'");
  }

  int term(const Term& t, const std::vector<std::pair<std::string, int>>& env) const {
    if (!t.is_constant) return value_of(t.var, env);
    if (t.constant < 1 || t.constant > static_cast<int>(s_.basepoints().size()))
      throw ScopeError("constant c" + std::to_string(t.constant) + " has no basepoint");
    return s_.basepoints()[t.constant - 1];
  }

  bool guard_holds(const std::vector<GuardAtom>& guard, int y,
                   const std::vector<std::pair<std::string, int>>& env) const {
    for (const auto& g : guard) {
      const int t = term(g.from, env);
      if (g.backward ? s_.edge(g.rel, y, t) : s_.edge(g.rel, t, y)) return true;
    }
    return false;
  }

  void require_relation(const std::string& rel, std::size_t arity) const {
    auto it = s_.signature().relations.find(rel);
    if (it == s_.signature().relations.end())
      throw SignatureMismatch("relation '" + rel + "' not in signature");
    if (static_cast<std::size_t>(it->second) != arity)
      throw SignatureMismatch("relation '" + rel + "' used with arity " + std::to_string(arity));
  }

  bool compute(const Formula& f, std::vector<std::pair<std::string, int>>& env) {
    switch (f->kind) {
      case FoKind::True: return true;
      case FoKind::False: return false;
      case FoKind::Atom: {
        require_relation(f->rel, f->args.size());
        Tuple t;
        for (const auto& a : f->args) t.push_back(term(a, env));
        return s_.holds(f->rel, t);
      }
      case FoKind::Eq: return term(f->args[0], env) == term(f->args[1], env);
      case FoKind::Not: return !eval(f->left, env);
      case FoKind::And: return eval(f->left, env) && eval(f->right, env);
      case FoKind::Or: return eval(f->left, env) || eval(f->right, env);
      default: break;
    }
    for (const auto& g : f->guard) require_relation(g.rel, 2);
    const bool universal = f->kind == FoKind::Forall || f->kind == FoKind::BoundedForall;
    const bool has_guard = !f->guard.empty();
    const int need = f->kind == FoKind::CountExists ? f->count : 1;
    int found = 0;
    for (int y = 0; y < s_.size(); ++y) {
      if (has_guard && !guard_holds(f->guard, y, env)) continue;
      env.emplace_back(f->var, y);
      const bool b = eval(f->left, env);
      env.pop_back();
      if (universal) {
        if (!b) return false;
      } else if (b && ++found >= need) {
        return true;
      }
    }
    return universal;
  }

  const Structure& s_;
  std::map<std::pair<const FoNode*, std::vector<int>>, bool> memo_;
};

class HybridEvaluator {
 public:
  HybridEvaluator(const Structure& s, std::optional<std::string> rel) : s_(s), rel_(std::move(rel)) {}

  bool eval(const Hybrid& f, int w, std::map<std::string, int>& env) {
    switch (f->kind) {
      case HybridKind::True: return true;
      case HybridKind::False: return false;
      case HybridKind::Atom: {
        const std::string p = predicate_for_atom(f->name);
        auto it = s_.signature().relations.find(p);
        if (it == s_.signature().relations.end() || it->second != 1)
          throw SignatureMismatch("atom '" + f->name + "' has no unary predicate '" + p + "'");
        return s_.holds(p, Tuple{w});
      }
      case HybridKind::Var: return w == lookup(f->name, env);
      case HybridKind::Nominal: return w == nominal(f->nominal);
      case HybridKind::Not: return !eval(f->left, w, env);
      case HybridKind::And: return eval(f->left, w, env) && eval(f->right, w, env);
      case HybridKind::Or: return eval(f->left, w, env) || eval(f->right, w, env);
      case HybridKind::Box:
      case HybridKind::Dia:
      case HybridKind::BoxInv:
      case HybridKind::DiaInv: {
        const std::string& e = transition();
        const bool backward = f->kind == HybridKind::BoxInv || f->kind == HybridKind::DiaInv;
        const bool universal = f->kind == HybridKind::Box || f->kind == HybridKind::BoxInv;
        for (int v = 0; v < s_.size(); ++v) {
          if (!(backward ? s_.edge(e, v, w) : s_.edge(e, w, v))) continue;
          const bool b = eval(f->left, v, env);
          if (universal && !b) return false;
          if (!universal && b) return true;
        }
        return universal;
      }
      case HybridKind::Down: {
        auto saved = env.find(f->name) != env.end() ? std::optional<int>(env[f->name]) : std::nullopt;
        env[f->name] = w;
        const bool b = eval(f->left, w, env);
        if (saved) env[f->name] = *saved;
        else env.erase(f->name);
        return b;
      }
      case HybridKind::At: {
        const int target = f->name.empty() ? nominal(f->nominal) : lookup(f->name, env);
        return eval(f->left, target, env);
      }
    }
    return false;
  }

 private:
  int lookup(const std::string& x, const std::map<std::string, int>& env) const {
    auto it = env.find(x);
    if (it == env.end()) throw ScopeError("unbound world variable '" + x + "'");
    return it->second;
  }
  int nominal(int i) const {
    if (i < 1 || i > static_cast<int>(s_.basepoints().size()))
      throw ScopeError("nominal c" + std::to_string(i) + " has no basepoint");
    return s_.basepoints()[i - 1];
  }
  const std::string& transition() {
    if (!rel_) rel_ = s_.signature().transition();
    return *rel_;
  }

  const Structure& s_;
  std::optional<std::string> rel_;
};

}  // namespace

bool eval_fo(const Formula& f, const Structure& s, const Assignment& env) {
  std::vector<std::pair<std::string, int>> frame = env.bindings();
  for (const auto& [name, value] : frame)
    if (value < 0 || value >= s.size())
      throw ScopeError("variable '" + name + "' assigned outside the universe");
  return FoEvaluator(s).eval(f, frame);
}

bool eval_hybrid(const Hybrid& f, const Structure& s, const std::optional<std::string>& transition) {
  if (s.basepoints().empty()) throw ScopeError("hybrid evaluation needs a basepoint");
  std::map<std::string, int> env;
  return HybridEvaluator(s, transition).eval(f, s.basepoints().front(), env);
}

bool is_bounded(const Formula& f, const Signature& sig, bool allow_backward) {
  switch (f->kind) {
    case FoKind::True:
    case FoKind::False:
    case FoKind::Atom:
    case FoKind::Eq:
      return true;
    case FoKind::Not:
      return is_bounded(f->left, sig, allow_backward);
    case FoKind::And:
    case FoKind::Or:
      return is_bounded(f->left, sig, allow_backward) && is_bounded(f->right, sig, allow_backward);
    case FoKind::Forall:
    case FoKind::Exists:
      return false;
    case FoKind::BoundedForall:
    case FoKind::BoundedExists:
    case FoKind::CountExists: {
      if (f->guard.size() != 1) return false;
      const GuardAtom& g = f->guard.front();
      if (!sig.transitions.count(g.rel)) return false;
      if (g.from == Term::variable(f->var)) return false;
      if (g.backward && !allow_backward) return false;
      return is_bounded(f->left, sig, allow_backward);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Standard translation

namespace {

void collect_hybrid_names(const Hybrid& f, std::set<std::string>& out) {
  if (!f) return;
  if (!f->name.empty()) out.insert(f->name);
  collect_hybrid_names(f->left, out);
  collect_hybrid_names(f->right, out);
}

void collect_fo_names(const Formula& f, std::set<std::string>& out) {
  if (!f) return;
  for (const auto& t : f->args)
    if (!t.is_constant) out.insert(t.var);
  for (const auto& g : f->guard)
    if (!g.from.is_constant) out.insert(g.from.var);
  if (!f->var.empty()) out.insert(f->var);
  collect_fo_names(f->left, out);
  collect_fo_names(f->right, out);
}

class NameGen {
 public:
  NameGen(std::set<std::string> used, std::vector<std::string> seeds, std::string stem)
      : used_(std::move(used)), seeds_(std::move(seeds)), stem_(std::move(stem)) {}

  std::string fresh() {
    while (true) {
      std::string c = next_ < seeds_.size() ? seeds_[next_] : stem_ + std::to_string(next_ - seeds_.size() + 1);
      ++next_;
      if (used_.insert(c).second) return c;
    }
  }

 private:
  std::set<std::string> used_;
  std::vector<std::string> seeds_;
  std::string stem_;
  std::size_t next_ = 0;
};

Formula st(const Hybrid& f, const Term& at, const std::map<std::string, Term>& sub,
           const std::string& rel, NameGen& names) {
  auto resolve = [&](const std::string& x) {
    auto it = sub.find(x);
    return it == sub.end() ? Term::variable(x) : it->second;
  };
  switch (f->kind) {
    case HybridKind::True: return fo::truth();
    case HybridKind::False: return fo::falsity();
    case HybridKind::Atom: return fo::atom(predicate_for_atom(f->name), {at});
    case HybridKind::Var: return fo::eq(at, resolve(f->name));
    case HybridKind::Nominal: return fo::eq(at, Term::constant_symbol(f->nominal));
    case HybridKind::Not: return fo::neg(st(f->left, at, sub, rel, names));
    case HybridKind::And:
      return fo::conj(st(f->left, at, sub, rel, names), st(f->right, at, sub, rel, names));
    case HybridKind::Or:
      return fo::disj(st(f->left, at, sub, rel, names), st(f->right, at, sub, rel, names));
    case HybridKind::Box:
    case HybridKind::Dia:
    case HybridKind::BoxInv:
    case HybridKind::DiaInv: {
      const std::string y = names.fresh();
      const bool backward = f->kind == HybridKind::BoxInv || f->kind == HybridKind::DiaInv;
      std::vector<GuardAtom> guard{GuardAtom{rel, at, backward}};
      Formula body = st(f->left, Term::variable(y), sub, rel, names);
      if (f->kind == HybridKind::Box || f->kind == HybridKind::BoxInv)
        return fo::bounded_forall(y, std::move(guard), body);
      return fo::bounded_exists(y, std::move(guard), body);
    }
    case HybridKind::Down: {
      auto inner = sub;
      inner.insert_or_assign(f->name, at);
      return st(f->left, at, inner, rel, names);
    }
    case HybridKind::At: {
      const Term target = f->name.empty() ? Term::constant_symbol(f->nominal) : resolve(f->name);
      return st(f->left, target, sub, rel, names);
    }
  }
  return fo::falsity();
}

}  // namespace

Formula standard_translation(const Hybrid& f, const std::string& anchor, const std::string& transition) {
  std::set<std::string> used{anchor};
  collect_hybrid_names(f, used);
  NameGen names(std::move(used), {"y", "z"}, "y");
  return st(f, Term::variable(anchor), {}, transition, names);
}

// ---------------------------------------------------------------------------
// Guard normalization

namespace {

Formula guard_formula(const GuardAtom& g, const std::string& x) {
  return g.backward ? fo::atom(g.rel, {Term::variable(x), g.from})
                    : fo::atom(g.rel, {g.from, Term::variable(x)});
}

// Calls f on every vector of `parts` non-negative integers summing to `total`.
void compositions(int total, int parts, std::vector<int>& cur,
                  const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == parts - 1) {
    cur.push_back(total);
    f(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions(total - v, parts, cur, f);
    cur.pop_back();
  }
}

class GuardNormalizer {
 public:
  Formula run(const Formula& f) {
    if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
    Formula out = rewrite(f);
    memo_.emplace(f.get(), out);
    keep_.push_back(f);
    return out;
  }

 private:
  Formula rewrite(const Formula& f) {
    switch (f->kind) {
      case FoKind::True:
      case FoKind::False:
      case FoKind::Atom:
      case FoKind::Eq:
        return f;
      case FoKind::Not: {
        Formula l = run(f->left);
        return l == f->left ? f : fo::neg(l);
      }
      case FoKind::And:
      case FoKind::Or: {
        Formula l = run(f->left);
        Formula r = run(f->right);
        if (l == f->left && r == f->right) return f;
        return f->kind == FoKind::And ? fo::conj(l, r) : fo::disj(l, r);
      }
      case FoKind::Forall: {
        Formula b = run(f->left);
        return b == f->left ? f : fo::forall(f->var, b);
      }
      case FoKind::Exists: {
        Formula b = run(f->left);
        return b == f->left ? f : fo::exists(f->var, b);
      }
      default:
        break;
    }
    Formula body = run(f->left);
    std::vector<GuardAtom> guard;
    for (const auto& g : f->guard)
      if (std::find(guard.begin(), guard.end(), g) == guard.end()) guard.push_back(g);
    if (guard.size() == 1) {
      if (body == f->left && f->guard.size() == 1) return f;
      if (f->kind == FoKind::BoundedForall) return fo::bounded_forall(f->var, guard, body);
      if (f->kind == FoKind::BoundedExists) return fo::bounded_exists(f->var, guard, body);
      return fo::count_exists(f->count, f->var, guard, body);
    }
    std::vector<Formula> parts;
    if (f->kind == FoKind::BoundedForall || f->kind == FoKind::BoundedExists) {
      for (const auto& g : guard)
        parts.push_back(f->kind == FoKind::BoundedForall ? fo::bounded_forall(f->var, {g}, body)
                                                          : fo::bounded_exists(f->var, {g}, body));
      return f->kind == FoKind::BoundedForall ? fo::conj_all(parts) : fo::disj_all(parts);
    }
    // Counting over a union: split the witnesses by the exact set of guard
    // atoms they satisfy, then distribute the threshold over the regions.
    const int n = static_cast<int>(guard.size());
    if (n > 12) throw ResourceExceeded("too many guard atoms to normalize");
    const int regions = (1 << n) - 1;
    std::vector<std::vector<GuardAtom>> region_guard(regions);
    std::vector<Formula> region_body(regions);
    for (int mask = 1; mask <= regions; ++mask) {
      int first = 0;
      while (!(mask >> first & 1)) ++first;
      std::vector<Formula> conds;
      for (int j = 0; j < n; ++j) {
        if (j == first) continue;
        Formula a = guard_formula(guard[j], f->var);
        conds.push_back((mask >> j & 1) ? a : fo::neg(a));
      }
      conds.push_back(body);
      region_guard[mask - 1] = {guard[first]};
      region_body[mask - 1] = fo::conj_all(conds);
    }
    long long budget = 200000;
    std::vector<int> cur;
    compositions(f->count, regions, cur, [&](const std::vector<int>& split) {
      if (--budget < 0) throw ResourceExceeded("counting normalization exceeds its size budget");
      std::vector<Formula> conj;
      for (int r = 0; r < regions; ++r)
        if (split[r] > 0)
          conj.push_back(fo::count_exists(split[r], f->var, region_guard[r], region_body[r]));
      parts.push_back(fo::conj_all(conj));
    });
    return fo::disj_all(parts);
  }

  std::map<const FoNode*, Formula> memo_;
  std::vector<Formula> keep_;
};

}  // namespace

Formula normalize_guards(const Formula& f) { return GuardNormalizer().run(f); }

// ---------------------------------------------------------------------------
// Characteristic formulas

namespace {

std::vector<Term> tuple_terms(int m, int vars) {
  std::vector<Term> terms;
  for (int i = 1; i <= m; ++i) terms.push_back(Term::constant_symbol(i));
  for (int j = 1; j <= vars; ++j) terms.push_back(Term::variable("y" + std::to_string(j)));
  return terms;
}

// Enumerates every atomic fact over positions [0,n) in a fixed order:
// equalities i<j, then each relation (signature order) over index tuples in
// lexicographic order. `f(kind, rel, indices)` where kind 0 = equality.
template <typename F>
void for_each_fact(const Signature& sig, int n, F&& f) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) f(0, std::string(), std::vector<int>{i, j});
  for (const auto& [rel, arity] : sig.relations) {
    std::vector<int> idx(static_cast<std::size_t>(arity), 0);
    if (n == 0) continue;
    while (true) {
      f(1, rel, idx);
      int p = arity - 1;
      while (p >= 0 && ++idx[p] == n) idx[p--] = 0;
      if (p < 0) break;
    }
  }
}

bool involves_newest(const std::vector<int>& idx, int n) {
  return std::find(idx.begin(), idx.end(), n - 1) != idx.end();
}

Formula fact_formula(int kind, const std::string& rel, const std::vector<int>& idx,
                     const std::vector<Term>& terms, bool holds) {
  Formula a;
  if (kind == 0) {
    a = fo::eq(terms[idx[0]], terms[idx[1]]);
  } else {
    std::vector<Term> args;
    for (int i : idx) args.push_back(terms[i]);
    a = fo::atom(rel, std::move(args));
  }
  return holds ? a : fo::neg(a);
}

// Structural hash-consing so repeated subformulas share one node.
class Interner {
 public:
  Formula operator()(Formula f) {
    std::ostringstream key;
    key << static_cast<int>(f->kind) << '|' << f->rel << '|' << f->var << '|' << f->count << '|';
    for (const auto& t : f->args) key << t.to_string() << ',';
    key << '|';
    for (const auto& g : f->guard) key << g.rel << ':' << g.from.to_string() << ':' << g.backward << ',';
    key << '|' << f->left.get() << '|' << f->right.get();
    auto [it, inserted] = table_.emplace(key.str(), f);
    return it->second;
  }

 private:
  std::map<std::string, Formula> table_;
};

class Hintikka {
 public:
  Hintikka(const Structure& s, bool temporal) : s_(s), temporal_(temporal) {}

  Formula build(const std::vector<int>& elems, int depth_left) {
    auto key = std::make_pair(elems, depth_left);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const int m = static_cast<int>(s_.basepoints().size());
    const int n = static_cast<int>(elems.size());
    const bool top = n == m;
    const std::vector<Term> terms = tuple_terms(m, n - m);

    std::vector<Formula> parts;
    for_each_fact(s_.signature(), n, [&](int kind, const std::string& rel, const std::vector<int>& idx) {
      if (!top && !involves_newest(idx, n)) return;
      bool holds;
      if (kind == 0) {
        holds = elems[idx[0]] == elems[idx[1]];
      } else {
        Tuple t;
        for (int i : idx) t.push_back(elems[i]);
        holds = s_.holds(rel, t);
      }
      parts.push_back(intern_(fact_formula(kind, rel, idx, terms, holds)));
    });

    if (depth_left > 0) {
      const std::string y = "y" + std::to_string(n - m + 1);
      for (int p = 0; p < n; ++p) {
        for (const auto& e : s_.signature().transitions) {
          for (int dir = 0; dir < (temporal_ ? 2 : 1); ++dir) {
            const bool backward = dir == 1;
            std::vector<Formula> subs;
            for (int b = 0; b < s_.size(); ++b) {
              if (!(backward ? s_.edge(e, b, elems[p]) : s_.edge(e, elems[p], b))) continue;
              std::vector<int> ext = elems;
              ext.push_back(b);
              Formula h = build(ext, depth_left - 1);
              if (std::find(subs.begin(), subs.end(), h) == subs.end()) subs.push_back(h);
            }
            const std::vector<GuardAtom> guard{GuardAtom{e, terms[p], backward}};
            for (const auto& h : subs) parts.push_back(intern_(fo::bounded_exists(y, guard, h)));
            parts.push_back(intern_(fo::bounded_forall(y, guard, fold_or(subs))));
          }
        }
      }
    }
    Formula out = fold_and(parts);
    memo_.emplace(std::move(key), out);
    return out;
  }

 private:
  Formula fold_and(const std::vector<Formula>& fs) {
    if (fs.empty()) return intern_(fo::truth());
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = intern_(fo::conj(acc, fs[i]));
    return acc;
  }
  Formula fold_or(const std::vector<Formula>& fs) {
    if (fs.empty()) return intern_(fo::falsity());
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = intern_(fo::disj(acc, fs[i]));
    return acc;
  }

  const Structure& s_;
  bool temporal_;
  Interner intern_;
  std::map<std::pair<std::vector<int>, int>, Formula> memo_;
};

}  // namespace

Formula characteristic_formula(const Structure& s, int k, const CharacteristicOptions& opts) {
  if (k < 0) throw Error("characteristic formula rank must be non-negative");
  return Hintikka(s, opts.temporal).build(s.basepoints(), k);
}

// ---------------------------------------------------------------------------
// Scott types

AtomicType atomic_type(const Structure& s, const std::vector<int>& tuple) {
  AtomicType t;
  const int n = static_cast<int>(tuple.size());
  t.data.push_back(n);
  for_each_fact(s.signature(), n, [&](int kind, const std::string& rel, const std::vector<int>& idx) {
    if (kind == 0) {
      t.data.push_back(tuple[idx[0]] == tuple[idx[1]] ? 1 : 0);
    } else {
      Tuple u;
      for (int i : idx) u.push_back(tuple[i]);
      t.data.push_back(s.holds(rel, u) ? 1 : 0);
    }
  });
  return t;
}

std::strong_ordering operator<=>(const ScottType& a, const ScottType& b) {
  if (auto c = a.rank <=> b.rank; c != 0) return c;
  if (auto c = a.stuck <=> b.stuck; c != 0) return c;
  if (auto c = a.atomic <=> b.atomic; c != 0) return c;
  if (auto c = a.counts <=> b.counts; c != 0) return c;
  if (auto c = a.children.size() <=> b.children.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (auto c = a.children[i] <=> b.children[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

bool operator==(const ScottType& a, const ScottType& b) { return (a <=> b) == 0; }

ScottType scott_type_of_tuple(const Structure& s, const std::vector<int>& tuple, int k) {
  ScottType t;
  t.rank = k;
  t.atomic = atomic_type(s, tuple);
  if (k == 0) return t;
  std::vector<ScottType> kids;
  for (int b = 0; b < s.size(); ++b) {
    bool accessible = false;
    for (int a : tuple)
      if (s.transition_edge(a, b)) accessible = true;
    if (!accessible) continue;
    std::vector<int> ext = tuple;
    ext.push_back(b);
    kids.push_back(scott_type_of_tuple(s, ext, k - 1));
  }
  if (kids.empty()) {
    t.stuck = true;
    return t;
  }
  std::sort(kids.begin(), kids.end());
  for (auto& c : kids) {
    if (!t.children.empty() && t.children.back() == c) {
      ++t.counts.back();
    } else {
      t.children.push_back(std::move(c));
      t.counts.push_back(1);
    }
  }
  return t;
}

ScottType scott_type(const Structure& s, int k) {
  if (k < 0) throw Error("Scott type rank must be non-negative");
  return scott_type_of_tuple(s, s.basepoints(), k);
}

std::string to_string(const ScottType& t) {
  std::string out = "{";
  for (std::size_t i = 1; i < t.atomic.data.size(); ++i) out += t.atomic.data[i] ? '1' : '0';
  if (t.rank > 0) {
    if (t.stuck) {
      out += " stuck";
    } else {
      out += " [";
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(t.counts[i]) + "x" + to_string(t.children[i]);
      }
      out += "]";
    }
  }
  return out + "}";
}

namespace {

Formula scott_print(const ScottType& t, const Signature& sig, int m, int vars, bool top) {
  const int n = m + vars;
  const std::vector<Term> terms = tuple_terms(m, vars);
  std::vector<Formula> parts;
  std::size_t bit = 1;
  for_each_fact(sig, n, [&](int kind, const std::string& rel, const std::vector<int>& idx) {
    const bool holds = t.atomic.data.at(bit++) != 0;
    if (top || involves_newest(idx, n)) parts.push_back(fact_formula(kind, rel, idx, terms, holds));
  });
  if (t.rank > 0) {
    const std::string y = "y" + std::to_string(vars + 1);
    std::vector<GuardAtom> acc;
    for (int p = 0; p < n; ++p)
      for (const auto& e : sig.transitions) acc.push_back(GuardAtom{e, terms[p], false});
    if (t.stuck) {
      parts.push_back(fo::bounded_forall(y, acc, fo::falsity()));
    } else {
      std::vector<Formula> kids;
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        Formula c = scott_print(t.children[i], sig, m, vars + 1, false);
        kids.push_back(c);
        parts.push_back(fo::exactly(t.counts[i], y, acc, c));
      }
      parts.push_back(fo::bounded_forall(y, acc, fo::disj_all(kids)));
    }
  }
  return fo::conj_all(parts);
}

}  // namespace

Formula scott_formula(const ScottType& t, const Signature& sig) {
  if (t.atomic.data.empty()) throw Error("malformed Scott type");
  const int m = t.atomic.data.front();
  if (m > 0 && t.rank > 0 && sig.transitions.empty() && !t.stuck)
    throw SignatureMismatch("Scott type has successors but the signature has no transitions");
  return scott_print(t, sig, m, 0, true);
}

// ---------------------------------------------------------------------------
// Gaifman relativization

namespace {

Formula adjacency(const std::string& z, const std::string& y, const Signature& sig, NameGen& names) {
  std::vector<Formula> cases;
  for (const auto& [rel, arity] : sig.relations) {
    if (arity < 2) continue;
    for (int i = 0; i < arity; ++i)
      for (int j = 0; j < arity; ++j) {
        if (i == j) continue;
        std::vector<Term> args;
        std::vector<std::string> extra;
        for (int p = 0; p < arity; ++p) {
          if (p == i) args.push_back(Term::variable(z));
          else if (p == j) args.push_back(Term::variable(y));
          else {
            extra.push_back(names.fresh());
            args.push_back(Term::variable(extra.back()));
          }
        }
        Formula f = fo::atom(rel, std::move(args));
        for (auto it = extra.rbegin(); it != extra.rend(); ++it) f = fo::exists(*it, f);
        cases.push_back(f);
      }
  }
  return fo::disj_all(cases);
}

Formula distance_formula(const std::vector<Term>& centers, const std::string& y, int k,
                         const Signature& sig, NameGen& names) {
  if (k == 0) {
    std::vector<Formula> eqs;
    for (const auto& c : centers) eqs.push_back(fo::eq(Term::variable(y), c));
    return fo::disj_all(eqs);
  }
  const std::string z = names.fresh();
  Formula inner = distance_formula(centers, z, k - 1, sig, names);
  Formula step = fo::disj(fo::eq(Term::variable(z), Term::variable(y)), adjacency(z, y, sig, names));
  return fo::exists(z, fo::conj(inner, step));
}

std::vector<Term> default_centers(const std::vector<Term>& centers, const Signature& sig) {
  if (!centers.empty()) return centers;
  std::vector<Term> out;
  for (int i = 1; i <= sig.num_basepoints; ++i) out.push_back(Term::constant_symbol(i));
  return out;
}

class Relativizer {
 public:
  Relativizer(std::vector<Term> centers, int k, const Signature& sig, NameGen names)
      : centers_(std::move(centers)), k_(k), sig_(sig), names_(std::move(names)) {
    for (const auto& c : centers_)
      if (!c.is_constant) center_vars_.insert(c.var);
  }

  Formula run(const Formula& f) {
    switch (f->kind) {
      case FoKind::True:
      case FoKind::False:
      case FoKind::Atom:
      case FoKind::Eq:
        return f;
      case FoKind::Not: return fo::neg(run(f->left));
      case FoKind::And: return fo::conj(run(f->left), run(f->right));
      case FoKind::Or: return fo::disj(run(f->left), run(f->right));
      default: break;
    }
    if (center_vars_.count(f->var))
      throw Error("quantifier rebinds center variable '" + f->var + "'");
    Formula d = distance_formula(centers_, f->var, k_, sig_, names_);
    Formula body = run(f->left);
    switch (f->kind) {
      case FoKind::Forall: return fo::forall(f->var, fo::disj(fo::neg(d), body));
      case FoKind::Exists: return fo::exists(f->var, fo::conj(d, body));
      case FoKind::BoundedForall: return fo::bounded_forall(f->var, f->guard, fo::disj(fo::neg(d), body));
      case FoKind::BoundedExists: return fo::bounded_exists(f->var, f->guard, fo::conj(d, body));
      case FoKind::CountExists: return fo::count_exists(f->count, f->var, f->guard, fo::conj(d, body));
      default: return f;
    }
  }

 private:
  std::vector<Term> centers_;
  int k_;
  const Signature& sig_;
  NameGen names_;
  std::set<std::string> center_vars_;
};

}  // namespace

Formula distance_at_most(const std::vector<Term>& centers, const std::string& y, int k,
                         const Signature& sig) {
  if (k < 0) throw Error("distance bound must be non-negative");
  std::set<std::string> used{y};
  for (const auto& c : centers)
    if (!c.is_constant) used.insert(c.var);
  NameGen names(std::move(used), {}, "g");
  return distance_formula(centers, y, k, sig, names);
}

Formula gaifman_relativize(const Formula& f, const std::vector<Term>& centers, int k,
                           const Signature& sig) {
  if (k < 0) throw Error("relativization radius must be non-negative");
  std::vector<Term> cs = default_centers(centers, sig);
  if (cs.empty()) throw Error("relativization needs at least one center");
  std::set<std::string> used;
  collect_fo_names(f, used);
  for (const auto& c : cs)
    if (!c.is_constant) used.insert(c.var);
  return Relativizer(std::move(cs), k, sig, NameGen(std::move(used), {}, "g")).run(f);
}

}  // namespace hc
