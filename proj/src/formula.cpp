#include "linord/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>

#include "linord/error.hpp"

namespace linord {

namespace {

template <class T>
Formula make(T node) {
  return std::make_shared<const Node>(Node{std::move(node)});
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

Formula atom(std::string relation, std::vector<std::string> args) {
  return make(Atom{std::move(relation), std::move(args)});
}
Formula eq(std::string lhs, std::string rhs) { return make(Equal{std::move(lhs), std::move(rhs)}); }
Formula const_eq(std::string var, std::uint64_t value) { return make(ConstEq{std::move(var), value}); }
Formula neg(Formula f) { return make(Not{std::move(f)}); }
Formula binary(BinOp op, Formula a, Formula b) { return make(Binary{op, std::move(a), std::move(b)}); }
Formula conj(Formula a, Formula b) { return binary(BinOp::conj, std::move(a), std::move(b)); }
Formula disj(Formula a, Formula b) { return binary(BinOp::disj, std::move(a), std::move(b)); }
Formula implies(Formula a, Formula b) { return binary(BinOp::implies, std::move(a), std::move(b)); }
Formula iff(Formula a, Formula b) { return binary(BinOp::iff, std::move(a), std::move(b)); }
Formula quant(Quantifier q, std::string var, Formula body) {
  return make(Quant{q, std::move(var), std::move(body)});
}
Formula exists(std::string var, Formula body) {
  return quant(Quantifier::exists, std::move(var), std::move(body));
}
Formula forall(std::string var, Formula body) {
  return quant(Quantifier::forall, std::move(var), std::move(body));
}

Formula conj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return exists("t", eq("t", "t"));
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = conj(out, parts[i]);
  return out;
}

Formula disj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return neg(exists("t", eq("t", "t")));
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = disj(out, parts[i]);
  return out;
}

bool same(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (!a || !b || a->v.index() != b->v.index()) return false;
  return std::visit(
      Overloaded{
          [&](const Atom& x) {
            const auto& y = std::get<Atom>(b->v);
            return x.relation == y.relation && x.args == y.args;
          },
          [&](const Equal& x) {
            const auto& y = std::get<Equal>(b->v);
            return x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const ConstEq& x) {
            const auto& y = std::get<ConstEq>(b->v);
            return x.var == y.var && x.value == y.value;
          },
          [&](const Not& x) { return same(x.body, std::get<Not>(b->v).body); },
          [&](const Binary& x) {
            const auto& y = std::get<Binary>(b->v);
            return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
          },
          [&](const Quant& x) {
            const auto& y = std::get<Quant>(b->v);
            return x.q == y.q && x.var == y.var && same(x.body, y.body);
          },
      },
      a->v);
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok {
  ident,
  number,
  lparen,
  rparen,
  comma,
  dot,
  bang,
  amp,
  bar,
  arrow,
  darrow,
  equal,
  lt,
  ltc,
  ltb,
  end,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, std::string(s.substr(i, len)), line, col});
    i += len;
    col += len;
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      push(Tok::ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      push(Tok::number, j - i);
      continue;
    }
    auto next = [&](std::size_t k) { return i + k < s.size() ? s[i + k] : '\0'; };
    switch (c) {
      case '(': push(Tok::lparen, 1); continue;
      case ')': push(Tok::rparen, 1); continue;
      case ',': push(Tok::comma, 1); continue;
      case '.': push(Tok::dot, 1); continue;
      case '!': push(Tok::bang, 1); continue;
      case '&': push(Tok::amp, 1); continue;
      case '|': push(Tok::bar, 1); continue;
      case '=': push(Tok::equal, 1); continue;
      case '-':
        if (next(1) == '>') {
          push(Tok::arrow, 2);
          continue;
        }
        break;
      case '<':
        if (next(1) == '-' && next(2) == '>') {
          push(Tok::darrow, 3);
          continue;
        }
        if ((next(1) == 'c' || next(1) == 'b') && !ident_char(next(2))) {
          push(next(1) == 'c' ? Tok::ltc : Tok::ltb, 2);
          continue;
        }
        push(Tok::lt, 1);
        continue;
      default:
        break;
    }
    throw SyntaxError("unknown symbol '" + std::string(1, c) + "'", line, col);
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

bool is_keyword(const Token& t) {
  return t.kind == Tok::ident && (t.text == "forall" || t.text == "exists");
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const auto& t = peek();
    throw SyntaxError(t.kind == Tok::end ? what + " (end of input)" : what, t.line, t.column);
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    return take();
  }

  std::string ident() {
    if (peek().kind != Tok::ident || is_keyword(peek())) fail("expected identifier");
    return take().text;
  }

  Formula formula() { return is_keyword(peek()) ? quantified() : iff_level(); }

  Formula quantified() {
    const auto q = take().text == "forall" ? Quantifier::forall : Quantifier::exists;
    std::string var = ident();
    expect(Tok::dot, "'.' after quantified variable");
    return quant(q, std::move(var), formula());
  }

  Formula iff_level() {
    Formula f = imp_level();
    while (peek().kind == Tok::darrow) {
      take();
      f = iff(f, imp_level());
    }
    return f;
  }

  Formula imp_level() {
    Formula f = or_level();
    while (peek().kind == Tok::arrow) {
      take();
      f = implies(f, or_level());
    }
    return f;
  }

  Formula or_level() {
    Formula f = and_level();
    while (peek().kind == Tok::bar) {
      take();
      f = disj(f, and_level());
    }
    return f;
  }

  Formula and_level() {
    Formula f = unary();
    while (peek().kind == Tok::amp) {
      take();
      f = conj(f, unary());
    }
    return f;
  }

  Formula unary() {
    if (peek().kind == Tok::bang) {
      take();
      return neg(is_keyword(peek()) ? quantified() : unary());
    }
    if (peek().kind == Tok::lparen) {
      take();
      Formula f = formula();
      expect(Tok::rparen, "')'");
      return f;
    }
    if (is_keyword(peek())) fail("quantifier must be parenthesised here");
    return atomic();
  }

  Formula atomic() {
    std::string name = ident();
    const Token& op = peek();
    switch (op.kind) {
      case Tok::lparen: {
        take();
        std::vector<std::string> args;
        if (peek().kind != Tok::rparen) {
          args.push_back(ident());
          while (peek().kind == Tok::comma) {
            take();
            args.push_back(ident());
          }
        }
        expect(Tok::rparen, "')' closing argument list");
        return atom(std::move(name), std::move(args));
      }
      case Tok::equal: {
        take();
        if (peek().kind == Tok::number) return const_eq(std::move(name), number());
        return eq(std::move(name), ident());
      }
      case Tok::lt:
      case Tok::ltc:
      case Tok::ltb: {
        take();
        if (peek().kind == Tok::number) fail("numeric literal is only allowed after '='");
        const char* rel = op.kind == Tok::lt ? "lt" : op.kind == Tok::ltc ? "ordc" : "ordb";
        return atom(rel, {std::move(name), ident()});
      }
      default:
        fail("expected '(', '=', '<', '<c' or '<b' after '" + name + "'");
    }
  }

  std::uint64_t number() {
    const Token& t = peek();
    std::uint64_t v = 0;
    for (char c : t.text) {
      const auto d = static_cast<std::uint64_t>(c - '0');
      if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) fail("numeric literal too large");
      v = v * 10 + d;
    }
    take();
    return v;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Rendering

namespace {

int precedence(BinOp op) {
  switch (op) {
    case BinOp::iff: return 1;
    case BinOp::implies: return 2;
    case BinOp::disj: return 3;
    case BinOp::conj: return 4;
  }
  return 0;
}

const char* symbol(BinOp op) {
  switch (op) {
    case BinOp::iff: return " <-> ";
    case BinOp::implies: return " -> ";
    case BinOp::disj: return " | ";
    case BinOp::conj: return " & ";
  }
  return " ? ";
}

const char* infix_symbol(const Atom& a) {
  if (a.args.size() != 2) return nullptr;
  if (a.relation == "lt") return " < ";
  if (a.relation == "ordc") return " <c ";
  if (a.relation == "ordb") return " <b ";
  return nullptr;
}

// Text that a following binary operator would be absorbed into.
bool open_right(const Formula& f) {
  if (std::holds_alternative<Quant>(f->v)) return true;
  if (const auto* n = std::get_if<Not>(&f->v)) {
    return std::holds_alternative<Quant>(n->body->v) || std::holds_alternative<Not>(n->body->v)
               ? open_right(n->body)
               : false;
  }
  return false;
}

void render_to(const Formula& f, std::string& out);

void render_operand(const Formula& f, int parent, bool right, std::string& out) {
  bool paren = open_right(f);
  if (const auto* b = std::get_if<Binary>(&f->v)) {
    const int p = precedence(b->op);
    paren = right ? p <= parent : p < parent;
  }
  if (paren) out += '(';
  render_to(f, out);
  if (paren) out += ')';
}

void render_to(const Formula& f, std::string& out) {
  std::visit(Overloaded{
                 [&](const Atom& a) {
                   if (const char* s = infix_symbol(a)) {
                     out += a.args[0];
                     out += s;
                     out += a.args[1];
                     return;
                   }
                   out += a.relation;
                   out += '(';
                   for (std::size_t i = 0; i < a.args.size(); ++i) {
                     if (i) out += ", ";
                     out += a.args[i];
                   }
                   out += ')';
                 },
                 [&](const Equal& e) { out += e.lhs + " = " + e.rhs; },
                 [&](const ConstEq& e) { out += e.var + " = " + std::to_string(e.value); },
                 [&](const Not& n) {
                   out += '!';
                   bool paren = std::holds_alternative<Binary>(n.body->v) ||
                                std::holds_alternative<Equal>(n.body->v) ||
                                std::holds_alternative<ConstEq>(n.body->v);
                   if (const auto* a = std::get_if<Atom>(&n.body->v)) paren = infix_symbol(*a);
                   if (paren) out += '(';
                   render_to(n.body, out);
                   if (paren) out += ')';
                 },
                 [&](const Binary& b) {
                   const int p = precedence(b.op);
                   render_operand(b.lhs, p, false, out);
                   out += symbol(b.op);
                   render_operand(b.rhs, p, true, out);
                 },
                 [&](const Quant& q) {
                   out += q.q == Quantifier::exists ? "exists " : "forall ";
                   out += q.var;
                   out += ". ";
                   render_to(q.body, out);
                 },
             },
             f->v);
}

}  // namespace

std::string render(const Formula& f) {
  std::string out;
  render_to(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Variables

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const Atom& a) {
                   for (const auto& v : a.args) {
                     if (!bound.count(v)) out.insert(v);
                   }
                 },
                 [&](const Equal& e) {
                   if (!bound.count(e.lhs)) out.insert(e.lhs);
                   if (!bound.count(e.rhs)) out.insert(e.rhs);
                 },
                 [&](const ConstEq& e) {
                   if (!bound.count(e.var)) out.insert(e.var);
                 },
                 [&](const Not& n) { collect_free(n.body, bound, out); },
                 [&](const Binary& b) {
                   collect_free(b.lhs, bound, out);
                   collect_free(b.rhs, bound, out);
                 },
                 [&](const Quant& q) {
                   const bool fresh = bound.insert(q.var).second;
                   collect_free(q.body, bound, out);
                   if (fresh) bound.erase(q.var);
                 },
             },
             f->v);
}

void collect_all(const Formula& f, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const Atom& a) { out.insert(a.args.begin(), a.args.end()); },
                 [&](const Equal& e) {
                   out.insert(e.lhs);
                   out.insert(e.rhs);
                 },
                 [&](const ConstEq& e) { out.insert(e.var); },
                 [&](const Not& n) { collect_all(n.body, out); },
                 [&](const Binary& b) {
                   collect_all(b.lhs, out);
                   collect_all(b.rhs, out);
                 },
                 [&](const Quant& q) {
                   out.insert(q.var);
                   collect_all(q.body, out);
                 },
             },
             f->v);
}

void collect_relations(const Formula& f, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const Atom& a) { out.insert(a.relation); },
                 [&](const Not& n) { collect_relations(n.body, out); },
                 [&](const Binary& b) {
                   collect_relations(b.lhs, out);
                   collect_relations(b.rhs, out);
                 },
                 [&](const Quant& q) { collect_relations(q.body, out); },
                 [&](const auto&) {},
             },
             f->v);
}

std::string fresh_name(const std::string& base, std::set<std::string>& used) {
  std::string name = base;
  for (std::size_t i = 1; used.count(name); ++i) name = base + std::to_string(i);
  used.insert(name);
  return name;
}

}  // namespace

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> bound;
  std::set<std::string> out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> all_vars(const Formula& f) {
  std::set<std::string> out;
  collect_all(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Definitions

const Definition& Definitions::add(std::string name, std::vector<std::string> params,
                                   Formula body) {
  if (defs_.count(name)) throw ConfigError("definition '" + name + "' already exists");
  if (referenced_.count(name)) {
    throw ConfigError("definition '" + name + "' is used as a relation by an earlier definition");
  }
  std::set<std::string> param_set(params.begin(), params.end());
  if (param_set.size() != params.size()) {
    throw ConfigError("definition '" + name + "' repeats a parameter");
  }
  for (const auto& v : free_vars(body)) {
    if (!param_set.count(v)) {
      throw ConfigError("variable '" + v + "' is free in '" + name + "' but not a parameter");
    }
  }
  std::set<std::string> rels;
  collect_relations(body, rels);
  for (const auto& r : rels) {
    if (r == name) throw ConfigError("definition '" + name + "' refers to itself");
    if (!defs_.count(r)) referenced_.insert(r);
  }
  order_.push_back(name);
  auto [it, ok] = defs_.emplace(name, Definition{name, std::move(params), std::move(body)});
  return it->second;
}

const Definition& Definitions::add(std::string name, std::vector<std::string> params,
                                   std::string_view text) {
  return add(std::move(name), std::move(params), parse(text));
}

const Definition* Definitions::find(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

const Definition& Definitions::at(const std::string& name) const {
  if (const auto* d = find(name)) return *d;
  throw ConfigError("unknown definition '" + name + "'");
}

// ---------------------------------------------------------------------------
// Rank and rewriting

namespace {

std::size_t rank_of(const Formula& f, RankMode mode, const Definitions* defs,
                    std::map<std::string, std::size_t>& cache) {
  return std::visit(
      Overloaded{
          [&](const Atom& a) -> std::size_t {
            if (!defs) return 0;
            const Definition* d = defs->find(a.relation);
            if (!d) return 0;
            auto it = cache.find(a.relation);
            if (it != cache.end()) return it->second;
            const std::size_t r = rank_of(d->body, mode, defs, cache);
            cache.emplace(a.relation, r);
            return r;
          },
          [&](const Equal&) -> std::size_t { return 0; },
          [&](const ConstEq& e) -> std::size_t {
            return mode == RankMode::expanded ? static_cast<std::size_t>(e.value) + 1 : 0;
          },
          [&](const Not& n) { return rank_of(n.body, mode, defs, cache); },
          [&](const Binary& b) {
            return std::max(rank_of(b.lhs, mode, defs, cache), rank_of(b.rhs, mode, defs, cache));
          },
          [&](const Quant& q) { return 1 + rank_of(q.body, mode, defs, cache); },
      },
      f->v);
}

Formula constant_formula(const std::string& x, std::uint64_t c, std::set<std::string>& used) {
  const std::string z = fresh_name("z", used);
  if (c == 0) return neg(exists(z, atom("lt", {z, x})));
  const std::string w = fresh_name("w", used);
  Formula succ = conj(atom("lt", {z, x}),
                      neg(exists(w, conj(atom("lt", {z, w}), atom("lt", {w, x})))));
  return exists(z, conj(constant_formula(z, c - 1, used), succ));
}

Formula expand_constants_with(const Formula& f, std::set<std::string>& used) {
  return std::visit(
      Overloaded{
          [&](const ConstEq& e) { return constant_formula(e.var, e.value, used); },
          [&](const Not& n) { return neg(expand_constants_with(n.body, used)); },
          [&](const Binary& b) {
            return binary(b.op, expand_constants_with(b.lhs, used),
                          expand_constants_with(b.rhs, used));
          },
          [&](const Quant& q) { return quant(q.q, q.var, expand_constants_with(q.body, used)); },
          [&](const auto&) { return f; },
      },
      f->v);
}

std::string lookup(const std::map<std::string, std::string>& map, const std::string& v) {
  auto it = map.find(v);
  return it == map.end() ? v : it->second;
}

Formula substitute_with(const Formula& f, std::map<std::string, std::string> map,
                        std::set<std::string>& used) {
  if (map.empty()) return f;
  return std::visit(
      Overloaded{
          [&](const Atom& a) {
            std::vector<std::string> args;
            args.reserve(a.args.size());
            for (const auto& v : a.args) args.push_back(lookup(map, v));
            return atom(a.relation, std::move(args));
          },
          [&](const Equal& e) { return eq(lookup(map, e.lhs), lookup(map, e.rhs)); },
          [&](const ConstEq& e) { return const_eq(lookup(map, e.var), e.value); },
          [&](const Not& n) { return neg(substitute_with(n.body, map, used)); },
          [&](const Binary& b) {
            return binary(b.op, substitute_with(b.lhs, map, used), substitute_with(b.rhs, map, used));
          },
          [&](const Quant& q) {
            map.erase(q.var);
            std::string var = q.var;
            const bool captures = std::any_of(map.begin(), map.end(),
                                              [&](const auto& kv) { return kv.second == q.var; });
            if (captures) {
              var = fresh_name(q.var, used);
              map[q.var] = var;
            }
            return quant(q.q, var, substitute_with(q.body, map, used));
          },
      },
      f->v);
}

Formula expand_definitions_with(const Formula& f, const Definitions& defs,
                                std::map<std::string, Formula>& cache, std::set<std::string>& used) {
  return std::visit(
      Overloaded{
          [&](const Atom& a) -> Formula {
            const Definition* d = defs.find(a.relation);
            if (!d) return f;
            if (d->params.size() != a.args.size()) {
              throw EvalError("'" + a.relation + "' expects " + std::to_string(d->params.size()) +
                              " arguments, got " + std::to_string(a.args.size()));
            }
            auto it = cache.find(a.relation);
            if (it == cache.end()) {
              it = cache.emplace(a.relation, expand_definitions_with(d->body, defs, cache, used)).first;
            }
            std::map<std::string, std::string> map;
            for (std::size_t i = 0; i < d->params.size(); ++i) {
              if (d->params[i] != a.args[i]) map[d->params[i]] = a.args[i];
            }
            std::set<std::string> local = all_vars(it->second);
            local.insert(used.begin(), used.end());
            for (const auto& v : a.args) local.insert(v);
            return substitute_with(it->second, std::move(map), local);
          },
          [&](const Not& n) { return neg(expand_definitions_with(n.body, defs, cache, used)); },
          [&](const Binary& b) {
            return binary(b.op, expand_definitions_with(b.lhs, defs, cache, used),
                          expand_definitions_with(b.rhs, defs, cache, used));
          },
          [&](const Quant& q) {
            return quant(q.q, q.var, expand_definitions_with(q.body, defs, cache, used));
          },
          [&](const auto&) { return f; },
      },
      f->v);
}

}  // namespace

std::size_t quantifier_rank(const Formula& f, RankMode mode, const Definitions* defs) {
  std::map<std::string, std::size_t> cache;
  return rank_of(f, mode, defs, cache);
}

Formula expand_constants(const Formula& f) {
  std::set<std::string> used = all_vars(f);
  return expand_constants_with(f, used);
}

Formula substitute(const Formula& f, const std::map<std::string, std::string>& map) {
  std::set<std::string> used = all_vars(f);
  for (const auto& [k, v] : map) {
    used.insert(k);
    used.insert(v);
  }
  return substitute_with(f, map, used);
}

Formula expand_definitions(const Formula& f, const Definitions& defs) {
  std::map<std::string, Formula> cache;
  std::set<std::string> used = all_vars(f);
  return expand_definitions_with(f, defs, cache, used);
}

}  // namespace linord
