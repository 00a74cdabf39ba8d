#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace linord {

struct Node;
using Formula = std::shared_ptr<const Node>;

enum class BinOp { conj, disj, implies, iff };
enum class Quantifier { exists, forall };

struct Atom {
  std::string relation;
  std::vector<std::string> args;
};

struct Equal {
  std::string lhs;
  std::string rhs;
};

// x = c for a numeric literal c. Evaluated as the constant; its expansion
// into FO(<) is available through expand_constants.
struct ConstEq {
  std::string var;
  std::uint64_t value = 0;
};

struct Not {
  Formula body;
};

struct Binary {
  BinOp op;
  Formula lhs;
  Formula rhs;
};

struct Quant {
  Quantifier q;
  std::string var;
  Formula body;
};

struct Node {
  std::variant<Atom, Equal, ConstEq, Not, Binary, Quant> v;
};

Formula atom(std::string relation, std::vector<std::string> args);
Formula eq(std::string lhs, std::string rhs);
Formula const_eq(std::string var, std::uint64_t value);
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula binary(BinOp op, Formula a, Formula b);
Formula exists(std::string var, Formula body);
Formula forall(std::string var, Formula body);
Formula quant(Quantifier q, std::string var, Formula body);
// Left-nested; the empty conjunction is exists t. t = t, the empty
// disjunction its negation.
Formula conj_all(const std::vector<Formula>& parts);
Formula disj_all(const std::vector<Formula>& parts);

// Structural equality.
bool same(const Formula& a, const Formula& b);

// Grammar:
//   formula := quant | iff
//   quant   := ("forall" | "exists") IDENT "." formula
//   iff     := imp {"<->" imp}
//   imp     := or {"->" or}
//   or      := and {"|" and}
//   and     := unary {"&" unary}
//   unary   := "!" (unary | quant) | "(" formula ")" | atom
//   atom    := IDENT "(" [IDENT {"," IDENT}] ")"
//            | IDENT ("=" | "<" | "<c" | "<b") IDENT
//            | IDENT "=" NUMBER
// Binary connectives associate to the left. "<", "<c" and "<b" are the
// relations lt, ordc and ordb. Throws SyntaxError.
Formula parse(std::string_view text);

std::string render(const Formula& f);

std::set<std::string> free_vars(const Formula& f);
// Every variable name that occurs, free or bound.
std::set<std::string> all_vars(const Formula& f);

// Named formulas with parameters, referenced from other formulas by atoms.
// A definition may only refer to definitions added before it.
struct Definition {
  std::string name;
  std::vector<std::string> params;
  Formula body;
};

class Definitions {
 public:
  // Throws ConfigError on a duplicate name, a name an earlier
  // body already used as a relation, repeated parameters, or free
  // variables of the body that are not parameters.
  const Definition& add(std::string name, std::vector<std::string> params, Formula body);
  const Definition& add(std::string name, std::vector<std::string> params, std::string_view text);

  const Definition* find(const std::string& name) const;
  const Definition& at(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }
  std::size_t size() const { return order_.size(); }
  // In the order they were added, which is a dependency order.
  const std::vector<std::string>& names() const { return order_; }

 private:
  std::map<std::string, Definition> defs_;
  std::vector<std::string> order_;
  std::set<std::string> referenced_;
};

// Sugar counts x = c as an atom; expanded counts it as its FO(<) expansion,
// which has rank c + 1.
enum class RankMode { sugar, expanded };

// Atoms naming a definition contribute the rank of its body.
std::size_t quantifier_rank(const Formula& f, RankMode mode = RankMode::sugar,
                            const Definitions* defs = nullptr);

// Replaces every x = c by
//   x = 0   :=  !exists z. z < x
//   x = c+1 :=  exists z. (z = c & (z < x & !exists w. (z < w & w < x)))
// with fresh bound variables.
Formula expand_constants(const Formula& f);

// Inlines every definition call, renaming bound variables to avoid capture.
Formula expand_definitions(const Formula& f, const Definitions& defs);

// Replaces free occurrences of variables according to `map`, renaming bound
// variables that would capture a replacement.
Formula substitute(const Formula& f, const std::map<std::string, std::string>& map);

}  // namespace linord
