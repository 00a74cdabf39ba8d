#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "linord/formula.hpp"
#include "linord/relation.hpp"

namespace linord {

using Valuation = std::map<std::string, Element>;

// Reference evaluator: Tarskian semantics by recursion over the formula,
// one valuation at a time. Atoms resolve against the structure first and
// then against the definitions.
class NaiveEvaluator {
 public:
  NaiveEvaluator(const FiniteStructure& structure, const Definitions* defs = nullptr,
                 bool memoize_definitions = true);

  // Throws EvalError on an unbound variable, an unknown relation or an arity
  // mismatch, before evaluating anything.
  bool evaluate(const Formula& f, const Valuation& v);

  // Checks what evaluate checks, for a formula whose free variables will be
  // bound to `bound`.
  void validate(const Formula& f, const std::set<std::string>& bound);

 private:
  bool eval(const Formula& f, Valuation& v);
  bool call(const Definition& d, const std::vector<Element>& args);

  const FiniteStructure& s_;
  const Definitions* defs_;
  bool memo_;
  std::set<std::string> validated_;
  std::map<std::string, std::unordered_map<std::uint64_t, bool>> cache_;
};

bool evaluate(const FiniteStructure& s, const Formula& f, const Valuation& v,
              const Definitions* defs = nullptr);

// Bottom-up evaluator: every subformula is materialized as a bitset table
// over its free variables in lexicographic order, so no intermediate table is
// wider than the subformula's free variables. Definition tables are built
// once per evaluator and reused.
class CompilingEvaluator {
 public:
  explicit CompilingEvaluator(const FiniteStructure& structure, const Definitions* defs = nullptr);

  // Table of the tuples over `vars` (in that order) that satisfy f. vars must
  // contain free_vars(f) and may contain further variables.
  RelationTable define(const Formula& f, const std::vector<std::string>& vars);

  // Table of a definition over its parameters.
  const RelationTable& definition(const std::string& name);

  bool holds(const Formula& f, const Valuation& v);

  // Table over the sorted free variables of f.
  RelationTable compile(const Formula& f);

 private:
  RelationTable atom_table(const Atom& a);
  const RelationTable& relation(const std::string& name, std::size_t arity);

  const FiniteStructure& s_;
  const Definitions* defs_;
  std::map<std::string, RelationTable> defined_;
};

RelationTable define(const FiniteStructure& s, const Formula& f,
                     const std::vector<std::string>& vars, const Definitions* defs = nullptr);

// Reorders the columns of a table to `vars`, which must contain the table's
// variables; extra variables are unconstrained.
RelationTable reorder(const RelationTable& t, const std::vector<std::string>& vars);

}  // namespace linord
