#include <doctest.h>

#include <random>

#include "linord/catalog.hpp"
#include "linord/error.hpp"
#include "linord/eval.hpp"
#include "linord/predicates.hpp"
#include "support.hpp"

using namespace linord;

namespace {

FiniteStructure orders(Element n) {
  FiniteStructure s(n);
  s.add("lt", builtin_table(Builtin::lt, n));
  s.add("ordc", builtin_table(Builtin::ordc, n));
  return s;
}

FiniteStructure random_signature_structure(std::mt19937_64& rng, Element n) {
  FiniteStructure s(n);
  s.add("lt", builtin_table(Builtin::lt, n));
  RelationTable e(2, n), p(1, n), t(3, n);
  testing::for_each_tuple(2, n, [&](const Tuple& x) { if (rng() % 3 == 0) e.insert(x); });
  testing::for_each_tuple(1, n, [&](const Tuple& x) { if (rng() % 2 == 0) p.insert(x); });
  testing::for_each_tuple(3, n, [&](const Tuple& x) { if (rng() % 5 == 0) t.insert(x); });
  s.add("E", e);
  s.add("P", p);
  s.add("T", t);
  return s;
}

testing::Signature random_signature() {
  testing::Signature sig;
  sig.relations = {{"lt", 2}, {"E", 2}, {"P", 1}, {"T", 3}};
  return sig;
}

Valuation valuation_of(const std::vector<std::string>& vars, const Tuple& t) {
  Valuation v;
  for (std::size_t i = 0; i < vars.size(); ++i) v[vars[i]] = t[i];
  return v;
}

}  // namespace

TEST_CASE("evaluate on small examples") {
  FiniteStructure s(5);
  s.add("lt", builtin_table(Builtin::lt, 5));
  CHECK(evaluate(s, parse("exists x. forall y. (x = y | x < y)"), {}));
  CHECK_FALSE(evaluate(s, parse("exists x. forall y. x < y"), {}));
  CHECK(evaluate(s, parse("x = 3"), {{"x", 3}}));
  CHECK_FALSE(evaluate(s, parse("x = 6"), {{"x", 5}}));

  const Catalog cat = bit_chain_catalog();
  CHECK(evaluate(cat.structure(27), parse("diag(x)"), {{"x", 5}}, &cat.definitions()));
  CHECK_FALSE(evaluate(cat.structure(27), parse("diag(x)"), {{"x", 4}}, &cat.definitions()));
  CHECK(evaluate(orders(0), cat.definitions().at("bot").body, {{"x", 0}}));
}

TEST_CASE("evaluation errors") {
  const FiniteStructure s = orders(4);
  CHECK_THROWS_AS(evaluate(s, parse("x < y"), {{"x", 1}}), EvalError);
  CHECK_THROWS_AS(evaluate(s, parse("E(x, x)"), {{"x", 1}}), EvalError);
  CHECK_THROWS_AS(evaluate(s, parse("lt(x)"), {{"x", 1}}), EvalError);
  CHECK_THROWS_AS(define(s, parse("x < y"), {"x"}), EvalError);
  CHECK_THROWS_AS(define(s, parse("E(x, y)"), {"x", "y"}), EvalError);
  CHECK_THROWS_AS(define(FiniteStructure(100000), parse("x = y & y = z"), {"x", "y", "z"}),
                  EvalError);
}

TEST_CASE("define of samecol is the same-column relation") {
  const Catalog cat = bit_chain_catalog();
  const Element n = 27;
  const RelationTable t = define(cat.structure(n), parse("samecol(x, y)"), {"x", "y"},
                                 &cat.definitions());
  for (Element x = 0; x <= n; ++x) {
    for (Element y = 0; y <= n; ++y) CHECK(t.contains({x, y}) == (coords(x).c == coords(y).c));
  }
}

TEST_CASE("define of a sentence has arity 0") {
  const FiniteStructure s = orders(6);
  const RelationTable yes = define(s, parse("exists x. forall y. (x = y | x < y)"), {});
  const RelationTable no = define(s, parse("exists x. x < x"), {});
  CHECK(yes.arity() == 0);
  CHECK_FALSE(yes.empty());
  CHECK(no.empty());
}

TEST_CASE("define with extra and reordered variables") {
  const FiniteStructure s = orders(5);
  const RelationTable gt = define(s, parse("x < y"), {"y", "x"});
  CHECK(gt.contains({3, 1}));
  CHECK_FALSE(gt.contains({1, 3}));
  const RelationTable padded = define(s, parse("x = 2"), {"x", "z"});
  CHECK(padded.size() == 6);
  for (Element z = 0; z <= 5; ++z) CHECK(padded.contains({2, z}));
}

TEST_CASE("conj_all and disj_all of nothing") {
  const FiniteStructure s = orders(3);
  CHECK(evaluate(s, conj_all({}), {}));
  CHECK_FALSE(evaluate(s, disj_all({}), {}));
}

TEST_CASE("compiling and naive evaluators agree on random formulas") {
  std::mt19937_64 rng(2024);
  const testing::Signature sig = random_signature();
  const std::vector<std::string> vars{"w", "x", "y", "z"};
  for (int i = 0; i < 1000; ++i) {
    const Element n = static_cast<Element>(rng() % 9);
    const FiniteStructure s = random_signature_structure(rng, n);
    const Formula f = testing::random_formula(rng, sig, 4);
    const RelationTable table = define(s, f, vars);
    NaiveEvaluator naive(s);
    testing::for_each_tuple(vars.size(), n, [&](const Tuple& t) {
      REQUIRE_MESSAGE(table.contains(t) == naive.evaluate(f, valuation_of(vars, t)), render(f));
    });
  }
}

TEST_CASE("negation and quantifier duality") {
  std::mt19937_64 rng(99);
  const testing::Signature sig = random_signature();
  const std::vector<std::string> vars{"w", "x", "y", "z"};
  for (int i = 0; i < 200; ++i) {
    const Element n = static_cast<Element>(1 + rng() % 5);
    const FiniteStructure s = random_signature_structure(rng, n);
    const Formula f = testing::random_formula(rng, sig, 3);
    const std::string v = vars[rng() % vars.size()];
    const Formula all = forall(v, f);
    const Formula dual = neg(exists(v, neg(f)));
    NaiveEvaluator naive(s);
    testing::for_each_tuple(vars.size(), n, [&](const Tuple& t) {
      const Valuation val = valuation_of(vars, t);
      REQUIRE(naive.evaluate(neg(f), val) != naive.evaluate(f, val));
      REQUIRE(naive.evaluate(all, val) == naive.evaluate(dual, val));
    });
    CHECK(define(s, all, vars) == define(s, dual, vars));
  }
}

TEST_CASE("negation-free formulas are monotone in the relations") {
  std::mt19937_64 rng(5);
  testing::Signature sig = random_signature();
  sig.negation = false;
  sig.relations = {{"E", 2}, {"P", 1}, {"T", 3}};
  const std::vector<std::string> vars{"w", "x", "y", "z"};
  for (int i = 0; i < 300; ++i) {
    const Element n = static_cast<Element>(rng() % 6);
    FiniteStructure small = random_signature_structure(rng, n);
    FiniteStructure large(n);
    for (const auto& [name, table] : small.relations()) {
      RelationTable grown = table;
      testing::for_each_tuple(table.arity(), n, [&](const Tuple& t) {
        if (rng() % 4 == 0) grown.insert(t);
      });
      large.add(name, grown);
    }
    const Formula f = testing::random_formula(rng, sig, 4);
    const RelationTable a = define(small, f, vars);
    const RelationTable b = define(large, f, vars);
    for (const Tuple& t : a.tuples()) REQUIRE_MESSAGE(b.contains(t), render(f));
  }
}

TEST_CASE("catalog formulas evaluate the same either way") {
  const Catalog cat = bit_chain_catalog();
  for (Element n : {0u, 1u, 2u, 5u, 9u}) {
    const FiniteStructure s = cat.structure(n);
    CompilingEvaluator fast(s, &cat.definitions());
    NaiveEvaluator slow(s, &cat.definitions());
    for (const std::string& name : cat.definitions().names()) {
      const Definition& d = cat.definitions().at(name);
      const RelationTable& t = fast.definition(name);
      testing::for_each_tuple(d.params.size(), n, [&](const Tuple& tup) {
        REQUIRE_MESSAGE(t.contains(tup) == slow.evaluate(d.body, valuation_of(d.params, tup)),
                        name);
      });
    }
  }
}

TEST_CASE("definition memo does not change answers") {
  const Catalog cat = bit_chain_catalog();
  for (Element n : {0u, 3u, 6u}) {
    const FiniteStructure s = cat.structure(n);
    NaiveEvaluator memo(s, &cat.definitions(), true);
    NaiveEvaluator plain(s, &cat.definitions(), false);
    for (const char* name : {"samecol", "diag", "rc", "phiQ"}) {
      const Definition& d = cat.definitions().at(name);
      testing::for_each_tuple(d.params.size(), n, [&](const Tuple& tup) {
        const Valuation v = valuation_of(d.params, tup);
        REQUIRE(memo.evaluate(d.body, v) == plain.evaluate(d.body, v));
      });
    }
  }
}

TEST_CASE("reorder") {
  RelationTable t(2, 3, {"a", "b"});
  t.insert({0, 2});
  const RelationTable r = reorder(t, {"b", "c", "a"});
  CHECK(r.arity() == 3);
  CHECK(r.size() == 4);
  CHECK(r.contains({2, 1, 0}));
  CHECK_FALSE(r.contains({0, 1, 2}));
}
