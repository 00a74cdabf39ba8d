#include <doctest.h>

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "linord/catalog.hpp"
#include "linord/error.hpp"
#include "linord/eval.hpp"
#include "linord/ordb.hpp"
#include "linord/predicates.hpp"

using namespace linord;

namespace {

OrdBConfig toy_squares() { return OrdBConfig::toy_config({predicate_squares()}, 5, 4); }

std::uint64_t total_mismatches(const Catalog& cat, Element n) {
  std::uint64_t m = 0;
  for (const auto& r : verify_entries(cat, cat.verifiable(), n)) m += r.mismatches;
  return m;
}

}  // namespace

TEST_CASE("grid and bit-chain formulas on small domains") {
  const Catalog cat = bit_chain_catalog();
  for (Element n = 0; n <= 20; ++n) {
    for (const auto& r : verify_entries(cat, cat.verifiable(), n)) {
      INFO(r.entry << " at n = " << n);
      CHECK(r.mismatches == 0);
    }
  }
}

TEST_CASE("single entries") {
  const Catalog cat = bit_chain_catalog();
  const VerifyReport bit128 = verify_against_oracle(cat, "bit", 128);
  CHECK(bit128.checked == 16641);
  CHECK(bit128.mismatches == 0);
  CHECK(verify_against_oracle(cat, "bit", 0).mismatches == 0);
  CHECK(verify_against_oracle(cat, "samecol", 27).mismatches == 0);

  const Definitions& defs = cat.definitions();
  CHECK(evaluate(cat.structure(20), parse("q(x, y)"), {{"x", 13}, {"y", 10}}, &defs));
  CHECK_FALSE(evaluate(cat.structure(20), parse("q(x, y)"), {{"x", 13}, {"y", 6}}, &defs));
  CHECK(evaluate(cat.structure(27), parse("lastcolfull()"), {}, &defs));
  CHECK_FALSE(evaluate(cat.structure(28), parse("lastcolfull()"), {}, &defs));
}

TEST_CASE("basic shorthands") {
  FiniteStructure s(27);
  s.add("lt", builtin_table(Builtin::lt, 27));
  s.add("ordc", builtin_table(Builtin::ordc, 27));

  FiniteStructure s9(9);
  s9.add("lt", builtin_table(Builtin::lt, 9));
  const RelationTable max9 = define(s9, build_basic(BasicKind::max, "lt"), {"x"});
  CHECK(max9.tuples() == std::vector<Tuple>{{9}});

  // Successor pairs of the row-major order, by sorting the domain.
  std::vector<Element> sorted(28);
  for (Element x = 0; x <= 27; ++x) sorted[x] = x;
  std::sort(sorted.begin(), sorted.end(), [](Element a, Element b) { return ordc_less(a, b); });
  RelationTable expected(2, 27);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) expected.insert({sorted[i], sorted[i + 1]});
  const RelationTable succ = define(s, build_basic(BasicKind::succ, "ordc"), {"x", "y"});
  CHECK(succ == expected);
  CHECK(succ.contains({21, 2}));
  CHECK(succ.contains({10, 15}));

  const RelationTable leq = define(s, build_basic(BasicKind::leq, "lt"), {"x", "y"});
  CHECK(leq.size() == 28 * 29 / 2);
  CHECK_THROWS_AS(build_basic(BasicKind::max, "gt"), ConfigError);
}

TEST_CASE("textbook forms are wrong somewhere") {
  const Catalog literal = bit_chain_catalog(CatalogVariant::literal);
  bool any = false;
  for (Element n = 0; n <= 10; ++n) any = any || total_mismatches(literal, n) > 0;
  CHECK(any);
}

TEST_CASE("expanded quantifier ranks do not depend on n") {
  const Catalog cat = bit_chain_catalog();
  const std::map<std::string, std::size_t> expected{
      {"max_lt", 1},    {"succ_lt", 1}, {"succ_ordc", 1}, {"bot", 4},   {"samecol", 5},
      {"q", 5},         {"lastcolfull", 3}, {"diag", 5}, {"samerow", 6}, {"rc", 7},
      {"phiQ", 9},      {"phiR", 9},    {"carry", 11},    {"bitR", 11}, {"r", 12},
      {"bit", 13}};
  for (const std::string& name : cat.definitions().names()) {
    const std::size_t rank =
        quantifier_rank(cat.definitions().at(name).body, RankMode::expanded, &cat.definitions());
    INFO(name);
    CHECK(expected.at(name) == rank);
  }
}

TEST_CASE("order-b formulas on the toy configuration") {
  const OrdBConfig cfg = toy_squares();
  const Catalog cat = ordb_catalog(cfg);
  const RelationTable backbone =
      define(cat.structure(20), parse("backbone(x)"), {"x"}, &cat.definitions());
  CHECK(backbone.tuples() == std::vector<Tuple>{{0}, {1}, {3}, {6}, {10}, {15}, {20}});

  for (const auto& r : verify_entries(cat, cat.verifiable(), 60)) {
    INFO(r.entry);
    CHECK(r.mismatches == 0);
  }
  CHECK_THROWS_AS(ordb_catalog(OrdBConfig::toy_config({predicate_squares()}, 7, 4)), ConfigError);
}

TEST_CASE("backbone formula equals the backbone for every toy configuration") {
  for (std::uint64_t ell = 3; ell <= 6; ++ell) {
    const OrdBConfig cfg = OrdBConfig::toy_config({predicate_empty()}, ell, 1);
    const Catalog cat = ordb_catalog(cfg);
    CHECK(verify_against_oracle(cat, "backbone", 80).mismatches == 0);
  }
}

TEST_CASE("order from the index permutation") {
  const Catalog cat = permutation_catalog(toy_squares());
  const VerifyReport r = verify_against_oracle(cat, "ordb_from_pi", 120);
  CHECK(r.checked == 121 * 121);
  CHECK(r.mismatches == 0);
  const RelationTable t =
      define(cat.structure(40), parse("ordb_from_pi(x, y)"), {"x", "y"}, &cat.definitions());
  for (Element x = 0; x <= 40; ++x) CHECK_FALSE(t.contains({x, x}));
}

TEST_CASE("order from Bit alone") {
  const Catalog cat = bit_order_catalog();
  for (Element n : {1u, 7u, 8u, 63u, 64u, 200u}) {
    const VerifyReport r = verify_against_oracle(cat, "lt_bit", n);
    INFO("n = " << n);
    CHECK(r.mismatches == 0);
  }
  const RelationTable t = define(cat.structure(200), parse("lt_bit(x, y)"), {"x", "y"},
                                 &cat.definitions());
  for (Element x = 0; x <= 200; ++x) CHECK_FALSE(t.contains({x, x}));
  for (Element y = 1; y <= 200; ++y) CHECK(t.contains({0, y}));
}

TEST_CASE("carry oracle") {
  CHECK_FALSE(carry_into(1, 1, 0));
  CHECK(carry_into(1, 1, 1));
  CHECK_FALSE(carry_into(1, 2, 2));
  CHECK(carry_into(3, 1, 2));
  for (std::uint64_t a = 0; a < 64; ++a) {
    for (std::uint64_t b = 0; b < 64; ++b) {
      for (std::uint64_t p = 0; p < 8; ++p) {
        const std::uint64_t low = (std::uint64_t{1} << p) - 1;
        REQUIRE(carry_into(a, b, p) == (((a & low) + (b & low)) >> p != 0));
      }
    }
  }
}

TEST_CASE("catalog bookkeeping") {
  const Catalog cat = bit_chain_catalog();
  CHECK(cat.find("bit") != nullptr);
  CHECK(cat.find("nope") == nullptr);
  CHECK(cat.verifiable().front() == "max_lt");
  CHECK_THROWS_AS(verify_against_oracle(cat, "nope", 3), ConfigError);

  Catalog own("own", {"lt"});
  CHECK_THROWS_AS(own.add("lt", {"x", "y"}, "x = y"), ConfigError);
  own.add("helper", {"x"}, "x = x");
  CHECK_THROWS_AS(verify_against_oracle(own, "helper", 3), ConfigError);

  // Every body only refers to builtins and earlier entries.
  std::set<std::string> known(cat.builtins().begin(), cat.builtins().end());
  for (const auto& e : cat.entries()) {
    const std::string text = render(cat.definitions().at(e.name).body);
    for (const auto& other : cat.entries()) {
      if (known.count(other.name) || other.name == e.name) continue;
      INFO(e.name << " mentions " << other.name);
      CHECK_FALSE(std::regex_search(text, std::regex("(^|[^A-Za-z0-9_])" + other.name + "\\(")));
    }
    known.insert(e.name);
  }
}

TEST_CASE("reports") {
  const Catalog cat = bit_chain_catalog();
  const auto reports = verify_entries(cat, {"bot", "samecol"}, 4);
  const std::string csv = reports_csv(reports);
  CHECK(csv.rfind("entry,n,checked,mismatches,witness,millis\n", 0) == 0);
  CHECK(csv.find("samecol,4,25,0,,") != std::string::npos);
  const auto json = nlohmann::json::parse(reports_json(reports));
  REQUIRE(json.is_array());
  CHECK(json[1]["entry"] == "samecol");
  CHECK(json[1]["checked"] == 25);
  CHECK(json[1]["witness"].is_null());
  CHECK(reports_json(reports) == reports_json(verify_entries(cat, {"bot", "samecol"}, 4)));
}
