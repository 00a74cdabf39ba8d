#include <doctest.h>

#include <algorithm>

#include "linord/ef.hpp"
#include "linord/error.hpp"
#include "linord/predicates.hpp"

using namespace linord;

TEST_CASE("partial isomorphisms") {
  const FiniteStructure l3 = linear_order(3);
  const Tuple a{0, 1}, b{1, 0};
  CHECK(partial_iso_check(l3, l3, a, a));
  CHECK_FALSE(partial_iso_check(l3, l3, a, b));
  const Tuple same{1, 1}, split{1, 2};
  CHECK_FALSE(partial_iso_check(l3, l3, same, split));
  CHECK(partial_iso_check(l3, linear_order(9), Tuple{0, 2}, Tuple{3, 8}));
  CHECK_THROWS_AS(partial_iso_check(l3, l3, Tuple{0}, Tuple{0, 1}), ConfigError);
  CHECK_THROWS_AS(partial_iso_check(l3, l3, Tuple{5}, Tuple{0}), EvalError);
  CHECK_THROWS_AS(partial_iso_check(l3, word_structure("ab", "ab"), Tuple{0}, Tuple{0}), ConfigError);
}

TEST_CASE("linear orders") {
  CHECK_FALSE(duplicator_wins(linear_order(2), linear_order(3), 2));
  CHECK(duplicator_wins(linear_order(3), linear_order(4), 2));
  CHECK_THROWS_AS(linear_order(0), ConfigError);
}

TEST_CASE("linear order sweep matches the length pattern") {
  for (unsigned k = 1; k <= 3; ++k) {
    const Element threshold = (Element{1} << k) - 1;
    for (Element a = 1; a <= 20; ++a) {
      for (Element b = a; b <= 20; ++b) {
        const FiniteStructure A = linear_order(a), B = linear_order(b);
        const bool fast = duplicator_wins(A, B, k);
        INFO("a = " << a << ", b = " << b << ", k = " << k);
        REQUIRE(fast == (a == b || std::min(a, b) >= threshold));
        if (a <= 12 && b <= 12) REQUIRE(fast == duplicator_wins_reference(A, B, k));
        REQUIRE(fast == duplicator_wins(B, A, k));
      }
    }
  }
}

TEST_CASE("reflexive, symmetric and monotone on random structures") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Element size = static_cast<Element>(2 + seed % 4);
    const FiniteStructure A = random_structure(size, seed);
    const FiniteStructure B = random_structure(size, seed + 1000);
    for (unsigned k = 1; k <= 3; ++k) {
      REQUIRE(duplicator_wins(A, A, k));
      const bool ab = duplicator_wins(A, B, k);
      REQUIRE(ab == duplicator_wins(B, A, k));
      REQUIRE(ab == duplicator_wins_reference(A, B, k));
      if (ab) REQUIRE(duplicator_wins(A, B, k - 1));
    }
  }
}

TEST_CASE("spoiler strategies win when replayed") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FiniteStructure A = random_structure(4, seed);
    const FiniteStructure B = random_structure(4, seed + 7);
    EfSolver solver(A, B);
    for (unsigned k = 1; k <= 3; ++k) {
      auto strategy = solver.spoiler_strategy(k);
      if (solver.duplicator_wins(k)) {
        REQUIRE(strategy == nullptr);
        continue;
      }
      REQUIRE(strategy != nullptr);
      REQUIRE(replay_strategy(A, B, k, *strategy));
      ++checked;
    }
  }
  CHECK(checked > 0);
  EfSolver orders(linear_order(2), linear_order(3));
  const auto s = orders.spoiler_strategy(2);
  REQUIRE(s != nullptr);
  CHECK(replay_strategy(linear_order(2), linear_order(3), 2, *s));
  CHECK(orders.memo_size() > 0);
}

TEST_CASE("state budget") {
  CHECK_THROWS_AS(duplicator_wins(linear_order(100), linear_order(100), 5, 1e6), BudgetExceeded);
}

TEST_CASE("word structures") {
  const FiniteStructure w = word_structure("abba", "abe");
  CHECK(w.n() == 3);
  CHECK(w.at("Q_a").tuples() == std::vector<Tuple>{{0}, {3}});
  CHECK(w.at("Q_b").tuples() == std::vector<Tuple>{{1}, {2}});
  CHECK(w.at("Q_e").empty());
  CHECK(w.at("last").tuples() == std::vector<Tuple>{{3}});
  CHECK_FALSE(w.has("ordc"));
  CHECK(word_structure("ab", "ab", {true, false}).has("ordc"));
  CHECK_FALSE(word_structure("ab", "ab", {true, false}).has("last"));
  CHECK_THROWS_AS(word_structure("", "ab"), ConfigError);
  CHECK_THROWS_AS(word_structure("ac", "ab"), ConfigError);
  CHECK_THROWS_AS(word_structure("ab", "aab"), ConfigError);
}

TEST_CASE("neutral padding") {
  const auto [u, v] = pad_neutral("abb", "babab", 'e', 1);
  CHECK(u.size() == 12);
  CHECK(v.size() == 12);
  CHECK(u == "abb" + std::string(9, 'e'));
  CHECK(v == "babab" + std::string(7, 'e'));
  const auto [x, y] = pad_neutral("ab", "ab", 'e', 2);
  CHECK(x == y);
  const auto [p, q] = pad_neutral("a", "bb", 'e', 0);
  CHECK(p == "a" + std::string(3, 'e'));
  CHECK(q == "bb" + std::string(2, 'e'));
  CHECK_THROWS_AS(pad_neutral("a", "b", 'e', 16), ConfigError);
}

TEST_CASE("triangle embedding") {
  const FiniteStructure big = embed_triangle("abab", 'e', "abe");
  CHECK(big.n() == 9);
  CHECK(big.at("Q_a").tuples() == std::vector<Tuple>{{6}, {8}});
  CHECK(big.at("Q_b").tuples() == std::vector<Tuple>{{7}, {9}});
  CHECK(big.at("Q_e").size() == 6);
  CHECK(big.at("ordc") == builtin_table(Builtin::ordc, 9));

  const FiniteStructure one = embed_triangle("b", 'e', "abe");
  CHECK(one.n() == 0);
  CHECK(one.at("Q_b").size() == 1);

  const std::string word = "ababba";
  const FiniteStructure s = embed_triangle(word, 'e', "abe");
  const std::uint64_t q = tri(word.size() - 1);
  for (Element x = 0; x <= s.n(); ++x) {
    const char expected = x >= q ? word[x - q] : 'e';
    REQUIRE(s.at(std::string("Q_") + expected).contains({x}));
  }
  CHECK(embed_triangle("eee", 'e', "abe").at("Q_e").size() == 6);
}

TEST_CASE("lifting single plays") {
  const std::string u = "abaab", v = "abaab";
  const Play identity{{}, {4, 3, 2, 1}, {4, 3, 2, 1}};
  const LiftResult r = lift_play(identity, u, v, 'e', "abe");
  CHECK(r.big.a == Tuple{13, 4});
  CHECK(r.big.a == r.big.b);
  CHECK(r.small_conditions);
  CHECK(r.conditions_hold);

  CHECK(lift_play(Play{{}, {4, 3}, {4, 3}}, "aaaaa", "bbbbb", 'e', "abe").big.b == Tuple{13});
  CHECK_THROWS_AS(lift_play(Play{{}, {1}, {1}}, u, v, 'e', "abe"), ConfigError);
  CHECK_THROWS_AS(lift_play(Play{{}, {1, 2}, {1, 1}}, u, v, 'e', "abe"), ConfigError);
  CHECK_THROWS_AS(lift_play(Play{{}, {1, 1}, {1, 1}}, u, "ab", 'e', "abe"), ConfigError);
  CHECK_THROWS_AS(lift_play(Play{{}, {9, 1}, {1, 1}}, u, v, 'e', "abe"), ConfigError);
}

TEST_CASE("lifting sweep on short words") {
  const LiftSweepReport r = lift_sweep(4, 2, "abe", 'e');
  CHECK(r.plays > 0);
  CHECK(r.counterexamples == 0);
  CHECK_FALSE(r.witness_play.has_value());
}
