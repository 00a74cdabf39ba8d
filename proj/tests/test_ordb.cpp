#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "linord/error.hpp"
#include "linord/ordb.hpp"
#include "linord/predicates.hpp"

using namespace linord;

namespace {

OrdBConfig toy_squares() { return OrdBConfig::toy_config({predicate_squares()}, 5, 4); }

// (m-1)! >= 2^(k*w), by repeated multiplication.
bool factorial_fits(std::uint64_t ell, std::uint64_t bits) {
  BigNat f = 1;
  for (std::uint64_t i = 2; i < ell; ++i) f *= i;
  BigNat p = 1;
  for (std::uint64_t i = 0; i < bits; ++i) p *= 2;
  return f >= p;
}

std::vector<OrdBConfig> config_matrix() {
  return {
      toy_squares(),
      OrdBConfig::toy_config({predicate_C()}, 4, 2),
      OrdBConfig::toy_config({predicate_C(), predicate_Q()}, 5, 2),
      OrdBConfig::toy_config({predicate_from_bits({true, false, true, true, false, true})}, 3, 1),
      OrdBConfig::toy_config({predicate_empty()}, 3, 1),
      OrdBConfig::sound_config({predicate_squares()}),
  };
}

}  // namespace

TEST_CASE("min_ell") {
  CHECK(min_ell(1) == 23);
  CHECK(factorial(22) >= pow2(69));
  CHECK(factorial(21) < pow2(66));
  CHECK(min_ell(1, {WindowRule::Kind::fixed, 4}) == 5);

  for (std::uint64_t k = 1; k <= 4; ++k) {
    const std::uint64_t ell = min_ell(k);
    INFO("k = " << k);
    CHECK(factorial_fits(ell, k * 3 * ell));
    CHECK_FALSE(factorial_fits(ell - 1, k * 3 * (ell - 1)));
  }
  CHECK(min_ell(2) == 176);
  CHECK(min_ell(3) == 1395);
  CHECK_THROWS_AS(min_ell(0), std::invalid_argument);
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(OrdBConfig::toy_config({}, 5, 4), ConfigError);
  CHECK_THROWS_AS(OrdBConfig::toy_config({predicate_squares()}, 1, 1), ConfigError);
  CHECK_THROWS_AS(OrdBConfig::toy_config({predicate_squares()}, 4, 5), ConfigError);
  OrdBConfig bad = toy_squares();
  bad.sound = true;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(OrdBConfig::sound_config({predicate_C(), predicate_Q()}).ell == 176);
  CHECK_THROWS_AS(predicate_by_name("cubes"), ConfigError);
  CHECK_THROWS_AS(predicate_by_name("bits:012"), ConfigError);
  const UnaryPredicate b = predicate_by_name("bits:0110");
  CHECK_FALSE(b.contains(0));
  CHECK(b.contains(2));
  CHECK_FALSE(b.contains(40));
}

TEST_CASE("backbone and intervals") {
  std::set<std::uint64_t> backbone;
  for (std::uint64_t x = 0; x <= 20; ++x) {
    if (is_backbone(x, 5)) backbone.insert(x);
  }
  CHECK(backbone == std::set<std::uint64_t>{0, 1, 3, 6, 10, 15, 20});
  CHECK(is_backbone(0, 5));
  CHECK_FALSE(is_backbone(2, 5));

  CHECK(interval_of(16, 5).u == 15);
  CHECK(interval_of(16, 5).complete);
  CHECK(interval_of(2, 5).u == 1);
  CHECK_FALSE(interval_of(2, 5).complete);
  CHECK(interval_of(4, 5).u == 3);
  CHECK_FALSE(interval_of(4, 5).complete);
  CHECK_THROWS_AS(interval_of(15, 5), std::invalid_argument);

  for (std::uint64_t x = 0; x <= 3000; ++x) {
    const TriCoord t = coords(x);
    REQUIRE(is_backbone(x, 7) == (t.r % 7 == 0));
    if (!is_backbone(x, 7)) {
      const IntervalBase b = interval_of(x, 7);
      REQUIRE(is_backbone(b.u, 7));
      REQUIRE(coords(b.u).c == t.c);
      bool inner_backbone = false;
      for (std::uint64_t y = b.u + 1; y < b.u + 7; ++y) inner_backbone = inner_backbone || is_backbone(y, 7);
      REQUIRE(b.complete == (is_backbone(b.u + 7, 7) && !inner_backbone));
    }
  }
}

TEST_CASE("window codes") {
  const OrdBConfig cfg = toy_squares();
  const IntervalCode code = window_bits(15, cfg);
  CHECK(code.bits == std::vector<bool>{false, true, false, false});
  CHECK(code.code == 4);
  CHECK_THROWS_AS(window_bits(16, cfg), std::invalid_argument);
  CHECK_THROWS_AS(window_bits(1, cfg), std::invalid_argument);

  const OrdBConfig empty = OrdBConfig::toy_config({predicate_empty(), predicate_empty()}, 6, 3);
  for (std::uint64_t u = 0; u <= 2000; ++u) {
    if (is_backbone(u, 6) && is_complete(u, 6)) REQUIRE(window_bits(u, empty).code == 0);
  }

  const OrdBConfig sound = OrdBConfig::sound_config({predicate_C(), predicate_Q()});
  const BigNat limit = factorial(sound.ell - 1);
  std::mt19937_64 rng(11);
  int sampled = 0;
  while (sampled < 10000) {
    const std::uint64_t c = sound.ell + rng() % 200000;
    const std::uint64_t rows = (c - sound.ell) / sound.ell + 1;
    const std::uint64_t u = index_of(c, (rng() % rows) * sound.ell);
    REQUIRE(is_complete(u, sound.ell));
    REQUIRE(window_bits(u, sound).code < limit);
    ++sampled;
  }
}

TEST_CASE("Lehmer order") {
  CHECK(perm_unrank(0, 4) == std::vector<std::uint32_t>{1, 2, 3, 4});
  CHECK(perm_unrank(4, 4) == std::vector<std::uint32_t>{1, 4, 2, 3});
  CHECK(perm_unrank(23, 4) == std::vector<std::uint32_t>{4, 3, 2, 1});
  for (std::uint64_t m = 0; m < 720; ++m) REQUIRE(perm_rank(perm_unrank(m, 6)) == m);
  CHECK_THROWS_AS(perm_unrank(24, 4), std::out_of_range);
  const std::vector<std::uint32_t> bad{1, 1, 2};
  CHECK_THROWS_AS(perm_rank(bad), std::invalid_argument);
  const BigNat big = factorial(175) - 1;
  CHECK(perm_rank(perm_unrank(big, 175)) == big);
}

TEST_CASE("toy order layout") {
  const OrdBOrder order = build_ordb(toy_squares(), 40);
  CHECK(order.less(16, 19));
  CHECK(order.less(19, 17));
  CHECK(order.less(17, 18));
  CHECK(order.rank_of(0) == 0);
  Element least = 0;
  for (Element r = 0; r <= order.n(); ++r) {
    if (!is_backbone(order.element_at(r), 5)) {
      least = order.element_at(r);
      break;
    }
  }
  CHECK(least == 2);
}

TEST_CASE("order properties across configurations") {
  for (const OrdBConfig& cfg : config_matrix()) {
    const Element n = 300;
    const OrdBOrder order = build_ordb(cfg, n);
    INFO("ell = " << cfg.ell << ", w = " << cfg.window);
    CHECK(order.rank_of(0) == 0);

    // Strict total order: ranks form a bijection onto [0..n].
    std::vector<Element> ranks = order.rank();
    std::sort(ranks.begin(), ranks.end());
    for (Element i = 0; i <= n; ++i) REQUIRE(ranks[i] == i);

    const OrdBOrder wider = build_ordb(cfg, 700);
    for (Element x = 0; x <= n; ++x) {
      const bool bx = is_backbone(x, cfg.ell);
      for (Element y = 0; y <= n; ++y) {
        REQUIRE(order.less(x, y) == wider.less(x, y));
        const bool by = is_backbone(y, cfg.ell);
        if (bx && !by) REQUIRE(order.less(x, y));
        if (bx && by) REQUIRE(order.less(x, y) == ordc_less(x, y));
        if (!bx && !by && interval_of(x, cfg.ell).u != interval_of(y, cfg.ell).u) {
          REQUIRE(order.less(x, y) == (x < y));
        }
      }
    }
  }
}

TEST_CASE("index permutation") {
  for (const OrdBConfig& cfg : {toy_squares(), OrdBConfig::sound_config({predicate_C(), predicate_Q()})}) {
    const Element n = cfg.sound ? 2000 : 300;
    const OrdBOrder order = build_ordb(cfg, n);
    const RelationTable pi = build_pi(cfg, n);
    std::vector<Element> value(n + 1, n + 1);
    std::vector<bool> hit(n + 1, false);
    for (const Tuple& t : pi.tuples()) {
      REQUIRE(value[t[0]] == n + 1);
      value[t[0]] = t[1];
      REQUIRE_FALSE(hit[t[1]]);
      hit[t[1]] = true;
    }
    CHECK(value[0] == 0);
    CHECK(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
    for (Element i = 0; i <= n; ++i) {
      for (Element j = 0; j <= n; ++j) REQUIRE(order.less(i, j) == (value[i] < value[j]));
    }
  }
}

TEST_CASE("decode round trip") {
  for (const OrdBConfig& cfg : config_matrix()) {
    for (Element n : {0u, 1u, 2u, 20u, 300u, 1200u}) {
      const OrdBOrder order = build_ordb(cfg, n);
      const DecodeResult d = decode_ordb(n, builtin_table(Builtin::lt, n), order.table(), cfg.k(), cfg.window);
      const DecodeAudit audit = audit_decode(d, cfg);
      INFO("ell = " << cfg.ell << ", n = " << n);
      CHECK(audit.discrepancies.empty());
      if (d.ell) CHECK(*d.ell == cfg.ell);
      if (cfg.sound) CHECK(audit.coverage_ok);
    }
  }
}

TEST_CASE("decode at the full parameters") {
  const OrdBConfig cfg = OrdBConfig::sound_config({predicate_C(), predicate_Q()});
  const Element n = 30000;
  const DecodeResult d = decode_ordb(build_ordb(cfg, n), 2, cfg.window);
  const DecodeAudit audit = audit_decode(d, cfg);
  CHECK(d.ell == cfg.ell);
  CHECK(audit.discrepancies.empty());
  CHECK(audit.coverage_ok);
  CHECK(audit.coverage_lo == tri(cfg.ell + 1) + 1);
  CHECK(audit.coverage_hi == n - 3 * cfg.ell);
  CHECK(d.covers(audit.coverage_lo, audit.coverage_hi));
}

TEST_CASE("decode rejects orders that build_ordb cannot produce") {
  const OrdBConfig cfg = toy_squares();
  const Element n = 60;
  std::vector<Element> rank = build_ordb(cfg, n).rank();
  std::swap(rank[17], rank[23]);
  try {
    decode_ordb(OrdBOrder(rank), 1, 4);
    FAIL("no error");
  } catch (const DecodeError& e) {
    CHECK(std::string(e.what()).find("interval ordering not a permutation pattern") !=
          std::string::npos);
  }

  std::vector<Element> rank2 = build_ordb(cfg, n).rank();
  std::swap(rank2[2], rank2[3]);
  CHECK_THROWS_AS(decode_ordb(OrdBOrder(rank2), 1, 4), DecodeError);

  RelationTable cyclic(2, 2);
  cyclic.insert({0, 1});
  cyclic.insert({1, 2});
  cyclic.insert({2, 0});
  CHECK_THROWS_AS(decode_ordb(2, builtin_table(Builtin::lt, 2), cyclic, 1, 4), DecodeError);
  CHECK_THROWS_AS(decode_ordb(3, builtin_table(Builtin::ordc, 3), build_ordb(cfg, 3).table(), 1, 4),
                  DecodeError);
}
