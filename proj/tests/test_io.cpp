#include <doctest.h>

#include <filesystem>

#include "linord/error.hpp"
#include "linord/io.hpp"
#include "linord/predicates.hpp"

using namespace linord;

TEST_CASE("configuration files") {
  const RunConfig toy = parse_config("# toy\npredicates = Squares\nl = 5\nw = 4\nn = 300\n");
  CHECK(toy.ordb.k() == 1);
  CHECK(toy.ordb.ell == 5);
  CHECK(toy.ordb.window == 4);
  CHECK_FALSE(toy.ordb.sound);
  CHECK(toy.n == 300u);

  const RunConfig real = parse_config("k = 2\npredicates = C, Q\nl = auto\nw = 3l\n");
  CHECK(real.ordb.ell == 176);
  CHECK(real.ordb.window == 528);
  CHECK(real.ordb.sound);
  CHECK_FALSE(real.n.has_value());

  CHECK(parse_config("predicates = C\nell = auto\nw = 4\n").ordb.ell == 5);

  try {
    parse_config("predicates = C\nl = 5\nw = four\n");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_config("l = 5\nw = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("k = 2\npredicates = C\nl = 5\nw = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("predicates = C\nl = 5\nw = 4\nmode = sound\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("predicates = C\nl = 5\nw = 4\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("predicates = C\nl = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("predicates = C, cubes\nl = 5\nw = 4\n"), ConfigError);
}

TEST_CASE("structure files") {
  const FiniteStructure s = parse_structure(
      "n = 5\nbuiltins = lt, C\nrelation E/2 = (0,1) (1, 2)\nrelation P/1 = 3 5\n# done\n");
  CHECK(s.n() == 5);
  CHECK(s.at("lt") == builtin_table(Builtin::lt, 5));
  CHECK(s.at("C") == builtin_table(Builtin::C, 5));
  CHECK(s.at("E").tuples() == std::vector<Tuple>{{0, 1}, {1, 2}});
  CHECK(s.at("P").tuples() == std::vector<Tuple>{{3}, {5}});

  const FiniteStructure w = parse_structure("word = abba\nalphabet = abe\nbuiltins = lt\n");
  CHECK(w.n() == 3);
  CHECK(w.at("Q_b").tuples() == std::vector<Tuple>{{1}, {2}});
  CHECK(w.at("Q_e").empty());

  CHECK_THROWS_AS(parse_structure("builtins = lt\n"), ConfigError);
  CHECK_THROWS_AS(parse_structure("n = 3\nrelation P/1 = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_structure("n = 3\nrelation E/2 = (0,1,2)\n"), ConfigError);
  CHECK_THROWS_AS(parse_structure("n = 3\nrelation E/2 = (0,1\n"), ConfigError);
  CHECK_THROWS_AS(parse_structure("n = 3\nword = ab\n"), ConfigError);
  CHECK_THROWS_AS(parse_structure("word = abc\nalphabet = ab\n"), ConfigError);
  CHECK_THROWS_AS(parse_structure("n = 3\nbuiltins = ordb\n"), ConfigError);
  CHECK_THROWS_AS(parse_structure("n = 3\nbuiltins = lt\nrelation lt/2 = (0,1)\n"), ConfigError);
}

TEST_CASE("structure files with an order configuration") {
  const auto dir = std::filesystem::temp_directory_path() / "linord_io_test";
  std::filesystem::create_directories(dir);
  write_file(dir / "toy.cfg", "predicates = Squares\nl = 5\nw = 4\n");
  write_file(dir / "s.txt", "n = 30\nbuiltins = lt, ordb, pi\nconfig = toy.cfg\n");
  const FiniteStructure s = load_structure(dir / "s.txt");
  const OrdBConfig cfg = OrdBConfig::toy_config({predicate_squares()}, 5, 4);
  CHECK(s.at("ordb") == build_ordb(cfg, 30).table());
  CHECK(s.at("pi") == build_pi(cfg, 30));
  CHECK_THROWS_AS(load_structure(dir / "missing.txt"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rank files") {
  const OrdBOrder order = build_ordb(OrdBConfig::toy_config({predicate_squares()}, 5, 4), 25);
  const std::string csv = rank_csv(order);
  CHECK(csv.rfind("element,rank\n0,0\n", 0) == 0);
  CHECK(parse_rank_csv(csv).rank() == order.rank());
  CHECK_THROWS_AS(parse_rank_csv("x,y\n0,0\n"), ConfigError);
  CHECK_THROWS_AS(parse_rank_csv("element,rank\n0,0\n1,0\n"), ConfigError);
  CHECK_THROWS_AS(parse_rank_csv("element,rank\n0,zero\n"), ConfigError);
}
