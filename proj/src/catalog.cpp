#include "linord/catalog.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "linord/error.hpp"
#include "linord/eval.hpp"
#include "linord/predicates.hpp"

namespace linord {

Catalog::Catalog(std::string title, std::vector<std::string> builtins,
                 std::optional<OrdBConfig> config)
    : title_(std::move(title)), builtins_(std::move(builtins)), config_(std::move(config)) {}

void Catalog::add(std::string name, std::vector<std::string> params, Formula body,
                  OracleFactory oracle) {
  if (std::find(builtins_.begin(), builtins_.end(), name) != builtins_.end()) {
    throw ConfigError("definition '" + name + "' shadows a builtin of catalog " + title_);
  }
  defs_.add(name, params, std::move(body));
  entries_.push_back({std::move(name), std::move(params), std::move(oracle)});
}

void Catalog::add(std::string name, std::vector<std::string> params, std::string_view text,
                  OracleFactory oracle) {
  add(std::move(name), std::move(params), parse(text), std::move(oracle));
}

const CatalogEntry* Catalog::find(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<std::string> Catalog::verifiable() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.oracle) out.push_back(e.name);
  }
  return out;
}

FiniteStructure Catalog::structure(Element n) const {
  FiniteStructure s(n);
  for (const auto& b : builtins_) s.add(b, builtin_table(b, n, config()));
  return s;
}

Formula build_basic(BasicKind kind, const std::string& order, std::uint64_t c) {
  if (kind == BasicKind::eq_const) return expand_constants(const_eq("x", c));
  if (order != "lt" && order != "ordc" && order != "ordb") {
    throw ConfigError("unknown order '" + order + "' (expected lt, ordc or ordb)");
  }
  auto p = [&](const char* a, const char* b) { return atom(order, {a, b}); };
  switch (kind) {
    case BasicKind::max:
      return neg(exists("z", p("x", "z")));
    case BasicKind::succ:
      return conj(p("x", "y"), neg(exists("z", conj(p("x", "z"), p("z", "y")))));
    case BasicKind::leq:
      return disj(p("x", "y"), eq("x", "y"));
    case BasicKind::eq_const:
      break;
  }
  return nullptr;
}

namespace {

// Oracle factory for a predicate of the tuple alone.
template <class F>
OracleFactory pointwise(F f) {
  return [f](Element) -> Oracle {
    return [f](std::span<const Element> t) -> std::optional<bool> { return f(t); };
  };
}

std::uint64_t col(Element x) { return coords(x).c; }
std::uint64_t row(Element x) { return coords(x).r; }

// Successor of every element in the row-major order on [0..n].
std::vector<Element> ordc_successors(Element n) {
  std::vector<Element> order(std::size_t{n} + 1);
  for (Element x = 0; x <= n; ++x) order[x] = x;
  std::sort(order.begin(), order.end(), [](Element a, Element b) { return ordc_less(a, b); });
  std::vector<Element> succ(order.size(), n + 1);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) succ[order[i]] = order[i + 1];
  return succ;
}

}  // namespace

bool carry_into(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  bool carry = false;
  for (std::uint64_t i = 0; i < p; ++i) {
    const int sum = static_cast<int>(bit(a, i)) + static_cast<int>(bit(b, i)) + (carry ? 1 : 0);
    carry = sum >= 2;
  }
  return carry;
}

Catalog bit_chain_catalog(CatalogVariant variant) {
  const bool literal = variant == CatalogVariant::literal;
  Catalog c(literal ? "bit-chain-literal" : "bit-chain", {"lt", "ordc", "C", "Q"});

  c.add("max_lt", {"x"}, "!exists z. x < z", [](Element n) -> Oracle {
    return [n](std::span<const Element> t) -> std::optional<bool> { return t[0] == n; };
  });
  c.add("succ_lt", {"x", "y"}, "x < y & !exists z. (x < z & z < y)",
        pointwise([](auto t) { return t[1] == t[0] + 1; }));
  c.add("succ_ordc", {"x", "y"}, "x <c y & !exists z. (x <c z & z <c y)", [](Element n) -> Oracle {
    auto succ = ordc_successors(n);
    return [succ](std::span<const Element> t) -> std::optional<bool> { return succ[t[0]] == t[1]; };
  });
  c.add("bot", {"x"}, "forall z. (z = 2 -> x <c z)", pointwise([](auto t) { return row(t[0]) == 0; }));
  c.add("samecol", {"x", "y"},
        "!exists z. (bot(z) & (x < z & (z < y | z = y) | y < z & (z < x | z = x)))",
        pointwise([](auto t) { return col(t[0]) == col(t[1]); }));
  c.add("q", {"x", "y"}, "bot(y) & samecol(x, y)",
        pointwise([](auto t) { return coords(t[0]).q == t[1]; }));
  c.add("lastcolfull", {},
        "exists z. (max_lt(z) & (z = 0 | (exists y. (succ_lt(y, z) & succ_ordc(y, z) & !(y = 0)))))",
        [](Element n) -> Oracle {
          const bool full = row(n) == col(n);
          return [full](std::span<const Element>) -> std::optional<bool> { return full; };
        });
  c.add("diag", {"x"}, "(exists y. (succ_lt(x, y) & bot(y))) | max_lt(x) & lastcolfull()",
        pointwise([](auto t) { return row(t[0]) == col(t[0]); }));
  c.add("samerow", {"x", "y"},
        "!exists z. (diag(z) & (x <c z & (z <c y | z = y) | y <c z & (z <c x | z = x)))",
        pointwise([](auto t) { return row(t[0]) == row(t[1]); }));
  c.add("rc", {"x", "y"}, "exists z. (diag(z) & samerow(x, z) & samecol(z, y))",
        pointwise([](auto t) { return row(t[0]) == col(t[1]); }));
  if (literal) {
    c.add("phiQ", {"x", "u"},
          "exists y. exists z. (samecol(x, y) & succ_ordc(z, y) & samerow(z, y) & samerow(z, u) & Q(z))",
          pointwise([](auto t) { return bit(coords(t[0]).q, row(t[1])); }));
  } else {
    c.add("phiQ", {"x", "u"},
          "exists y. (q(x, y) & (exists p. (succ_lt(p, y) & "
          "(exists z. (samecol(z, p) & samerow(z, u) & Q(z))))))",
          pointwise([](auto t) { return bit(coords(t[0]).q, row(t[1])); }));
  }
  c.add("phiR", {"x", "u"},
        "exists y. exists z. (rc(x, y) & succ_ordc(z, y) & samerow(z, y) & samerow(z, u) & C(z))",
        pointwise([](auto t) { return bit(row(t[0]), row(t[1])); }));
  c.add("carry", {"x", "z"},
        "exists u. (samecol(u, z) & u < z & phiQ(x, u) & phiR(x, u) & "
        "(forall v. (u < v & v < z -> phiQ(x, v) | phiR(x, v))))",
        pointwise([](auto t) {
          const auto p = coords(t[0]);
          return carry_into(p.q, p.r, row(t[1]));
        }));
  c.add("bitR", {"x", "z"},
        "!carry(x, z) & (phiQ(x, z) <-> !phiR(x, z)) | carry(x, z) & (phiQ(x, z) <-> phiR(x, z))",
        pointwise([](auto t) { return bit(t[0], row(t[1])); }));
  c.add("r", {"x", "y"},
        literal ? "forall u. (phiR(x, u) <-> bitR(y, u))"
                : "(y < x | y = x) & (forall u. (phiR(x, u) <-> bitR(y, u)))",
        pointwise([](auto t) { return row(t[0]) == t[1]; }));
  c.add("bit", {"x", "y"},
        literal ? "exists u. (r(u, y) & bitR(x, u))"
                : "(exists u. (r(u, y) & bitR(x, u))) | max_lt(x) & (x = 4 & y = 2 | x = 8 & y = 3)",
        pointwise([](auto t) { return bit(t[0], t[1]); }));
  return c;
}

// ---------------------------------------------------------------------------

namespace {

std::string nm(const std::string& base, std::uint64_t i) { return base + "_" + std::to_string(i); }
std::string nm(const std::string& base, std::uint64_t i, std::uint64_t j) {
  return base + "_" + std::to_string(i) + "_" + std::to_string(j);
}

Formula call(const std::string& rel, std::vector<std::string> args) {
  return atom(rel, std::move(args));
}

// Everything the toy oracles need at one n.
struct ToyFacts {
  OrdBOrder order;
  std::vector<bool> complete;                 // complete within [0..n]
  std::vector<BigNat> code;                   // b(u) where complete
  std::vector<bool> covered;                  // some formula claim about U_i holds
};

ToyFacts toy_facts(const OrdBConfig& config, Element n) {
  ToyFacts f;
  f.order = build_ordb(config, n);
  const std::size_t d = std::size_t{n} + 1;
  f.complete.assign(d, false);
  f.code.assign(d, 0);
  f.covered.assign(d, false);
  const std::uint64_t hard = tri(config.ell + 1);
  for (Element x = 0; x <= n && x <= hard; ++x) f.covered[x] = true;
  for (Element u = 0; u <= n; ++u) {
    if (!is_backbone(u, config.ell) || !is_complete(u, config.ell) || u + config.ell > n) continue;
    f.complete[u] = true;
    f.code[u] = window_bits(u, config).code;
    for (std::uint64_t j = 0; j < config.window && u + j <= n; ++j) f.covered[u + j] = true;
  }
  return f;
}

OracleFactory toy_oracle(const OrdBConfig& config,
                         std::function<std::optional<bool>(const ToyFacts&, std::span<const Element>)> f) {
  return [config, f](Element n) -> Oracle {
    auto facts = std::make_shared<ToyFacts>(toy_facts(config, n));
    return [facts, f](std::span<const Element> t) { return f(*facts, t); };
  };
}

}  // namespace

Catalog ordb_catalog(const OrdBConfig& config) {
  config.validate();
  const std::uint64_t ell = config.ell;
  if (ell > 6) {
    throw ConfigError("ell = " + std::to_string(ell) +
                      " is too large for the formula family ((ell-1)! permutation formulas); use "
                      "the decoder instead");
  }
  const std::size_t k = config.k();
  const std::uint64_t w = config.window;
  const std::uint64_t bits = config.code_bits();
  Catalog c("ordb", {"lt", "ordb"}, config);

  c.add("backbone", {"x"}, "forall y. (y = 2 -> x <b y)",
        pointwise([ell](auto t) { return is_backbone(t[0], ell); }));
  c.add("succ_lt", {"x", "y"}, "x < y & !exists z. (x < z & z < y)",
        pointwise([](auto t) { return t[1] == t[0] + 1; }));
  c.add("max_lt", {"x"}, "!exists z. x < z", [](Element n) -> Oracle {
    return [n](std::span<const Element> t) -> std::optional<bool> { return t[0] == n; };
  });

  // off_j(u, x): x = u + j
  const std::uint64_t max_off = std::max<std::uint64_t>(ell, w);
  c.add("off_0", {"u", "x"}, "u = x", pointwise([](auto t) { return t[1] == t[0]; }));
  c.add("off_1", {"u", "x"}, "succ_lt(u, x)", pointwise([](auto t) { return t[1] == t[0] + 1; }));
  for (std::uint64_t j = 2; j <= max_off; ++j) {
    c.add(nm("off", j), {"u", "x"},
          exists("y", conj(call(nm("off", j - 1), {"u", "y"}), call("succ_lt", {"y", "x"}))),
          pointwise([j](auto t) { return std::uint64_t{t[1]} == t[0] + j; }));
  }

  {
    std::vector<Formula> parts{call("backbone", {"u"}),
                               exists("x", conj(call(nm("off", ell), {"u", "x"}), call("backbone", {"x"})))};
    for (std::uint64_t j = 1; j < ell; ++j) {
      parts.push_back(neg(exists("x", conj(call(nm("off", j), {"u", "x"}), call("backbone", {"x"})))));
    }
    c.add("complete", {"u"}, conj_all(parts),
          toy_oracle(config, [](const ToyFacts& f, auto t) -> std::optional<bool> { return f.complete[t[0]]; }));
  }

  // ord_a_b(u): u + a precedes u + b
  for (std::uint64_t a = 1; a < ell; ++a) {
    for (std::uint64_t b = 1; b < ell; ++b) {
      if (a == b) continue;
      c.add(nm("ord", a, b), {"u"},
            exists("x", conj(call(nm("off", a), {"u", "x"}),
                             exists("y", conj(call(nm("off", b), {"u", "y"}), atom("ordb", {"x", "y"}))))),
            toy_oracle(config, [a, b](const ToyFacts& f, auto t) -> std::optional<bool> {
              const std::uint64_t x = t[0] + a;
              const std::uint64_t y = t[0] + b;
              const Element n = f.order.n();
              return x <= n && y <= n && f.order.less(static_cast<Element>(x), static_cast<Element>(y));
            }));
    }
  }

  // perm_m(u): u is complete within [0..n] and its interval is ordered by pi_m
  const std::uint64_t perms = factorial(ell - 1).convert_to<std::uint64_t>();
  for (std::uint64_t m = 0; m < perms; ++m) {
    const auto p = perm_unrank(m, ell - 1);
    std::vector<Formula> parts{call("complete", {"u"})};
    for (std::size_t i = 0; i + 1 < p.size(); ++i) parts.push_back(call(nm("ord", p[i], p[i + 1]), {"u"}));
    c.add(nm("perm", m), {"u"}, conj_all(parts),
          toy_oracle(config, [m](const ToyFacts& f, auto t) -> std::optional<bool> {
            return f.complete[t[0]] && f.code[t[0]] == m;
          }));
  }

  // code_j_i(u): bit j*k + i of b(u), counted from the most significant end
  const std::uint64_t codes = std::min<std::uint64_t>(perms, std::uint64_t{1} << bits);
  for (std::uint64_t j = 0; j < w; ++j) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t shift = bits - 1 - (j * k + i);
      std::vector<Formula> parts;
      for (std::uint64_t m = 0; m < codes; ++m) {
        if ((m >> shift) & 1U) parts.push_back(call(nm("perm", m), {"u"}));
      }
      c.add(nm("code", j, i + 1), {"u"}, disj_all(parts));
    }
  }

  // U_i(x): hard-coded up to q_{ell+1}, read off an interval window beyond
  const std::uint64_t hard = tri(ell + 1);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Formula> constants;
    for (std::uint64_t x = 0; x <= hard; ++x) {
      if (config.predicates[i].contains(x)) constants.push_back(const_eq("x", x));
    }
    std::vector<Formula> windows;
    for (std::uint64_t j = 0; j < w; ++j) {
      windows.push_back(conj(call(nm("off", j), {"u", "x"}), call(nm("code", j, i + 1), {"u"})));
    }
    const UnaryPredicate pred = config.predicates[i];
    c.add(nm("U", i + 1), {"x"}, disj(disj_all(constants), exists("u", disj_all(windows))),
          toy_oracle(config, [pred](const ToyFacts& f, auto t) -> std::optional<bool> {
            if (!f.covered[t[0]]) return std::nullopt;
            return pred.contains(t[0]);
          }));
  }

  // Row-major order from the backbone rows and interval offsets.
  c.add("base", {"x", "u"},
        "backbone(u) & (u < x | u = x) & !exists z. (u < z & (z < x | z = x) & backbone(z))",
        pointwise([ell](auto t) { return std::uint64_t{t[1]} == t[0] - row(t[0]) % ell; }));
  c.add("succ_b", {"x", "y"}, "x <b y & !exists z. (x <b z & z <b y)");
  c.add("maxbb", {"w"}, "backbone(w) & !exists z. (w <b z & backbone(z))");
  c.add("diagbb", {"w"},
        "backbone(w) & ((exists z. (succ_lt(w, z) & backbone(z))) | max_lt(w) & !(w = " +
            std::to_string(tri(ell)) + ") & (exists p. (succ_b(p, w) & off_" + std::to_string(ell) +
            "(p, w))))");
  c.add("rightmost", {"w"}, "backbone(w) & (maxbb(w) | (exists v. (succ_b(w, v) & diagbb(v))))");
  c.add("rowlt", {"u", "v"}, "exists w. (rightmost(w) & (u <b w | u = w) & w <b v)");
  c.add("rowlt_xv", {"x", "v"}, "exists u. (base(x, u) & rowlt(u, v))");
  c.add("rowltxy", {"x", "y"}, "exists v. (base(y, v) & rowlt_xv(x, v))",
        pointwise([ell](auto t) { return row(t[0]) / ell < row(t[1]) / ell; }));
  for (std::uint64_t i = 0; i < ell; ++i) {
    c.add(nm("offeq", i), {"x"}, exists("u", conj(call("base", {"x", "u"}), call(nm("off", i), {"u", "x"}))),
          pointwise([ell, i](auto t) { return row(t[0]) % ell == i; }));
  }
  c.add("baseless", {"x", "y"}, "exists u. (base(x, u) & (exists v. (base(y, v) & u <b v)))");
  {
    std::vector<Formula> offset_less;
    std::vector<Formula> offset_same;
    for (std::uint64_t i = 0; i < ell; ++i) {
      offset_same.push_back(conj(call(nm("offeq", i), {"x"}), call(nm("offeq", i), {"y"})));
      for (std::uint64_t j = i + 1; j < ell; ++j) {
        offset_less.push_back(conj(call(nm("offeq", i), {"x"}), call(nm("offeq", j), {"y"})));
      }
    }
    Formula same_group = neg(call("rowltxy", {"y", "x"}));
    Formula within = disj(disj_all(offset_less), conj(disj_all(offset_same), call("baseless", {"x", "y"})));
    c.add("ordc_from_b", {"x", "y"}, disj(call("rowltxy", {"x", "y"}), conj(same_group, within)),
          pointwise([](auto t) { return ordc_less(t[0], t[1]); }));
  }
  return c;
}

Catalog permutation_catalog(const OrdBConfig& config) {
  config.validate();
  Catalog c("permutation", {"lt", "pi", "ordb"}, config);
  c.add("ordb_from_pi", {"x", "y"}, "exists u. (pi(x, u) & (exists v. (pi(y, v) & u < v)))",
        [config](Element n) -> Oracle {
          auto order = std::make_shared<OrdBOrder>(build_ordb(config, n));
          return [order](std::span<const Element> t) -> std::optional<bool> {
            return order->less(t[0], t[1]);
          };
        });
  return c;
}

Catalog bit_order_catalog() {
  Catalog c("bit-order", {"bit"});
  auto ranged = [](std::uint64_t limit) {
    return pointwise([limit](auto t) -> std::optional<bool> {
      if (t[0] > limit || t[1] > limit) return std::nullopt;
      return t[0] < t[1];
    });
  };
  c.add("zero", {"z"}, "!exists p. bit(z, p)", pointwise([](auto t) { return t[0] == 0; }));
  c.add("lt_bit_0", {"x", "y"}, "exists z. (zero(z) & !bit(x, z) & bit(y, z))", ranged(1));
  const std::uint64_t limits[] = {1, 3, 15, 65535};
  for (int level = 1; level <= 3; ++level) {
    const std::string below = nm("lt_bit", static_cast<std::uint64_t>(level - 1));
    c.add(nm("lt_bit", static_cast<std::uint64_t>(level)), {"x", "y"},
          "exists i. (bit(y, i) & !bit(x, i) & (forall j. (" + below +
              "(i, j) -> (bit(x, j) <-> bit(y, j)))))",
          ranged(limits[level]));
  }
  c.add("lt_bit", {"x", "y"}, "lt_bit_3(x, y)", ranged(limits[3]));
  return c;
}

// ---------------------------------------------------------------------------

std::vector<VerifyReport> verify_entries(const Catalog& catalog, const std::vector<std::string>& names,
                                         Element n, bool timing) {
  for (const auto& name : names) {
    const CatalogEntry* e = catalog.find(name);
    if (e == nullptr) throw ConfigError("no entry '" + name + "' in catalog " + catalog.title());
    if (!e->oracle) throw ConfigError("entry '" + name + "' has no oracle");
  }
  using Clock = std::chrono::steady_clock;
  const FiniteStructure s = catalog.structure(n);
  CompilingEvaluator ev(s, &catalog.definitions());
  std::vector<VerifyReport> out;
  for (const auto& name : names) {
    const auto start = Clock::now();
    const CatalogEntry& e = *catalog.find(name);
    const Oracle oracle = e.oracle(n);
    const RelationTable& table = ev.definition(name);
    VerifyReport r;
    r.entry = name;
    r.n = n;
    const std::uint64_t total = table.bits().size();
    for (std::uint64_t i = 0; i < total; ++i) {
      const Tuple t = table.tuple_at(i);
      const auto want = oracle(t);
      if (!want) continue;
      ++r.checked;
      if (table.bits().test(i) != *want) {
        if (r.mismatches++ == 0) r.witness = t;
      }
    }
    if (timing) r.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

VerifyReport verify_against_oracle(const Catalog& catalog, const std::string& name, Element n,
                                   bool timing) {
  return verify_entries(catalog, {name}, n, timing).front();
}

namespace {

std::string witness_text(const std::optional<Tuple>& w) {
  if (!w) return "";
  std::string out;
  for (std::size_t i = 0; i < w->size(); ++i) {
    if (i) out += ' ';
    out += std::to_string((*w)[i]);
  }
  return out;
}

std::string millis_text(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

}  // namespace

std::string reports_csv(const std::vector<VerifyReport>& reports) {
  std::string out = "entry,n,checked,mismatches,witness,millis\n";
  for (const auto& r : reports) {
    out += r.entry + ',' + std::to_string(r.n) + ',' + std::to_string(r.checked) + ',' +
           std::to_string(r.mismatches) + ',' + witness_text(r.witness) + ',' + millis_text(r.millis) +
           '\n';
  }
  return out;
}

std::string reports_json(const std::vector<VerifyReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["entry"] = r.entry;
    j["n"] = r.n;
    j["checked"] = r.checked;
    j["mismatches"] = r.mismatches;
    j["witness"] = r.witness ? nlohmann::json(*r.witness) : nlohmann::json(nullptr);
    j["millis"] = r.millis;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace linord
