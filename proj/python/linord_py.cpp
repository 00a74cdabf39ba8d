#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "linord/catalog.hpp"
#include "linord/ef.hpp"
#include "linord/error.hpp"
#include "linord/eval.hpp"
#include "linord/formula.hpp"
#include "linord/io.hpp"
#include "linord/ordb.hpp"
#include "linord/predicates.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace linord;

namespace {

std::string big_to_string(const BigNat& v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

OrdBConfig make_config(const std::vector<std::string>& predicates, std::uint64_t ell,
                       std::uint64_t window, bool sound) {
  OrdBConfig c;
  for (const auto& p : predicates) c.predicates.push_back(predicate_by_name(p));
  c.ell = ell;
  c.window = window;
  c.sound = sound;
  c.validate();
  return c;
}

Catalog catalog_named(const std::string& name, const OrdBConfig* config) {
  if (name == "bit-chain") return bit_chain_catalog();
  if (name == "bit-chain-literal") return bit_chain_catalog(CatalogVariant::literal);
  if (name == "bit-order") return bit_order_catalog();
  if (config == nullptr) throw ConfigError("catalog " + name + " needs a config");
  if (name == "ordb") return ordb_catalog(*config);
  if (name == "pi") return permutation_catalog(*config);
  throw ConfigError("unknown catalog '" + name + "'");
}

py::dict report_dict(const VerifyReport& r) {
  py::dict d;
  d["entry"] = r.entry;
  d["n"] = r.n;
  d["checked"] = r.checked;
  d["mismatches"] = r.mismatches;
  d["witness"] = r.witness ? py::cast(*r.witness) : py::none();
  d["millis"] = r.millis;
  return d;
}

}  // namespace

PYBIND11_MODULE(linord, m) {
  m.doc() = "Built-in predicates, first-order evaluation, linear orders and EF games";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SyntaxError>(m, "FormulaSyntaxError", error.ptr());
  py::register_exception<EvalError>(m, "EvalError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DecodeError>(m, "DecodeError", error.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", error.ptr());

  // triangle coordinates
  m.def("tri", &tri, "i"_a);
  m.def("coords", [](std::uint64_t x) {
    const TriCoord t = coords(x);
    return py::make_tuple(t.c, t.r, t.q);
  }, "x"_a, "(column, row, q) of x");
  m.def("index_of", &index_of, "c"_a, "r"_a);
  m.def("ordc_less", &ordc_less, "x"_a, "y"_a);
  m.def("in_C", &in_C, "x"_a);
  m.def("in_Q", &in_Q, "x"_a);
  m.def("render_triangle", [](Element n, const std::string& mark) {
    if (mark == "values") return render_triangle(n, TriangleMark::values);
    if (mark == "C") return render_triangle(n, TriangleMark::C);
    if (mark == "Q") return render_triangle(n, TriangleMark::Q);
    throw ConfigError("mark must be values, C or Q");
  }, "n"_a, "mark"_a = "values");

  // structures and formulas
  py::class_<FiniteStructure>(m, "Structure")
      .def_property_readonly("n", &FiniteStructure::n)
      .def("relations", [](const FiniteStructure& s) {
        std::vector<std::string> names;
        for (const auto& [name, _] : s.relations()) names.push_back(name);
        return names;
      })
      .def("tuples", [](const FiniteStructure& s, const std::string& name) {
        return s.at(name).tuples();
      }, "name"_a);

  m.def("builtin_structure", [](Element n, const std::vector<std::string>& builtins) {
    FiniteStructure s(n);
    for (const auto& b : builtins) s.add(b, builtin_table(b, n));
    return s;
  }, "n"_a, "builtins"_a);
  m.def("parse_structure", [](const std::string& text) { return parse_structure(text); }, "text"_a);

  m.def("normalize", [](const std::string& text) { return render(parse(text)); }, "text"_a,
        "Parse and print a formula in canonical form");
  m.def("quantifier_rank", [](const std::string& text) { return quantifier_rank(parse(text)); },
        "text"_a);
  m.def("evaluate", [](const FiniteStructure& s, const std::string& text, const Valuation& v) {
    return evaluate(s, parse(text), v);
  }, "structure"_a, "formula"_a, "valuation"_a = Valuation{});
  m.def("define", [](const FiniteStructure& s, const std::string& text,
                     const std::vector<std::string>& vars) {
    return define(s, parse(text), vars).tuples();
  }, "structure"_a, "formula"_a, "vars"_a);

  // catalogs
  m.def("verify", [](const std::string& catalog, const std::vector<std::string>& entries,
                     Element n, const std::vector<std::string>& predicates, std::uint64_t ell,
                     std::uint64_t window) {
    std::optional<OrdBConfig> config;
    if (!predicates.empty()) config = make_config(predicates, ell, window, window == 3 * ell);
    const Catalog c = catalog_named(catalog, config ? &*config : nullptr);
    const auto names = entries.empty() ? c.verifiable() : entries;
    py::list out;
    for (const auto& r : verify_entries(c, names, n)) out.append(report_dict(r));
    return out;
  }, "catalog"_a, "entries"_a, "n"_a, "predicates"_a = std::vector<std::string>{}, "ell"_a = 2,
     "window"_a = 1);

  // order-b
  m.def("min_ell", [](std::uint64_t k, std::optional<std::uint64_t> window) {
    WindowRule rule;
    if (window) rule = {WindowRule::Kind::fixed, *window};
    return min_ell(k, rule);
  }, "k"_a, "window"_a = py::none(), "Smallest ell; window None means w = 3 ell");
  m.def("factorial", [](std::uint64_t n) { return big_to_string(factorial(n)); }, "n"_a);
  m.def("build_ordb", [](const std::vector<std::string>& predicates, std::uint64_t ell,
                         std::uint64_t window, Element n) {
    return build_ordb(make_config(predicates, ell, window, window == 3 * ell), n).rank();
  }, "predicates"_a, "ell"_a, "window"_a, "n"_a, "Rank of each element of [0..n]");
  m.def("decode_ordb", [](const std::vector<Element>& rank, std::size_t k, std::uint64_t window) {
    const DecodeResult r = decode_ordb(OrdBOrder(rank), k, window);
    py::dict d;
    d["ell"] = r.ell ? py::cast(*r.ell) : py::none();
    d["covered"] = r.covered;
    std::vector<std::vector<bool>> members(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (Element x = 0; x <= r.n; ++x) members[i].push_back(r.covered[x] && r.member(x, i));
    }
    d["members"] = members;
    return d;
  }, "rank"_a, "k"_a, "window"_a);
  m.def("perm_unrank", [](std::uint64_t index, std::size_t size) {
    return perm_unrank(BigNat(index), size);
  }, "index"_a, "size"_a);

  // EF games
  m.def("linear_order", &linear_order, "size"_a);
  m.def("word_structure", [](const std::string& w, const std::string& alphabet) {
    return word_structure(w, alphabet);
  }, "word"_a, "alphabet"_a);
  m.def("duplicator_wins", [](const FiniteStructure& a, const FiniteStructure& b, unsigned k) {
    return duplicator_wins(a, b, k);
  }, "a"_a, "b"_a, "rounds"_a);
  m.def("pad_neutral", &pad_neutral, "u"_a, "v"_a, "neutral"_a, "k"_a);
  m.def("lift_play", [](const Tuple& a, const Tuple& b, const std::string& u, const std::string& v,
                        char neutral, const std::string& alphabet) {
    const LiftResult r = lift_play(Play{{}, a, b}, u, v, neutral, alphabet);
    return py::make_tuple(r.big.a, r.big.b, r.small_conditions, r.conditions_hold);
  }, "a"_a, "b"_a, "u"_a, "v"_a, "neutral"_a, "alphabet"_a);
  m.def("lift_sweep", [](std::size_t max_length, unsigned max_k, const std::string& alphabet,
                         char neutral) {
    const auto r = lift_sweep(max_length, max_k, alphabet, neutral);
    return py::dict("word_pairs"_a = r.word_pairs, "plays"_a = r.plays,
                    "counterexamples"_a = r.counterexamples);
  }, "max_length"_a, "max_k"_a, "alphabet"_a, "neutral"_a);
}
