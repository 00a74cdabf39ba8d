#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "linord/catalog.hpp"
#include "linord/ef.hpp"
#include "linord/error.hpp"
#include "linord/eval.hpp"
#include "linord/formula.hpp"
#include "linord/io.hpp"
#include "linord/ordb.hpp"
#include "linord/predicates.hpp"

using json = nlohmann::json;
using namespace linord;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

// "0..64,128" -> 0, 1, ..., 64, 128
std::vector<Element> parse_n_list(const std::string& text) {
  std::vector<Element> out;
  std::stringstream ss(text);
  std::string part;
  auto num = [&](const std::string& s) -> Element {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("bad number '" + s + "' in n list");
    return static_cast<Element>(v);
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    if (auto dots = part.find(".."); dots != std::string::npos) {
      const Element lo = num(part.substr(0, dots));
      const Element hi = num(part.substr(dots + 2));
      if (lo > hi) throw ConfigError("empty range " + part);
      for (Element n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      out.push_back(num(part));
    }
  }
  if (out.empty()) throw ConfigError("n list is empty");
  return out;
}

Catalog catalog_by_name(const std::string& name, const std::optional<RunConfig>& config) {
  if (name == "bit-chain") return bit_chain_catalog();
  if (name == "bit-chain-literal") return bit_chain_catalog(CatalogVariant::literal);
  if (name == "bit-order") return bit_order_catalog();
  if (name == "ordb" || name == "pi") {
    if (!config) throw ConfigError("catalog " + name + " needs --config");
    return name == "ordb" ? ordb_catalog(config->ordb) : permutation_catalog(config->ordb);
  }
  throw ConfigError("unknown catalog '" + name + "'");
}

std::string tuples_output(const RelationTable& t, const std::vector<std::string>& header,
                          const std::string& format, const std::string& name) {
  const auto tuples = t.tuples();
  if (format == "json") {
    json j;
    j["name"] = name;
    j["arity"] = t.arity();
    j["n"] = t.n();
    j["columns"] = header;
    j["tuples"] = tuples;
    return j.dump(2) + "\n";
  }
  std::string out;
  const char sep = format == "csv" ? ',' : ' ';
  if (format == "csv") {
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
  }
  for (const auto& tuple : tuples) {
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) out += sep;
      out += std::to_string(tuple[i]);
    }
    out += '\n';
  }
  if (t.arity() == 0) out += t.empty() ? "false\n" : "true\n";
  return out;
}

std::string reports_text(const std::vector<VerifyReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += r.entry + " n=" + std::to_string(r.n) + " checked=" + std::to_string(r.checked) +
           " mismatches=" + std::to_string(r.mismatches);
    if (r.witness) {
      out += " witness=(";
      for (std::size_t i = 0; i < r.witness->size(); ++i) {
        out += (i ? "," : "") + std::to_string((*r.witness)[i]);
      }
      out += ")";
    }
    out += r.mismatches == 0 ? "  ok\n" : "  FAIL\n";
  }
  return out;
}

json ranges_json(const std::vector<bool>& flags, bool value) {
  json out = json::array();
  std::size_t i = 0;
  while (i < flags.size()) {
    if (flags[i] != value) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < flags.size() && flags[j + 1] == value) ++j;
    out.push_back({i, j});
    i = j + 1;
  }
  return out;
}

json spoiler_json(const SpoilerNode& node) {
  json j;
  j["side"] = node.side == Side::A ? "A" : "B";
  j["element"] = node.element;
  json replies = json::object();
  for (std::size_t y = 0; y < node.replies.size(); ++y) {
    replies[std::to_string(y)] = node.replies[y] ? spoiler_json(*node.replies[y]) : json("lost");
  }
  j["replies"] = replies;
  return j;
}

Tuple parse_tuple(const std::string& text) {
  Tuple out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(static_cast<Element>(std::stoul(part)));
    } catch (const std::exception&) {
      throw ConfigError("bad element '" + part + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Built-in predicates, linear orders and EF games over finite prefixes of N"};
  app.require_subcommand(1);
  int status = kOk;

  // show-triangle
  auto* show = app.add_subcommand("show-triangle", "Draw [0..n] in the triangular matrix");
  Element show_n = 0;
  std::string annotate = "values", word;
  char neutral = 'e';
  show->add_option("--n", show_n, "Largest element");
  show->add_option("--annotate", annotate, "values, C, Q or word")
      ->check(CLI::IsMember({"values", "C", "Q", "word"}));
  show->add_option("--word", word, "Word placed on the last column (annotate=word)");
  show->add_option("--neutral", neutral, "Neutral letter for the other cells");
  show->callback([&] {
    if (annotate == "word") {
      if (word.empty()) throw ConfigError("annotate=word needs --word");
      const std::uint64_t m = word.size() - 1;
      const std::uint64_t q = tri(m);
      std::string letters(q + m + 1, neutral);
      for (std::uint64_t i = 0; i <= m; ++i) letters[q + i] = word[i];
      std::cout << render_triangle(static_cast<Element>(q + m), TriangleMark::word, letters);
      return;
    }
    const TriangleMark mark = annotate == "C"   ? TriangleMark::C
                              : annotate == "Q" ? TriangleMark::Q
                                                : TriangleMark::values;
    std::cout << render_triangle(show_n, mark);
  });

  // table
  auto* table = app.add_subcommand("table", "Print a built-in relation on [0..n]");
  std::string table_builtin, format = "csv", out_path, config_path;
  Element table_n = 0;
  table->add_option("builtin", table_builtin, "lt, ordc, C, Q, bit, plus, times, squares, exp, ordb, pi")
      ->required();
  table->add_option("--n", table_n, "Largest element")->required();
  table->add_option("--config", config_path, "OrdB config (ordb, pi)");
  table->add_option("--format", format)->check(CLI::IsMember({"csv", "json", "text"}));
  table->add_option("--out", out_path);
  table->callback([&] {
    std::optional<RunConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    const auto b = builtin_from_name(table_builtin);
    if (!b) throw ConfigError("unknown builtin '" + table_builtin + "'");
    const auto t = builtin_table(*b, table_n, cfg ? &cfg->ordb : nullptr);
    std::vector<std::string> header;
    for (std::size_t i = 0; i < t.arity(); ++i) header.push_back("x" + std::to_string(i + 1));
    emit(out_path, tuples_output(t, header, format, table_builtin));
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a formula or catalog entry on a structure");
  std::string structure_path, formula_text, entry_name, catalog_name = "bit-chain";
  std::vector<std::string> assignments;
  eval->add_option("--structure", structure_path, "Structure description file")->required();
  eval->add_option("--formula", formula_text, "Formula text");
  eval->add_option("--entry", entry_name, "Catalog entry, applied to its parameters");
  eval->add_option("--catalog", catalog_name, "bit-chain, bit-chain-literal, ordb, pi or bit-order");
  eval->add_option("--config", config_path, "OrdB config for the ordb and pi catalogs");
  eval->add_option("--assign", assignments, "var=element, repeatable");
  eval->add_option("--format", format)->check(CLI::IsMember({"csv", "json", "text"}));
  eval->add_option("--out", out_path);
  eval->callback([&] {
    if (formula_text.empty() == entry_name.empty()) {
      throw ConfigError("give exactly one of --formula and --entry");
    }
    const FiniteStructure s = load_structure(structure_path);
    std::optional<Catalog> catalog;
    Formula f;
    if (!entry_name.empty()) {
      std::optional<RunConfig> cfg;
      if (!config_path.empty()) cfg = load_config(config_path);
      catalog.emplace(catalog_by_name(catalog_name, cfg));
      const CatalogEntry* e = catalog->find(entry_name);
      if (e == nullptr) throw ConfigError("no entry '" + entry_name + "' in " + catalog_name);
      f = atom(entry_name, e->params);
    } else {
      f = parse(formula_text);
    }
    const Definitions* defs = catalog ? &catalog->definitions() : nullptr;
    Valuation v;
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw ConfigError("--assign expects var=element");
      v[a.substr(0, eq)] = parse_tuple(a.substr(eq + 1)).at(0);
    }
    CompilingEvaluator ev(s, defs);
    std::vector<std::string> open;
    for (const auto& x : free_vars(f)) {
      if (!v.count(x)) open.push_back(x);
    }
    if (open.empty()) {
      emit(out_path, ev.holds(f, v) ? "true\n" : "false\n");
      return;
    }
    Formula g = f;
    for (const auto& [var, value] : v) g = conj(g, const_eq(var, value));
    emit(out_path, tuples_output(ev.define(g, open), open, format, "result"));
  });

  // verify
  auto* verify = app.add_subcommand("verify", "Check catalog formulas against their oracles");
  std::vector<std::string> entries;
  std::string n_list = "0..12";
  bool timing = false;
  verify->add_option("--entry", entries, "Entry name or all, repeatable")->required();
  verify->add_option("--n", n_list, "Domain sizes, e.g. 0..64,128");
  verify->add_option("--catalog", catalog_name, "bit-chain, bit-chain-literal, ordb, pi or bit-order");
  verify->add_option("--config", config_path, "OrdB config for the ordb and pi catalogs");
  verify->add_option("--format", format)->check(CLI::IsMember({"csv", "json", "text"}));
  verify->add_option("--out", out_path);
  verify->add_flag("--timing", timing, "Fill in the millis field");
  verify->callback([&] {
    std::optional<RunConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    const Catalog catalog = catalog_by_name(catalog_name, cfg);
    std::vector<std::string> names;
    for (const auto& e : entries) {
      if (e == "all") {
        for (const auto& v : catalog.verifiable()) names.push_back(v);
      } else {
        names.push_back(e);
      }
    }
    std::vector<VerifyReport> reports;
    for (Element n : parse_n_list(n_list)) {
      for (auto& r : verify_entries(catalog, names, n, timing)) reports.push_back(std::move(r));
    }
    const std::string text = format == "json"  ? reports_json(reports) + "\n"
                             : format == "csv" ? reports_csv(reports)
                                               : reports_text(reports);
    emit(out_path, text);
    for (const auto& r : reports) {
      if (r.mismatches != 0) status = kFailed;
    }
  });

  // build-ordb
  auto* build = app.add_subcommand("build-ordb", "Write the ranks of the order on [0..n]");
  std::optional<Element> order_n;
  build->add_option("--config", config_path, "OrdB config")->required();
  build->add_option("--n", order_n, "Largest element (default from the config)");
  build->add_option("--out", out_path, "Rank CSV (default stdout)");
  build->callback([&] {
    const RunConfig cfg = load_config(config_path);
    const auto n = order_n ? order_n : cfg.n;
    if (!n) throw ConfigError("give --n or set n in the config");
    emit(out_path, rank_csv(build_ordb(cfg.ordb, *n)));
  });

  // decode-ordb
  auto* decode = app.add_subcommand("decode-ordb", "Recover predicates and ordc from an order");
  std::string order_path;
  std::optional<std::size_t> decode_k;
  std::optional<std::uint64_t> decode_w;
  decode->add_option("--order", order_path, "Rank CSV")->required();
  decode->add_option("--k", decode_k, "Number of predicates (default from the config)");
  decode->add_option("--w", decode_w, "Window (default from the config)");
  decode->add_option("--config", config_path, "Config whose predicates the decode is audited against");
  decode->add_option("--out", out_path, "JSON report (default stdout)");
  decode->callback([&] {
    std::optional<RunConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    const std::size_t k = decode_k ? *decode_k : cfg ? cfg->ordb.k() : 0;
    const std::uint64_t w = decode_w ? *decode_w : cfg ? cfg->ordb.window : 0;
    if (k == 0 || w == 0) throw ConfigError("give --k and --w or a --config");
    const OrdBOrder order = parse_rank_csv(read_file(order_path));
    json report;
    report["n"] = order.n();
    report["k"] = k;
    report["w"] = w;
    DecodeResult result;
    try {
      result = decode_ordb(order, k, w);
    } catch (const DecodeError& e) {
      report["error"] = e.what();
      emit(out_path, report.dump(2) + "\n");
      status = kFailed;
      return;
    }
    report["ell"] = result.ell ? json(*result.ell) : json(nullptr);
    report["covered"] = result.covered_count();
    report["uncovered_ranges"] = ranges_json(result.covered, false);
    report["intervals"] = result.intervals.size();
    if (cfg) {
      const DecodeAudit audit = audit_decode(result, cfg->ordb);
      json disc = json::array();
      for (const auto& d : audit.discrepancies) disc.push_back({{"kind", d.kind}, {"x", d.x}, {"y", d.y}});
      report["audit"] = {{"predicate_checks", audit.predicate_checks},
                         {"ordc_checks", audit.ordc_checks},
                         {"coverage_lo", audit.coverage_lo},
                         {"coverage_hi", audit.coverage_hi},
                         {"coverage_ok", audit.coverage_ok},
                         {"discrepancy_count", audit.discrepancies.size()},
                         {"discrepancies", disc}};
      if (!audit.discrepancies.empty() || (cfg->ordb.sound && !audit.coverage_ok)) status = kFailed;
    }
    emit(out_path, report.dump(2) + "\n");
  });

  // pi
  auto* pi = app.add_subcommand("pi", "Write the index permutation of the order");
  pi->add_option("--config", config_path, "OrdB config")->required();
  pi->add_option("--n", order_n, "Largest element (default from the config)");
  pi->add_option("--out", out_path, "CSV element,pi (default stdout)");
  pi->callback([&] {
    const RunConfig cfg = load_config(config_path);
    const auto n = order_n ? order_n : cfg.n;
    if (!n) throw ConfigError("give --n or set n in the config");
    const OrdBOrder order = build_ordb(cfg.ordb, *n);
    const RelationTable graph = build_pi(cfg.ordb, *n);
    std::vector<Element> image(std::size_t{*n} + 1, 0);
    std::string csv = "element,pi\n";
    for (const auto& t : graph.tuples()) image[t[0]] = t[1];
    for (Element x = 0; x <= *n; ++x) csv += std::to_string(x) + ',' + std::to_string(image[x]) + '\n';
    std::uint64_t violations = graph.size() == std::size_t{*n} + 1 ? 0 : 1;
    for (Element x = 0; x <= *n; ++x) {
      for (Element y = 0; y <= *n; ++y) {
        if (order.less(x, y) != (image[x] < image[y])) ++violations;
      }
    }
    emit(out_path, csv);
    std::cerr << "pi: " << violations << " violations over " << (std::uint64_t{*n} + 1) * (*n + 1)
              << " pairs\n";
    if (violations != 0) status = kFailed;
  });

  // min-ell
  auto* minell = app.add_subcommand("min-ell", "Smallest ell with (ell-1)! >= 2^(k w)");
  std::string k_range = "1..4", w_rule = "3l";
  minell->add_option("--k", k_range, "k values, e.g. 1..4");
  minell->add_option("--w", w_rule, "3l or a fixed window");
  minell->callback([&] {
    WindowRule rule;
    if (w_rule != "3l") {
      const Tuple w = parse_tuple(w_rule);
      if (w.size() != 1) throw ConfigError("--w expects 3l or a number");
      rule = {WindowRule::Kind::fixed, w[0]};
    }
    std::cout << "k,ell,w,ell_ok,ell_minus_1_fails\n";
    for (Element k : parse_n_list(k_range)) {
      if (k == 0) throw ConfigError("k must be positive");
      const std::uint64_t ell = min_ell(k, rule);
      const bool ok = factorial(ell - 1) >= pow2(k * rule.window(ell));
      const bool prev_fails = ell == 2 || factorial(ell - 2) < pow2(k * rule.window(ell - 1));
      std::cout << k << ',' << ell << ',' << rule.window(ell) << ',' << (ok ? "true" : "false") << ','
                << (prev_fails ? "true" : "false") << '\n';
      if (!ok || !prev_fails) status = kFailed;
    }
  });

  // ef
  auto* ef = app.add_subcommand("ef", "Ehrenfeucht-Fraisse experiments");
  ef->require_subcommand(1);
  unsigned rounds = 2;
  std::string alphabet = "abe", u, v;
  std::vector<Element> linear;
  std::string word_a, word_b, file_a, file_b;
  bool with_strategy = false;

  auto* solve = ef->add_subcommand("solve", "Decide the k-round game on two structures");
  solve->add_option("--linear", linear, "Two sizes a b for L_a vs L_b")->expected(2);
  solve->add_option("--words", word_a, "First word (with --words2)");
  solve->add_option("--words2", word_b, "Second word");
  solve->add_option("--alphabet", alphabet);
  solve->add_option("--structures", file_a, "First structure file (with --structures2)");
  solve->add_option("--structures2", file_b, "Second structure file");
  solve->add_option("--k", rounds, "Rounds");
  solve->add_flag("--strategy", with_strategy, "Include a spoiler strategy when one exists");
  solve->add_option("--out", out_path);
  solve->callback([&] {
    std::optional<FiniteStructure> A, B;
    if (!linear.empty()) {
      A = linear_order(linear[0]);
      B = linear_order(linear[1]);
    } else if (!word_a.empty() && !word_b.empty()) {
      A = word_structure(word_a, alphabet);
      B = word_structure(word_b, alphabet);
    } else if (!file_a.empty() && !file_b.empty()) {
      A = load_structure(file_a);
      B = load_structure(file_b);
    } else {
      throw ConfigError("give --linear, --words/--words2 or --structures/--structures2");
    }
    EfSolver solver(*A, *B);
    json j;
    j["k"] = rounds;
    j["size_a"] = A->size();
    j["size_b"] = B->size();
    j["duplicator_wins"] = solver.duplicator_wins(rounds);
    if (with_strategy && !j["duplicator_wins"].get<bool>()) {
      auto s = solver.spoiler_strategy(rounds);
      j["strategy_replays"] = replay_strategy(*A, *B, rounds, *s);
      j["strategy"] = spoiler_json(*s);
    }
    j["memo_states"] = solver.memo_size();
    emit(out_path, j.dump(2) + "\n");
  });

  auto* lift = ef->add_subcommand("lift", "Lift a small play to the triangle embedding");
  std::string play_a, play_b;
  lift->add_option("--u", u, "Word of the first structure")->required();
  lift->add_option("--v", v, "Word of the second structure")->required();
  lift->add_option("--a", play_a, "Small moves in the first structure, comma separated")->required();
  lift->add_option("--b", play_b, "Small moves in the second structure")->required();
  lift->add_option("--neutral", neutral);
  lift->add_option("--alphabet", alphabet);
  lift->add_option("--out", out_path);
  lift->callback([&] {
    Play small{{}, parse_tuple(play_a), parse_tuple(play_b)};
    const LiftResult r = lift_play(small, u, v, neutral, alphabet);
    json j;
    j["small"] = {{"a", small.a}, {"b", small.b}, {"conditions", r.small_conditions}};
    j["big"] = {{"a", r.big.a}, {"b", r.big.b}, {"conditions", r.conditions_hold}};
    j["N"] = tri(u.size() - 1) + u.size() - 1;
    emit(out_path, j.dump(2) + "\n");
    if (r.small_conditions && !r.conditions_hold) status = kFailed;
  });

  auto* sweep = ef->add_subcommand("sweep", "Lift every small position over all word pairs");
  std::size_t max_length = 4;
  sweep->add_option("--max-length", max_length);
  sweep->add_option("--k", rounds, "Largest k (2k small rounds)");
  sweep->add_option("--alphabet", alphabet);
  sweep->add_option("--neutral", neutral);
  sweep->callback([&] {
    const auto r = lift_sweep(max_length, rounds, alphabet, neutral);
    json j;
    j["word_pairs"] = r.word_pairs;
    j["plays"] = r.plays;
    j["counterexamples"] = r.counterexamples;
    if (r.witness_words) {
      j["witness"] = {{"u", r.witness_words->first},
                      {"v", r.witness_words->second},
                      {"a", r.witness_play->a},
                      {"b", r.witness_play->b}};
    }
    std::cout << j.dump(2) << '\n';
    if (r.counterexamples != 0) status = kFailed;
  });

  auto* linear_sweep = ef->add_subcommand("linear", "Sweep L_a vs L_b against the reference solver");
  Element max_size = 10;
  linear_sweep->add_option("--max", max_size, "Largest order size");
  linear_sweep->add_option("--k", rounds, "Largest number of rounds");
  linear_sweep->callback([&] {
    std::cout << "a,b,k,duplicator_wins,reference_agrees\n";
    for (unsigned k = 1; k <= rounds; ++k) {
      for (Element a = 1; a <= max_size; ++a) {
        for (Element b = 1; b <= max_size; ++b) {
          const auto A = linear_order(a), B = linear_order(b);
          const bool wins = duplicator_wins(A, B, k);
          const bool agrees = wins == duplicator_wins_reference(A, B, k);
          std::cout << a << ',' << b << ',' << k << ',' << wins << ',' << agrees << '\n';
          if (!agrees) status = kFailed;
        }
      }
    }
  });

  auto* reflex = ef->add_subcommand("reflexive", "Check the copy strategy on random structures");
  std::uint64_t seed = 1;
  std::size_t count = 50;
  reflex->add_option("--seed", seed);
  reflex->add_option("--count", count);
  reflex->add_option("--k", rounds, "Largest number of rounds");
  reflex->callback([&] {
    std::mt19937_64 rng(seed);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const Element size = 1 + static_cast<Element>(rng() % 12);
      const auto s = random_structure(size, rng());
      for (unsigned k = 1; k <= rounds; ++k) {
        if (!duplicator_wins(s, s, k)) ++failures;
      }
    }
    std::cout << "structures=" << count << " failures=" << failures << '\n';
    if (failures != 0) status = kFailed;
  });

  auto* pad = ef->add_subcommand("pad", "Pad two words with neutral letters");
  unsigned pad_k = 1;
  pad->add_option("--u", u)->required();
  pad->add_option("--v", v)->required();
  pad->add_option("--neutral", neutral);
  pad->add_option("--k", pad_k);
  pad->callback([&] {
    const auto [pu, pv] = pad_neutral(u, v, neutral, pad_k);
    std::cout << pu << '\n' << pv << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const DecodeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return status;
}
