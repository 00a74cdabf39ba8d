#include "linord/ef.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "linord/error.hpp"
#include "linord/predicates.hpp"

namespace linord {

namespace {

using RelationPair = std::pair<const RelationTable*, const RelationTable*>;

std::vector<RelationPair> matched_relations(const FiniteStructure& A, const FiniteStructure& B) {
  const auto& ra = A.relations();
  const auto& rb = B.relations();
  if (ra.size() != rb.size()) {
    throw ConfigError("structures have different signatures");
  }
  std::vector<RelationPair> out;
  for (const auto& [name, table] : ra) {
    const RelationTable* other = B.find(name);
    if (other == nullptr) {
      throw ConfigError("relation " + name + " is missing from the second structure");
    }
    if (other->arity() != table.arity()) {
      throw ConfigError("relation " + name + " has different arities");
    }
    out.emplace_back(&table, other);
  }
  return out;
}

bool holds(const RelationTable& table, const Element* t, std::size_t arity) {
  const std::uint64_t base = table.domain_size();
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < arity; ++i) index = index * base + t[i];
  return table.bits().test(index);
}

// Tests the relations on all index tuples that mention index `fresh` (or on
// all tuples when fresh == m).
bool relations_agree(const std::vector<RelationPair>& relations, std::span<const Element> a,
                     std::span<const Element> b, std::size_t fresh) {
  const std::size_t m = a.size();
  Tuple ta, tb;
  std::vector<std::size_t> idx;
  for (const auto& [ra, rb] : relations) {
    const std::size_t arity = ra->arity();
    if (arity == 0) {
      if (fresh == m && ra->empty() != rb->empty()) return false;
      continue;
    }
    if (m == 0) continue;
    if (arity == 1) {
      for (std::size_t i = fresh == m ? 0 : fresh; i < m && (fresh == m || i == fresh); ++i) {
        if (ra->bits().test(a[i]) != rb->bits().test(b[i])) return false;
      }
      continue;
    }
    if (arity == 2) {
      const std::uint64_t na = ra->domain_size(), nb = rb->domain_size();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (fresh != m && i != fresh && j != fresh) continue;
          if (ra->bits().test(a[i] * na + a[j]) != rb->bits().test(b[i] * nb + b[j])) return false;
        }
      }
      continue;
    }
    idx.assign(arity, 0);
    ta.resize(arity);
    tb.resize(arity);
    while (true) {
      bool mentions = fresh == m;
      for (std::size_t i = 0; i < arity; ++i) {
        ta[i] = a[idx[i]];
        tb[i] = b[idx[i]];
        mentions = mentions || idx[i] == fresh;
      }
      if (mentions && holds(*ra, ta.data(), arity) != holds(*rb, tb.data(), arity)) return false;
      std::size_t pos = arity;
      while (pos > 0) {
        --pos;
        if (++idx[pos] < m) break;
        idx[pos] = 0;
        if (pos == 0) goto next_relation;
      }
    }
  next_relation:;
  }
  return true;
}

bool iso(const std::vector<RelationPair>& relations, std::span<const Element> a,
         std::span<const Element> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return relations_agree(relations, a, b, a.size());
}

Element element_a(std::uint64_t pair) { return static_cast<Element>(pair >> 32); }
Element element_b(std::uint64_t pair) { return static_cast<Element>(pair & 0xffffffffu); }
std::uint64_t pack(Element a, Element b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace

// ---------------------------------------------------------------------------
// Structures

FiniteStructure linear_order(Element size) {
  if (size == 0) throw ConfigError("a linear order needs at least one element");
  FiniteStructure s(size - 1);
  s.add("lt", builtin_table(Builtin::lt, size - 1));
  return s;
}

FiniteStructure word_structure(std::string_view word, std::string_view alphabet,
                               WordOptions options) {
  if (word.empty()) throw ConfigError("word must be non-empty");
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (alphabet.find(alphabet[i], i + 1) != std::string_view::npos) {
      throw ConfigError(std::string("letter '") + alphabet[i] + "' repeats in the alphabet");
    }
  }
  const auto n = static_cast<Element>(word.size() - 1);
  std::map<char, RelationTable> letters;
  for (char s : alphabet) letters.emplace(s, RelationTable(1, n));
  for (Element i = 0; i <= n; ++i) {
    auto it = letters.find(word[i]);
    if (it == letters.end()) {
      throw ConfigError(std::string("letter '") + word[i] + "' is not in the alphabet");
    }
    it->second.insert({i});
  }
  FiniteStructure s(n);
  s.add("lt", builtin_table(Builtin::lt, n));
  if (options.ordc) s.add("ordc", builtin_table(Builtin::ordc, n));
  if (options.last) {
    RelationTable last(1, n);
    last.insert({n});
    s.add("last", std::move(last));
  }
  for (auto& [letter, table] : letters) s.add(std::string("Q_") + letter, std::move(table));
  return s;
}

FiniteStructure random_structure(Element size, std::uint64_t seed, double density) {
  if (size == 0) throw ConfigError("a structure needs at least one element");
  const Element n = size - 1;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  RelationTable e(2, n), p(1, n);
  for (Element x = 0; x <= n; ++x) {
    if (coin(rng)) p.insert({x});
    for (Element y = 0; y <= n; ++y) {
      if (coin(rng)) e.insert({x, y});
    }
  }
  FiniteStructure s(n);
  s.add("lt", builtin_table(Builtin::lt, n));
  s.add("E", std::move(e));
  s.add("P", std::move(p));
  return s;
}

// ---------------------------------------------------------------------------
// Games

bool partial_iso_check(const FiniteStructure& A, const FiniteStructure& B,
                       std::span<const Element> a, std::span<const Element> b) {
  const auto relations = matched_relations(A, B);
  if (a.size() != b.size()) throw ConfigError("tuples have different lengths");
  for (Element x : a) {
    if (x > A.n()) throw EvalError("element " + std::to_string(x) + " is outside the first structure");
  }
  for (Element y : b) {
    if (y > B.n()) throw EvalError("element " + std::to_string(y) + " is outside the second structure");
  }
  return iso(relations, a, b);
}

EfSolver::EfSolver(const FiniteStructure& A, const FiniteStructure& B, double budget)
    : A_(A), B_(B), budget_(budget), relations_(matched_relations(A_, B_)) {}

std::size_t EfSolver::PairsHash::operator()(const Pairs& p) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ p.size();
  for (std::uint64_t v : p) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::size_t EfSolver::memo_size() const {
  std::size_t total = 0;
  for (const auto& m : memo_) total += m.size();
  return total;
}

void EfSolver::check_budget(unsigned rounds) const {
  const double states = std::pow(static_cast<double>(A_.size()) * static_cast<double>(B_.size()),
                                 static_cast<double>(rounds));
  if (states > budget_) {
    throw BudgetExceeded("game with " + std::to_string(rounds) + " rounds on " +
                         std::to_string(A_.size()) + " x " + std::to_string(B_.size()) +
                         " elements exceeds the state budget");
  }
}

bool EfSolver::extends(const Pairs& pairs, Element x, Element y) const {
  constexpr std::size_t kInline = 16;
  std::array<Element, kInline> sa, sb;
  Tuple ha, hb;
  const bool inline_storage = pairs.size() < kInline;
  if (!inline_storage) {
    ha.resize(pairs.size() + 1);
    hb.resize(pairs.size() + 1);
  }
  Element* a = inline_storage ? sa.data() : ha.data();
  Element* b = inline_storage ? sb.data() : hb.data();
  std::size_t m = 0;
  for (std::uint64_t p : pairs) {
    const bool same_a = element_a(p) == x;
    const bool same_b = element_b(p) == y;
    if (same_a != same_b) return false;
    if (same_a) return true;
    a[m] = element_a(p);
    b[m] = element_b(p);
    ++m;
  }
  a[m] = x;
  b[m] = y;
  return relations_agree(relations_, {a, m + 1}, {b, m + 1}, m);
}

EfSolver::Pairs EfSolver::with(const Pairs& pairs, Element x, Element y) const {
  Pairs out = pairs;
  const std::uint64_t p = pack(x, y);
  auto it = std::lower_bound(out.begin(), out.end(), p);
  if (it == out.end() || *it != p) out.insert(it, p);
  return out;
}

bool EfSolver::wins(const Pairs& pairs, unsigned rounds) {
  if (rounds == 0) return true;
  auto& memo = memo_[rounds];
  if (auto it = memo.find(pairs); it != memo.end()) return it->second;

  auto answered = [&](Side side, Element x) {
    const Element other = side == Side::A ? B_.n() : A_.n();
    for (Element y = 0; y <= other; ++y) {
      const Element ea = side == Side::A ? x : y;
      const Element eb = side == Side::A ? y : x;
      if (extends(pairs, ea, eb) && (rounds == 1 || wins(with(pairs, ea, eb), rounds - 1))) {
        return true;
      }
    }
    return false;
  };
  auto played = [&](Side side, Element x) {
    return std::any_of(pairs.begin(), pairs.end(), [&](std::uint64_t p) {
      return (side == Side::A ? element_a(p) : element_b(p)) == x;
    });
  };

  bool result = true;
  for (Side side : {Side::A, Side::B}) {
    const Element own = side == Side::A ? A_.n() : B_.n();
    for (Element x = 0; x <= own && result; ++x) {
      if (!played(side, x) && !answered(side, x)) result = false;
    }
  }
  memo.emplace(pairs, result);
  return result;
}

bool EfSolver::duplicator_wins(unsigned rounds) {
  check_budget(rounds);
  if (memo_.size() <= rounds) memo_.resize(rounds + 1);
  return wins({}, rounds);
}

std::unique_ptr<SpoilerNode> EfSolver::strategy(const Pairs& pairs, unsigned rounds) {
  for (Side side : {Side::A, Side::B}) {
    const Element own = side == Side::A ? A_.n() : B_.n();
    const Element other = side == Side::A ? B_.n() : A_.n();
    for (Element x = 0; x <= own; ++x) {
      bool refutes = true;
      for (Element y = 0; y <= other && refutes; ++y) {
        const Element ea = side == Side::A ? x : y;
        const Element eb = side == Side::A ? y : x;
        refutes = !extends(pairs, ea, eb) || !wins(with(pairs, ea, eb), rounds - 1);
      }
      if (!refutes) continue;
      auto node = std::make_unique<SpoilerNode>();
      node->side = side;
      node->element = x;
      node->replies.resize(std::size_t{other} + 1);
      for (Element y = 0; y <= other; ++y) {
        const Element ea = side == Side::A ? x : y;
        const Element eb = side == Side::A ? y : x;
        if (extends(pairs, ea, eb)) node->replies[y] = strategy(with(pairs, ea, eb), rounds - 1);
      }
      return node;
    }
  }
  throw Error("no refuting spoiler move in a position the duplicator loses");
}

std::unique_ptr<SpoilerNode> EfSolver::spoiler_strategy(unsigned rounds) {
  if (duplicator_wins(rounds)) return nullptr;
  return strategy({}, rounds);
}

bool duplicator_wins(const FiniteStructure& A, const FiniteStructure& B, unsigned rounds,
                     double budget) {
  return EfSolver(A, B, budget).duplicator_wins(rounds);
}

namespace {

bool reference(const FiniteStructure& A, const FiniteStructure& B,
               const std::vector<RelationPair>& relations, Tuple& a, Tuple& b, unsigned rounds) {
  if (!iso(relations, a, b)) return false;
  if (rounds == 0) return true;
  for (Side side : {Side::A, Side::B}) {
    Tuple& own_tuple = side == Side::A ? a : b;
    Tuple& other_tuple = side == Side::A ? b : a;
    const Element own = side == Side::A ? A.n() : B.n();
    const Element other = side == Side::A ? B.n() : A.n();
    for (Element x = 0; x <= own; ++x) {
      own_tuple.push_back(x);
      bool answered = false;
      for (Element y = 0; y <= other && !answered; ++y) {
        other_tuple.push_back(y);
        answered = reference(A, B, relations, a, b, rounds - 1);
        other_tuple.pop_back();
      }
      own_tuple.pop_back();
      if (!answered) return false;
    }
  }
  return true;
}

bool replay(const FiniteStructure& A, const FiniteStructure& B, Tuple& a, Tuple& b,
            unsigned rounds, const SpoilerNode& node) {
  if (rounds == 0) return false;
  const Element own = node.side == Side::A ? A.n() : B.n();
  const Element other = node.side == Side::A ? B.n() : A.n();
  if (node.element > own || node.replies.size() != std::size_t{other} + 1) return false;
  Tuple& own_tuple = node.side == Side::A ? a : b;
  Tuple& other_tuple = node.side == Side::A ? b : a;
  own_tuple.push_back(node.element);
  bool ok = true;
  for (Element y = 0; y <= other && ok; ++y) {
    other_tuple.push_back(y);
    if (partial_iso_check(A, B, a, b)) {
      ok = node.replies[y] != nullptr && replay(A, B, a, b, rounds - 1, *node.replies[y]);
    }
    other_tuple.pop_back();
  }
  own_tuple.pop_back();
  return ok;
}

}  // namespace

bool duplicator_wins_reference(const FiniteStructure& A, const FiniteStructure& B,
                               unsigned rounds) {
  const auto relations = matched_relations(A, B);
  Tuple a, b;
  return reference(A, B, relations, a, b, rounds);
}

bool replay_strategy(const FiniteStructure& A, const FiniteStructure& B, unsigned rounds,
                     const SpoilerNode& root) {
  matched_relations(A, B);
  Tuple a, b;
  return replay(A, B, a, b, rounds, root);
}

// ---------------------------------------------------------------------------
// Neutral letters and the triangle embedding

std::pair<std::string, std::string> pad_neutral(std::string_view u, std::string_view v, char e,
                                                unsigned k) {
  if (k > 15) throw ConfigError("padding exponent 2k must be at most 30");
  const std::size_t base = std::size_t{1} << (2 * k);
  std::string pu(u), pv(v);
  pu.append(base + v.size(), e);
  pv.append(base + u.size(), e);
  return {std::move(pu), std::move(pv)};
}

namespace {

std::string embedded_word(std::string_view w, char neutral) {
  if (w.empty()) throw ConfigError("word must be non-empty");
  const std::uint64_t n = w.size() - 1;
  const std::uint64_t q = tri(n);
  std::string out(q + n + 1, neutral);
  for (std::uint64_t i = 0; i <= n; ++i) out[q + i] = w[i];
  return out;
}

}  // namespace

FiniteStructure embed_triangle(std::string_view w, char neutral, std::string_view alphabet) {
  if (alphabet.find(neutral) == std::string_view::npos) {
    throw ConfigError(std::string("neutral letter '") + neutral + "' is not in the alphabet");
  }
  return word_structure(embedded_word(w, neutral), alphabet, {.ordc = true, .last = false});
}

namespace {

Tuple lift_tuple(const Tuple& small, Element n) {
  Tuple big;
  big.reserve(small.size() / 2);
  for (std::size_t i = 0; i + 1 < small.size(); i += 2) {
    const Element column = small[i];
    const Element row = small[i + 1];
    if (column > n || row > n) {
      throw ConfigError("small move " + std::to_string(std::max(column, row)) +
                        " is outside [0.." + std::to_string(n) + "]");
    }
    if (row > column) {
      throw ConfigError("row " + std::to_string(row) + " lies above column " +
                        std::to_string(column));
    }
    big.push_back(static_cast<Element>(index_of(column, row)));
  }
  return big;
}

}  // namespace

LiftResult lift_play(const Play& small, std::string_view u, std::string_view v, char neutral,
                     std::string_view alphabet) {
  if (small.a.size() != small.b.size()) throw ConfigError("play has unequal tuples");
  if (small.a.size() % 2 != 0) throw ConfigError("play must have an even number of rounds");
  if (u.size() != v.size()) throw ConfigError("words must have equal length");
  if (u.empty()) throw ConfigError("word must be non-empty");
  const auto n = static_cast<Element>(u.size() - 1);

  LiftResult out;
  out.big.a = lift_tuple(small.a, n);
  out.big.b = lift_tuple(small.b, n);
  for (std::size_t i = 0; i + 1 < small.sides.size(); i += 2) out.big.sides.push_back(small.sides[i]);

  out.small_conditions =
      partial_iso_check(word_structure(u, alphabet), word_structure(v, alphabet), small.a, small.b);
  out.conditions_hold = partial_iso_check(embed_triangle(u, neutral, alphabet),
                                          embed_triangle(v, neutral, alphabet), out.big.a, out.big.b);
  return out;
}

namespace {

std::vector<std::string> all_words(std::size_t length, std::string_view alphabet) {
  std::vector<std::string> out;
  std::string w(length, alphabet.front());
  std::vector<std::size_t> digit(length, 0);
  while (true) {
    out.push_back(w);
    std::size_t pos = length;
    while (pos > 0) {
      --pos;
      if (++digit[pos] < alphabet.size()) {
        w[pos] = alphabet[digit[pos]];
        break;
      }
      digit[pos] = 0;
      w[pos] = alphabet.front();
      if (pos == 0) return out;
    }
    if (length == 0) return out;
  }
}

// Small positions of `rounds` cells (column, row) over [0..n], flattened.
std::vector<Tuple> cell_tuples(Element n, unsigned cells) {
  std::vector<std::pair<Element, Element>> grid;
  for (Element c = 0; c <= n; ++c) {
    for (Element r = 0; r <= c; ++r) grid.emplace_back(c, r);
  }
  std::vector<Tuple> out;
  std::vector<std::size_t> idx(cells, 0);
  while (true) {
    Tuple t;
    for (std::size_t i : idx) {
      t.push_back(grid[i].first);
      t.push_back(grid[i].second);
    }
    out.push_back(std::move(t));
    std::size_t pos = cells;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < grid.size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (cells == 0) return out;
  }
}

// Equality, order and last-element pattern of a small tuple.
std::vector<std::uint8_t> order_type(const Tuple& t, Element n) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.push_back(t[i] == n);
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      out.push_back(t[i] < t[j] ? 0 : t[i] == t[j] ? 1 : 2);
    }
  }
  return out;
}

}  // namespace

LiftSweepReport lift_sweep(std::size_t max_length, unsigned max_k, std::string_view alphabet,
                           char neutral) {
  if (alphabet.find(neutral) == std::string_view::npos) {
    throw ConfigError(std::string("neutral letter '") + neutral + "' is not in the alphabet");
  }
  LiftSweepReport report;
  for (std::size_t length = 1; length <= max_length; ++length) {
    const auto n = static_cast<Element>(length - 1);
    const auto words = all_words(length, alphabet);
    std::vector<FiniteStructure> embedded;
    embedded.reserve(words.size());
    for (const auto& w : words) embedded.push_back(embed_triangle(w, neutral, alphabet));
    std::vector<std::vector<std::size_t>> letter_of(words.size(), std::vector<std::size_t>(length));
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t p = 0; p < length; ++p) letter_of[i][p] = alphabet.find(words[i][p]);
    }

    for (unsigned k = 1; k <= max_k; ++k) {
      const auto tuples = cell_tuples(n, k);
      std::vector<Tuple> lifted;
      std::map<std::vector<std::uint8_t>, std::uint64_t> type_ids;
      std::vector<std::uint64_t> type_of;
      for (const auto& t : tuples) {
        lifted.push_back(lift_tuple(t, n));
        type_of.push_back(type_ids.emplace(order_type(t, n), type_ids.size()).first->second);
      }
      // The small position (a, b) satisfies the small conditions exactly when
      // both tuples share the order type and the letter sequence.
      std::vector<std::vector<std::pair<std::uint64_t, std::size_t>>> keyed(words.size());
      for (std::size_t w = 0; w < words.size(); ++w) {
        for (std::size_t t = 0; t < tuples.size(); ++t) {
          std::uint64_t key = type_of[t];
          for (Element x : tuples[t]) key = key * alphabet.size() + letter_of[w][x];
          keyed[w].emplace_back(key, t);
        }
        std::sort(keyed[w].begin(), keyed[w].end());
      }

      for (std::size_t wu = 0; wu < words.size(); ++wu) {
        for (std::size_t wv = 0; wv < words.size(); ++wv) {
          if (k == 1) ++report.word_pairs;
          const auto rel = matched_relations(embedded[wu], embedded[wv]);
          const auto& ku = keyed[wu];
          const auto& kv = keyed[wv];
          std::size_t i = 0, j = 0;
          while (i < ku.size() && j < kv.size()) {
            if (ku[i].first < kv[j].first) {
              ++i;
            } else if (kv[j].first < ku[i].first) {
              ++j;
            } else {
              const std::uint64_t key = ku[i].first;
              std::size_t i_end = i, j_end = j;
              while (i_end < ku.size() && ku[i_end].first == key) ++i_end;
              while (j_end < kv.size() && kv[j_end].first == key) ++j_end;
              for (std::size_t x = i; x < i_end; ++x) {
                for (std::size_t y = j; y < j_end; ++y) {
                  ++report.plays;
                  const Tuple& ba = lifted[ku[x].second];
                  const Tuple& bb = lifted[kv[y].second];
                  if (!iso(rel, ba, bb)) {
                    if (report.counterexamples++ == 0) {
                      report.witness_words.emplace(words[wu], words[wv]);
                      report.witness_play = Play{{}, tuples[ku[x].second], tuples[kv[y].second]};
                    }
                  }
                }
              }
              i = i_end;
              j = j_end;
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace linord
