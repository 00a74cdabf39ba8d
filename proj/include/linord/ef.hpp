#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linord/relation.hpp"

namespace linord {

// ---------------------------------------------------------------------------
// Structures

// <[0..size-1], lt>. Throws ConfigError when size is 0.
FiniteStructure linear_order(Element size);

struct WordOptions {
  bool ordc = false;  // add the row-major order on [0..n]
  bool last = true;   // add last = {n}, standing in for the constant n
};

// <[0..n], lt, Q_s for every s in alphabet> with n = |word| - 1. Q_s is named
// "Q_" followed by the letter. Throws ConfigError on an empty word, a repeated
// alphabet letter or a letter outside the alphabet.
FiniteStructure word_structure(std::string_view word, std::string_view alphabet,
                               WordOptions options = {});

// Random structure on [0..size-1] with lt, a binary E and a unary P, each
// extra tuple present with probability density.
FiniteStructure random_structure(Element size, std::uint64_t seed, double density = 0.3);

// ---------------------------------------------------------------------------
// Games

enum class Side { A, B };

// The chosen elements of a play; sides[i] records where the spoiler moved in
// round i when known.
struct Play {
  std::vector<Side> sides;
  Tuple a;
  Tuple b;
};

// a_i -> b_i preserves equality and every relation in both directions.
// Throws ConfigError when the signatures differ or the tuples have different
// lengths, and EvalError when an element is outside its domain.
bool partial_iso_check(const FiniteStructure& A, const FiniteStructure& B,
                       std::span<const Element> a, std::span<const Element> b);

// A spoiler strategy that wins from some position. replies[y] is the
// continuation after the duplicator answers y in the other structure, or null
// when that answer already breaks the partial isomorphism.
struct SpoilerNode {
  Side side = Side::A;
  Element element = 0;
  std::vector<std::unique_ptr<SpoilerNode>> replies;
};

class EfSolver {
 public:
  // Throws ConfigError when the signatures differ.
  EfSolver(const FiniteStructure& A, const FiniteStructure& B,
           double budget = 1e8);
  EfSolver(const EfSolver&) = delete;
  EfSolver& operator=(const EfSolver&) = delete;

  // Throws BudgetExceeded when (|A|*|B|)^rounds exceeds the budget.
  bool duplicator_wins(unsigned rounds);

  // A winning spoiler strategy for the empty starting position, or null when
  // the duplicator wins.
  std::unique_ptr<SpoilerNode> spoiler_strategy(unsigned rounds);

  // Positions stored in the memo so far.
  std::size_t memo_size() const;

 private:
  using Pairs = std::vector<std::uint64_t>;  // sorted (a << 32 | b)

  struct PairsHash {
    std::size_t operator()(const Pairs& p) const;
  };

  bool wins(const Pairs& pairs, unsigned rounds);
  bool extends(const Pairs& pairs, Element x, Element y) const;
  Pairs with(const Pairs& pairs, Element x, Element y) const;
  std::unique_ptr<SpoilerNode> strategy(const Pairs& pairs, unsigned rounds);
  void check_budget(unsigned rounds) const;

  FiniteStructure A_;
  FiniteStructure B_;
  double budget_;
  std::vector<std::pair<const RelationTable*, const RelationTable*>> relations_;
  std::vector<std::unordered_map<Pairs, bool, PairsHash>> memo_;  // indexed by rounds left
};

bool duplicator_wins(const FiniteStructure& A, const FiniteStructure& B, unsigned rounds,
                     double budget = 1e8);

// Plain game-tree search with no memo and a full partial isomorphism test
// after every move.
bool duplicator_wins_reference(const FiniteStructure& A, const FiniteStructure& B,
                               unsigned rounds);

// True when every duplicator answer along the strategy ends in a position
// that is not a partial isomorphism within the given rounds.
bool replay_strategy(const FiniteStructure& A, const FiniteStructure& B, unsigned rounds,
                     const SpoilerNode& root);

// ---------------------------------------------------------------------------
// Neutral letters and the triangle embedding

// u·e^(2^(2k)+|v|) and v·e^(2^(2k)+|u|). Throws ConfigError when k > 15.
std::pair<std::string, std::string> pad_neutral(std::string_view u, std::string_view v,
                                                char e, unsigned k);

// <[0..N], lt, ordc, Q_s> with N = tri(n) + n, n = |w| - 1, carrying w[i] at
// q_n + i and the neutral letter everywhere else.
FiniteStructure embed_triangle(std::string_view w, char neutral, std::string_view alphabet);

struct LiftResult {
  Play big;
  bool small_conditions = false;  // final small position is a partial isomorphism
  bool conditions_hold = false;   // lifted position is a partial isomorphism
};

// Reads the small play two rounds at a time as (column, row) and moves to
// q_column + row in the embedded words. Throws ConfigError on an odd-length
// or unequal play, unequal word lengths, or a row above its column.
LiftResult lift_play(const Play& small, std::string_view u, std::string_view v, char neutral,
                     std::string_view alphabet);

struct LiftSweepReport {
  std::uint64_t word_pairs = 0;
  std::uint64_t plays = 0;            // small plays satisfying the small conditions
  std::uint64_t counterexamples = 0;  // ... whose lift fails
  std::optional<std::pair<std::string, std::string>> witness_words;
  std::optional<Play> witness_play;
};

// Every pair of equal-length words over the alphabet up to max_length letters
// and every final small position of 2k rounds, k <= max_k, in which each
// round pair is a (column, row) cell.
LiftSweepReport lift_sweep(std::size_t max_length, unsigned max_k, std::string_view alphabet,
                           char neutral);

}  // namespace linord
