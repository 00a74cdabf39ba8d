#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "linord/formula.hpp"
#include "linord/relation.hpp"

namespace linord::testing {

struct Signature {
  std::vector<std::pair<std::string, std::size_t>> relations;  // name, arity
  std::vector<std::string> variables{"x", "y", "z", "w"};
  std::uint64_t max_constant = 3;
  bool negation = true;
};

// Random formula of depth at most `depth` over the signature.
inline Formula random_formula(std::mt19937_64& rng, const Signature& sig, int depth) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto var = [&] { return sig.variables[pick(sig.variables.size())]; };
  if (depth <= 0 || pick(4) == 0) {
    const std::size_t kind = pick(sig.relations.size() + 2);
    if (kind == sig.relations.size()) return eq(var(), var());
    if (kind == sig.relations.size() + 1) return const_eq(var(), rng() % (sig.max_constant + 1));
    const auto& [name, arity] = sig.relations[kind];
    std::vector<std::string> args;
    for (std::size_t i = 0; i < arity; ++i) args.push_back(var());
    return atom(name, args);
  }
  switch (pick(sig.negation ? 8 : 6)) {
    case 0: return conj(random_formula(rng, sig, depth - 1), random_formula(rng, sig, depth - 1));
    case 1: return disj(random_formula(rng, sig, depth - 1), random_formula(rng, sig, depth - 1));
    case 2:
    case 3: return exists(var(), random_formula(rng, sig, depth - 1));
    case 4:
    case 5: return forall(var(), random_formula(rng, sig, depth - 1));
    case 6: return neg(random_formula(rng, sig, depth - 1));
    default:
      return binary(pick(2) == 0 ? BinOp::implies : BinOp::iff, random_formula(rng, sig, depth - 1),
                    random_formula(rng, sig, depth - 1));
  }
}

// Calls fn on every tuple of [0..n]^arity in row-major order.
inline void for_each_tuple(std::size_t arity, Element n, const std::function<void(const Tuple&)>& fn) {
  Tuple t(arity, 0);
  while (true) {
    fn(t);
    std::size_t pos = arity;
    while (pos > 0) {
      --pos;
      if (t[pos] < n) {
        ++t[pos];
        break;
      }
      t[pos] = 0;
      if (pos == 0) return;
    }
    if (arity == 0) return;
  }
}

}  // namespace linord::testing
