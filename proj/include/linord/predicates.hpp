#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linord/relation.hpp"

namespace linord {

struct OrdBConfig;

// Position of x in the lower-triangular matrix whose column c holds the
// c+1 consecutive numbers q_c .. q_c + c, with q_c = c(c+1)/2.
struct TriCoord {
  std::uint64_t x = 0;
  std::uint64_t c = 0;  // column
  std::uint64_t r = 0;  // row, 0 <= r <= c
  std::uint64_t q = 0;  // bottom element of the column, q = tri(c)

  friend bool operator==(const TriCoord&, const TriCoord&) = default;
};

// i(i+1)/2. Throws std::overflow_error when the result does not fit 64 bits.
std::uint64_t tri(std::uint64_t i);

TriCoord coords(std::uint64_t x);

// tri(c) + r. Throws std::invalid_argument when r > c.
std::uint64_t index_of(std::uint64_t c, std::uint64_t r);

// Row-major order on the matrix: by row, then by column.
bool ordc_less(std::uint64_t x, std::uint64_t y);

// Bit r(x) of c(x)+1.
bool in_C(std::uint64_t x);
// Bit r(x) of q_{c(x)+1}.
bool in_Q(std::uint64_t x);

// floor(a / 2^i) is odd.
constexpr bool bit(std::uint64_t a, std::uint64_t i) {
  return i < 64 && ((a >> i) & 1U) != 0;
}

bool is_square(std::uint64_t a);

enum class Builtin { lt, ordc, C, Q, bit, plus, times, squares, exp, ordb, pi };

std::optional<Builtin> builtin_from_name(std::string_view name);
std::string_view builtin_name(Builtin b);
std::size_t builtin_arity(Builtin b);
const std::vector<Builtin>& all_builtins();

// Restriction of the numerical predicate to [0..n]^arity. ordb and pi need a
// config and are delegated to the order-b module.
RelationTable builtin_table(Builtin b, Element n, const OrdBConfig* config = nullptr);
RelationTable builtin_table(std::string_view name, Element n, const OrdBConfig* config = nullptr);

enum class TriangleMark { values, C, Q, word };

// ASCII picture of [0..n] in the triangular matrix, top row first, with framed
// row numbers on the left and framed column numbers underneath. values prints
// each element; C and Q print '#' for members and '.' otherwise; word prints
// letters[x] in cell x. Throws ConfigError when n > 10000 or letters is
// shorter than n + 1.
std::string render_triangle(Element n, TriangleMark mark, std::string_view letters = {});

}  // namespace linord
