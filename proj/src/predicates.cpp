#include "linord/predicates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "linord/error.hpp"
#include "linord/ordb.hpp"

namespace linord {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t isqrt(u128 v) {
  auto s = static_cast<u128>(std::sqrt(static_cast<long double>(v)));
  while (s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return static_cast<std::uint64_t>(s);
}

}  // namespace

std::uint64_t tri(std::uint64_t i) {
  const u128 v = static_cast<u128>(i) * (static_cast<u128>(i) + 1) / 2;
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("tri(" + std::to_string(i) + ") exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(v);
}

TriCoord coords(std::uint64_t x) {
  // largest c with c(c+1)/2 <= x is floor((sqrt(8x+1) - 1) / 2)
  std::uint64_t c = (isqrt(static_cast<u128>(x) * 8 + 1) - 1) / 2;
  while (static_cast<u128>(c) * (c + 1) / 2 > x) --c;
  while (static_cast<u128>(c + 1) * (c + 2) / 2 <= x) ++c;
  const std::uint64_t q = tri(c);
  return TriCoord{x, c, x - q, q};
}

std::uint64_t index_of(std::uint64_t c, std::uint64_t r) {
  if (r > c) {
    throw std::invalid_argument("no matrix cell at column " + std::to_string(c) + ", row " +
                                std::to_string(r));
  }
  return tri(c) + r;
}

bool ordc_less(std::uint64_t x, std::uint64_t y) {
  const auto a = coords(x);
  const auto b = coords(y);
  return a.r < b.r || (a.r == b.r && a.c < b.c);
}

bool in_C(std::uint64_t x) {
  const auto p = coords(x);
  return bit(p.c + 1, p.r);
}

bool in_Q(std::uint64_t x) {
  const auto p = coords(x);
  return bit(tri(p.c + 1), p.r);
}

bool is_square(std::uint64_t a) {
  const auto s = isqrt(a);
  return static_cast<u128>(s) * s == a;
}

namespace {

constexpr std::array<std::pair<std::string_view, Builtin>, 11> kNames{{
    {"lt", Builtin::lt},
    {"ordc", Builtin::ordc},
    {"C", Builtin::C},
    {"Q", Builtin::Q},
    {"bit", Builtin::bit},
    {"plus", Builtin::plus},
    {"times", Builtin::times},
    {"squares", Builtin::squares},
    {"exp", Builtin::exp},
    {"ordb", Builtin::ordb},
    {"pi", Builtin::pi},
}};

}  // namespace

std::optional<Builtin> builtin_from_name(std::string_view name) {
  for (const auto& [n, b] : kNames) {
    if (n == name) return b;
  }
  return std::nullopt;
}

std::string_view builtin_name(Builtin b) {
  for (const auto& [n, v] : kNames) {
    if (v == b) return n;
  }
  return "?";
}

std::size_t builtin_arity(Builtin b) {
  switch (b) {
    case Builtin::C:
    case Builtin::Q:
    case Builtin::squares:
      return 1;
    case Builtin::lt:
    case Builtin::ordc:
    case Builtin::bit:
    case Builtin::ordb:
    case Builtin::pi:
      return 2;
    case Builtin::plus:
    case Builtin::times:
    case Builtin::exp:
      return 3;
  }
  return 0;
}

const std::vector<Builtin>& all_builtins() {
  static const std::vector<Builtin> all = [] {
    std::vector<Builtin> v;
    for (const auto& [n, b] : kNames) v.push_back(b);
    return v;
  }();
  return all;
}

RelationTable builtin_table(Builtin b, Element n, const OrdBConfig* config) {
  const std::uint64_t top = n;
  RelationTable table(builtin_arity(b), n);
  switch (b) {
    case Builtin::lt:
      for (Element x = 0; x <= n; ++x) {
        for (Element y = x + 1; y <= n; ++y) table.insert({x, y});
      }
      break;
    case Builtin::ordc: {
      std::vector<Element> order(top + 1);
      std::iota(order.begin(), order.end(), Element{0});
      std::sort(order.begin(), order.end(), [](Element a, Element c) { return ordc_less(a, c); });
      for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) table.insert({order[i], order[j]});
      }
      break;
    }
    case Builtin::C:
      for (Element x = 0; x <= n; ++x) {
        if (in_C(x)) table.insert({x});
      }
      break;
    case Builtin::Q:
      for (Element x = 0; x <= n; ++x) {
        if (in_Q(x)) table.insert({x});
      }
      break;
    case Builtin::bit:
      for (Element a = 0; a <= n; ++a) {
        for (Element i = 0; i <= n; ++i) {
          if (bit(a, i)) table.insert({a, i});
        }
      }
      break;
    case Builtin::plus:
      for (Element a = 0; a <= n; ++a) {
        for (Element c = 0; a + c <= top; ++c) table.insert({a, c, a + c});
      }
      break;
    case Builtin::times:
      for (Element a = 0; a <= n; ++a) {
        for (Element c = 0; c <= n; ++c) {
          const std::uint64_t p = std::uint64_t{a} * c;
          if (p > top) break;
          table.insert({a, c, static_cast<Element>(p)});
        }
      }
      break;
    case Builtin::squares:
      for (std::uint64_t s = 0; s * s <= top; ++s) table.insert({static_cast<Element>(s * s)});
      break;
    case Builtin::exp:
      // 0^0 = 1
      for (Element a = 0; a <= n; ++a) {
        std::uint64_t p = 1;
        for (Element e = 0; e <= n; ++e) {
          if (p <= top) table.insert({a, e, static_cast<Element>(p)});
          const std::uint64_t next = p * a;
          if (a <= 1) {
            p = next;
            continue;
          }
          if (next > top) break;
          p = next;
        }
      }
      break;
    case Builtin::ordb:
      if (config == nullptr) throw ConfigError("builtin 'ordb' requires an OrdB config");
      return build_ordb(*config, n).table();
    case Builtin::pi:
      if (config == nullptr) throw ConfigError("builtin 'pi' requires an OrdB config");
      return build_pi(*config, n);
  }
  return table;
}

RelationTable builtin_table(std::string_view name, Element n, const OrdBConfig* config) {
  const auto b = builtin_from_name(name);
  if (!b) throw ConfigError("unknown builtin '" + std::string(name) + "'");
  return builtin_table(*b, n, config);
}

std::string render_triangle(Element n, TriangleMark mark, std::string_view letters) {
  if (n > 10000) throw ConfigError("render_triangle supports n <= 10000");
  if (mark == TriangleMark::word && letters.size() < std::size_t{n} + 1) {
    throw ConfigError("need " + std::to_string(n + 1) + " letters to draw the word");
  }
  const std::uint64_t last_column = coords(n).c;
  auto framed = [](std::uint64_t v) { return "[" + std::to_string(v) + "]"; };
  const std::size_t label = framed(last_column).size();
  std::size_t width = label;
  if (mark == TriangleMark::values) width = std::max(width, std::to_string(n).size());
  auto pad = [](const std::string& s, std::size_t w) {
    return std::string(w > s.size() ? w - s.size() : 0, ' ') + s;
  };

  std::string out;
  for (std::uint64_t row = last_column + 1; row-- > 0;) {
    std::string line = pad(framed(row), label);
    for (std::uint64_t c = 0; c <= last_column; ++c) {
      std::string cell;
      if (row <= c && index_of(c, row) <= n) {
        const std::uint64_t x = index_of(c, row);
        switch (mark) {
          case TriangleMark::values: cell = std::to_string(x); break;
          case TriangleMark::C: cell = in_C(x) ? "#" : "."; break;
          case TriangleMark::Q: cell = in_Q(x) ? "#" : "."; break;
          case TriangleMark::word: cell = std::string(1, letters[x]); break;
        }
      }
      line += ' ' + pad(cell, width);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  std::string footer(label, ' ');
  for (std::uint64_t c = 0; c <= last_column; ++c) footer += ' ' + pad(framed(c), width);
  out += footer + '\n';
  return out;
}

}  // namespace linord
