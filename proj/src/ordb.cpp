#include "linord/ordb.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "linord/error.hpp"
#include "linord/predicates.hpp"

namespace linord {

BigNat factorial(std::uint64_t m) {
  BigNat f = 1;
  for (std::uint64_t i = 2; i <= m; ++i) f *= i;
  return f;
}

BigNat pow2(std::uint64_t e) {
  BigNat p = 1;
  p <<= static_cast<unsigned>(e);
  return p;
}

UnaryPredicate predicate_C() { return {"C", [](std::uint64_t x) { return in_C(x); }}; }
UnaryPredicate predicate_Q() { return {"Q", [](std::uint64_t x) { return in_Q(x); }}; }
UnaryPredicate predicate_squares() {
  return {"squares", [](std::uint64_t x) { return is_square(x); }};
}
UnaryPredicate predicate_empty() { return {"empty", [](std::uint64_t) { return false; }}; }

UnaryPredicate predicate_from_bits(std::vector<bool> bits, std::string name) {
  return {std::move(name), [bits = std::move(bits)](std::uint64_t x) {
            return x < bits.size() && bits[x];
          }};
}

UnaryPredicate predicate_by_name(const std::string& name) {
  if (name == "C") return predicate_C();
  if (name == "Q") return predicate_Q();
  if (name == "squares" || name == "Squares") return predicate_squares();
  if (name == "empty") return predicate_empty();
  if (name.rfind("bits:", 0) == 0) {
    std::vector<bool> bits;
    for (char ch : name.substr(5)) {
      if (ch != '0' && ch != '1') throw ConfigError("bad bit list in predicate '" + name + "'");
      bits.push_back(ch == '1');
    }
    return predicate_from_bits(std::move(bits), name);
  }
  throw ConfigError("unknown predicate '" + name + "' (expected C, Q, squares, empty, bits:...)");
}

void OrdBConfig::validate() const {
  if (predicates.empty()) throw ConfigError("OrdB config needs k >= 1 predicates");
  for (const auto& p : predicates) {
    if (!p.contains) throw ConfigError("predicate '" + p.name + "' has no membership oracle");
  }
  if (ell < 2) throw ConfigError("ell must be at least 2");
  if (window < 1) throw ConfigError("window must be at least 1");
  if (sound && window != 3 * ell) {
    throw ConfigError("sound mode requires w = 3*ell (w=" + std::to_string(window) +
                      ", ell=" + std::to_string(ell) + ")");
  }
  if (factorial(ell - 1) < pow2(code_bits())) {
    throw ConfigError("(ell-1)! < 2^(k*w) for ell=" + std::to_string(ell) +
                      ", k=" + std::to_string(k()) + ", w=" + std::to_string(window));
  }
}

OrdBConfig OrdBConfig::sound_config(std::vector<UnaryPredicate> predicates) {
  OrdBConfig cfg;
  cfg.ell = min_ell(predicates.size());
  cfg.window = 3 * cfg.ell;
  cfg.sound = true;
  cfg.predicates = std::move(predicates);
  cfg.validate();
  return cfg;
}

OrdBConfig OrdBConfig::toy_config(std::vector<UnaryPredicate> predicates, std::uint64_t ell,
                                  std::uint64_t window) {
  OrdBConfig cfg;
  cfg.predicates = std::move(predicates);
  cfg.ell = ell;
  cfg.window = window;
  cfg.sound = false;
  cfg.validate();
  return cfg;
}

std::uint64_t min_ell(std::uint64_t k, WindowRule rule) {
  if (k == 0) throw std::invalid_argument("min_ell needs k >= 1");
  BigNat f = 1;  // (ell-1)!
  for (std::uint64_t ell = 2;; ++ell) {
    f *= (ell - 1);
    if (f >= pow2(k * rule.window(ell))) return ell;
  }
}

bool is_backbone(std::uint64_t x, std::uint64_t ell) { return coords(x).r % ell == 0; }

bool is_complete(std::uint64_t u, std::uint64_t ell) {
  const auto p = coords(u);
  return p.r % ell == 0 && p.r + ell - 1 <= p.c;
}

IntervalBase interval_of(std::uint64_t x, std::uint64_t ell) {
  const auto p = coords(x);
  if (p.r % ell == 0) {
    throw std::invalid_argument(std::to_string(x) + " is a backbone element");
  }
  const std::uint64_t u = x - p.r % ell;
  return {u, is_complete(u, ell)};
}

IntervalCode window_bits(std::uint64_t u, const OrdBConfig& config) {
  if (!is_backbone(u, config.ell) || !is_complete(u, config.ell)) {
    throw std::invalid_argument(std::to_string(u) + " is not complete");
  }
  IntervalCode out;
  out.u = u;
  out.complete = true;
  out.bits.reserve(config.code_bits());
  for (std::uint64_t j = 0; j < config.window; ++j) {
    for (const auto& p : config.predicates) out.bits.push_back(p.contains(u + j));
  }
  out.code = 0;
  for (bool b : out.bits) {
    out.code <<= 1;
    if (b) out.code |= 1;
  }
  return out;
}

std::vector<std::uint32_t> perm_unrank(const BigNat& m, std::size_t size) {
  BigNat f = factorial(size);
  if (m < 0 || m >= f) {
    throw std::out_of_range("permutation rank out of range for size " + std::to_string(size));
  }
  std::vector<std::uint32_t> available(size);
  std::iota(available.begin(), available.end(), 1U);
  std::vector<std::uint32_t> out;
  out.reserve(size);
  BigNat rest = m;
  for (std::size_t i = 0; i < size; ++i) {
    f /= (size - i);  // (size-1-i)!
    BigNat digit;
    boost::multiprecision::divide_qr(rest, f, digit, rest);
    const auto d = digit.convert_to<std::size_t>();
    out.push_back(available[d]);
    available.erase(available.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return out;
}

BigNat perm_rank(std::span<const std::uint32_t> p) {
  const std::size_t size = p.size();
  std::vector<bool> seen(size + 1, false);
  for (auto v : p) {
    if (v < 1 || v > size || seen[v]) throw std::invalid_argument("not a permutation");
    seen[v] = true;
  }
  BigNat m = 0;
  for (std::size_t i = 0; i < size; ++i) {
    std::uint64_t smaller = 0;
    for (std::size_t j = i + 1; j < size; ++j) {
      if (p[j] < p[i]) ++smaller;
    }
    m = m * (size - i) + smaller;
  }
  return m;
}

OrdBOrder::OrdBOrder(std::vector<Element> rank) : rank_(std::move(rank)), order_(rank_.size()) {
  if (rank_.empty()) throw std::invalid_argument("empty order");
  std::vector<bool> seen(rank_.size(), false);
  for (std::size_t x = 0; x < rank_.size(); ++x) {
    const auto r = rank_[x];
    if (r >= rank_.size() || seen[r]) throw std::invalid_argument("ranks are not a bijection");
    seen[r] = true;
    order_[r] = static_cast<Element>(x);
  }
}

RelationTable OrdBOrder::table() const {
  const Element top = n();
  const std::uint64_t d = std::uint64_t{top} + 1;
  RelationTable out(2, top);
  BitVector after(d);
  for (std::size_t r = d; r-- > 0;) {
    const Element x = order_[r];
    out.bits().copy_range(x * d, after, 0, d);
    after.set(x);
  }
  return out;
}

RelationTable OrdBOrder::pi_table() const {
  RelationTable out(2, n());
  for (Element x = 0; x <= n(); ++x) out.insert({x, rank_[x]});
  return out;
}

OrdBOrder build_ordb(const OrdBConfig& config, Element n) {
  config.validate();
  const std::uint64_t ell = config.ell;
  using Key = std::array<std::uint64_t, 3>;
  std::vector<Key> keys(std::size_t{n} + 1);
  // position of each offset 1..ell-1 inside its complete interval
  std::map<std::uint64_t, std::vector<std::uint32_t>> positions;
  for (std::uint64_t x = 0; x <= n; ++x) {
    const auto p = coords(x);
    if (p.r % ell == 0) {
      keys[x] = {0, p.r, p.c};
      continue;
    }
    const std::uint64_t u = x - p.r % ell;
    std::uint64_t t = x - u;
    if (is_complete(u, ell)) {
      auto it = positions.find(u);
      if (it == positions.end()) {
        const auto perm = perm_unrank(window_bits(u, config).code, ell - 1);
        std::vector<std::uint32_t> pos(ell);
        for (std::size_t i = 0; i < perm.size(); ++i) pos[perm[i]] = static_cast<std::uint32_t>(i + 1);
        it = positions.emplace(u, std::move(pos)).first;
      }
      t = it->second[x - u];
    }
    keys[x] = {1, u, t};
  }
  std::vector<Element> order(std::size_t{n} + 1);
  std::iota(order.begin(), order.end(), Element{0});
  std::sort(order.begin(), order.end(), [&](Element a, Element b) { return keys[a] < keys[b]; });
  std::vector<Element> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<Element>(i);
  return OrdBOrder(std::move(rank));
}

RelationTable build_pi(const OrdBConfig& config, Element n) {
  return build_ordb(config, n).pi_table();
}

std::size_t DecodeResult::covered_count() const {
  return static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
}

bool DecodeResult::covers(std::uint64_t lo, std::uint64_t hi) const {
  hi = std::min<std::uint64_t>(hi, n);
  for (std::uint64_t x = lo; x <= hi; ++x) {
    if (!covered[x]) return false;
  }
  return true;
}

namespace {

// Ranks of a strict total order given as a relation table; throws unless the
// table is one.
std::vector<Element> ranks_from_table(Element n, const RelationTable& ordb) {
  if (ordb.arity() != 2 || ordb.n() != n) throw DecodeError("order table has the wrong shape");
  const std::uint64_t d = std::uint64_t{n} + 1;
  const auto& bits = ordb.bits();
  std::vector<Element> rank(d);
  std::vector<bool> seen(d, false);
  for (std::uint64_t x = 0; x < d; ++x) {
    if (bits.test(x * d + x)) throw DecodeError("inconsistent order: not irreflexive");
    const std::uint64_t above = bits.count_range(x * d, (x + 1) * d);
    const std::uint64_t r = n - above;
    if (above > n || seen[r]) throw DecodeError("inconsistent order: not total");
    seen[r] = true;
    rank[x] = static_cast<Element>(r);
  }
  // with scores 0..n, every row x must be exactly {y : rank y > rank x}
  for (std::size_t i = bits.find_next(0); i < bits.size(); i = bits.find_next(i + 1)) {
    if (rank[i % d] <= rank[i / d]) throw DecodeError("inconsistent order: not transitive");
  }
  return rank;
}

void check_natural_order(Element n, const RelationTable& lt) {
  if (lt.arity() != 2 || lt.n() != n) throw DecodeError("'<' table has the wrong shape");
  const std::uint64_t d = std::uint64_t{n} + 1;
  for (std::uint64_t x = 0; x < d; ++x) {
    if (lt.bits().count_range(x * d + x + 1, (x + 1) * d) != n - x ||
        lt.bits().count_range(x * d, (x + 1) * d) != n - x) {
      throw DecodeError("'<' table is not the natural order");
    }
  }
}

}  // namespace

DecodeResult decode_ordb(Element n, const RelationTable& lt, const RelationTable& ordb,
                         std::size_t k, std::uint64_t window) {
  check_natural_order(n, lt);
  return decode_ordb(OrdBOrder(ranks_from_table(n, ordb)), k, window);
}

DecodeResult decode_ordb(const OrdBOrder& order, std::size_t k, std::uint64_t window) {
  if (k == 0 || window == 0) throw DecodeError("decoding needs k >= 1 and w >= 1");
  const Element n = order.n();
  const std::uint64_t d = std::uint64_t{n} + 1;
  DecodeResult out;
  out.n = n;
  out.k = k;
  out.window = window;
  out.backbone.assign(d, true);
  out.covered.assign(d, false);
  out.membership.assign(d * k, false);
  out.ordc_key.assign(d, {0, 0, 0});

  // backbone: everything below 2
  if (n >= 2) {
    for (Element x = 0; x <= n; ++x) out.backbone[x] = order.less(x, 2);
  }

  // ell: smallest positive row among backbone elements, then uniformity
  for (Element x = 0; x <= n; ++x) {
    const auto r = coords(x).r;
    if (out.backbone[x] && r > 0 && (!out.ell || r < *out.ell)) out.ell = r;
  }
  for (Element x = 0; x <= n; ++x) {
    const auto r = coords(x).r;
    const bool expected = out.ell ? r % *out.ell == 0 : r == 0;
    if (out.backbone[x] != expected) {
      throw DecodeError("detected ell non-uniform: backbone membership of " + std::to_string(x) +
                        " does not follow the row spacing");
    }
  }

  // base of every element: greatest backbone element <= x
  std::vector<Element> base(d);
  for (Element x = 0; x <= n; ++x) base[x] = out.backbone[x] ? x : base[x - 1];

  // the next backbone element after u, or d when none fits in [0..n]
  std::vector<std::uint64_t> next_backbone(d, d);
  for (std::uint64_t x = d; x-- > 0;) {
    if (x + 1 < d) next_backbone[x] = out.backbone[x + 1] ? x + 1 : next_backbone[x + 1];
  }

  // non-backbone elements must come in runs per interval, intervals in < order
  std::map<Element, std::vector<Element>> runs;
  {
    Element last_base = 0;
    bool first = true;
    std::vector<bool> closed(d, false);
    for (Element r = 0; r <= n; ++r) {
      const Element x = order.element_at(r);
      if (out.backbone[x]) continue;
      const Element u = base[x];
      if (!first && u != last_base) {
        if (u < last_base || closed[u]) {
          throw DecodeError("interval ordering not a permutation pattern: interval of " +
                            std::to_string(u) + " is interleaved with interval of " +
                            std::to_string(last_base));
        }
        closed[last_base] = true;
      }
      first = false;
      last_base = u;
      runs[u].push_back(x);
    }
  }

  const std::uint64_t code_bits = k * window;
  const BigNat code_limit = pow2(code_bits);
  std::vector<bool> assigned(d, false);
  for (const auto& [u, run] : runs) {
    const std::uint64_t next = next_backbone[u];
    const bool within = next < d;
    const bool complete = within && out.ell && next - u == *out.ell;
    if (!complete) {
      if (within && !std::is_sorted(run.begin(), run.end())) {
        throw DecodeError("interval ordering not a permutation pattern: incomplete interval of " +
                          std::to_string(u) + " is not in natural order");
      }
      continue;
    }
    DecodedInterval iv;
    iv.u = u;
    for (Element x : run) iv.permutation.push_back(static_cast<std::uint32_t>(x - u));
    iv.code = perm_rank(iv.permutation);
    if (iv.code >= code_limit) {
      throw DecodeError("interval code of " + std::to_string(u) + " exceeds 2^(k*w)");
    }
    for (std::uint64_t j = 0; j < window; ++j) {
      const std::uint64_t x = u + j;
      if (x > n) break;
      for (std::size_t i = 0; i < k; ++i) {
        const std::uint64_t pos = j * k + i;
        const bool value = boost::multiprecision::bit_test(iv.code, static_cast<unsigned>(code_bits - 1 - pos));
        const std::size_t slot = x * k + i;
        if (assigned[x] && out.membership[slot] != value) {
          throw DecodeError("conflicting membership bits for " + std::to_string(x));
        }
        out.membership[slot] = value;
      }
      assigned[x] = true;
      out.covered[x] = true;
    }
    out.intervals.push_back(std::move(iv));
  }

  // row groups of backbone elements: a new group starts after a rightmost
  // element, i.e. when the next backbone element is on the diagonal
  std::vector<std::uint64_t> group(d, 0);
  std::uint64_t g = 0;
  std::vector<Element> backbone_order;
  for (Element r = 0; r <= n; ++r) {
    const Element x = order.element_at(r);
    if (out.backbone[x]) backbone_order.push_back(x);
  }
  for (std::size_t i = 0; i < backbone_order.size(); ++i) {
    const Element w = backbone_order[i];
    group[w] = g;
    if (i + 1 == backbone_order.size()) break;
    const Element next = backbone_order[i + 1];
    bool diagonal = next + std::uint64_t{1} <= n && out.backbone[next + 1];
    if (!diagonal && out.ell && next == n && next != tri(*out.ell) && w + *out.ell == next) {
      diagonal = true;
    }
    if (diagonal) ++g;
  }
  for (Element x = 0; x <= n; ++x) {
    const Element u = base[x];
    out.ordc_key[x] = {group[u], std::uint64_t{x} - u, order.rank_of(u)};
  }
  return out;
}

DecodeAudit audit_decode(const DecodeResult& result, const OrdBConfig& config) {
  DecodeAudit audit;
  const Element n = result.n;
  const std::size_t k = std::min(result.k, config.k());
  std::vector<Element> covered;
  for (Element x = 0; x <= n; ++x) {
    if (!result.covered[x]) continue;
    covered.push_back(x);
    for (std::size_t i = 0; i < k; ++i) {
      ++audit.predicate_checks;
      if (result.member(x, i) != config.predicates[i].contains(x)) {
        audit.discrepancies.push_back({config.predicates[i].name, x, x});
      }
    }
  }
  audit.covered = covered.size();
  std::sort(covered.begin(), covered.end(),
            [&](Element a, Element b) { return result.ordc_key[a] < result.ordc_key[b]; });
  for (std::size_t i = 0; i + 1 < covered.size(); ++i) {
    ++audit.ordc_checks;
    const Element a = covered[i];
    const Element b = covered[i + 1];
    if (result.ordc_key[a] == result.ordc_key[b] || !linord::ordc_less(a, b)) {
      audit.discrepancies.push_back({"ordc", a, b});
    }
  }
  audit.coverage_lo = tri(config.ell + 1) + 1;
  audit.coverage_hi = n >= config.window ? n - config.window : 0;
  audit.coverage_ok = audit.coverage_lo > audit.coverage_hi || n < config.window ||
                      result.covers(audit.coverage_lo, audit.coverage_hi);
  return audit;
}

}  // namespace linord
