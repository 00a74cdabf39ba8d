#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "linord/relation.hpp"

namespace linord {

using BigNat = boost::multiprecision::cpp_int;

BigNat factorial(std::uint64_t m);
BigNat pow2(std::uint64_t e);

// A unary relation on all of N; the order encodes membership of elements
// beyond n, so a finite table is not enough.
struct UnaryPredicate {
  std::string name;
  std::function<bool(std::uint64_t)> contains;
};

UnaryPredicate predicate_C();
UnaryPredicate predicate_Q();
UnaryPredicate predicate_squares();
UnaryPredicate predicate_empty();
// Membership read off a bit list; positions past its end are 0.
UnaryPredicate predicate_from_bits(std::vector<bool> bits, std::string name = "bits");
// C, Q, squares, empty, or "bits:0110...".
UnaryPredicate predicate_by_name(const std::string& name);

// Parameters of the order: k unary predicates, backbone spacing ell and the
// number of elements w whose membership bits each complete interval encodes.
// Sound mode requires w = 3*ell; toy mode allows smaller w.
struct OrdBConfig {
  std::vector<UnaryPredicate> predicates;
  std::uint64_t ell = 2;
  std::uint64_t window = 1;
  bool sound = true;

  std::size_t k() const { return predicates.size(); }
  std::uint64_t code_bits() const { return k() * window; }

  // Throws ConfigError unless k >= 1, ell >= 2, w >= 1, (ell-1)! >= 2^(k*w)
  // and, in sound mode, w == 3*ell.
  void validate() const;

  // Sound config with ell = min_ell(k, three_ell).
  static OrdBConfig sound_config(std::vector<UnaryPredicate> predicates);
  static OrdBConfig toy_config(std::vector<UnaryPredicate> predicates, std::uint64_t ell,
                               std::uint64_t window);
};

struct WindowRule {
  enum class Kind { three_ell, fixed } kind = Kind::three_ell;
  std::uint64_t fixed = 0;

  std::uint64_t window(std::uint64_t ell) const { return kind == Kind::three_ell ? 3 * ell : fixed; }
};

// Smallest ell >= 2 with (ell-1)! >= 2^(k * w(ell)), compared exactly.
std::uint64_t min_ell(std::uint64_t k, WindowRule rule = {});

bool is_backbone(std::uint64_t x, std::uint64_t ell);

// u and u+ell are backbone elements and none of u+1 .. u+ell-1 is; for a
// backbone u this is r(u) + ell - 1 <= c(u).
bool is_complete(std::uint64_t u, std::uint64_t ell);

struct IntervalBase {
  std::uint64_t u = 0;
  bool complete = false;
};

// Base of the interval containing the non-backbone element x:
// u = x - (r(x) mod ell). Throws std::invalid_argument for backbone x.
IntervalBase interval_of(std::uint64_t x, std::uint64_t ell);

struct IntervalCode {
  std::uint64_t u = 0;
  bool complete = false;
  std::vector<bool> bits;  // B(u) B(u+1) ... B(u+w-1), k bits each
  BigNat code;             // bits read first-bit-most-significant
};

// Throws std::invalid_argument unless u is complete.
IntervalCode window_bits(std::uint64_t u, const OrdBConfig& config);

// Lehmer (factorial number system) order on permutations of {1..size}.
// Throws std::out_of_range unless m < size!.
std::vector<std::uint32_t> perm_unrank(const BigNat& m, std::size_t size);
// Throws std::invalid_argument unless p is a permutation of {1..p.size()}.
BigNat perm_rank(std::span<const std::uint32_t> p);

// The restriction of the order to [0..n]: x precedes y iff rank[x] < rank[y].
class OrdBOrder {
 public:
  OrdBOrder() = default;
  explicit OrdBOrder(std::vector<Element> rank);

  Element n() const { return static_cast<Element>(rank_.size() - 1); }
  const std::vector<Element>& rank() const { return rank_; }
  Element rank_of(Element x) const { return rank_[x]; }
  Element element_at(Element r) const { return order_[r]; }
  const std::vector<Element>& order() const { return order_; }
  bool less(Element x, Element y) const { return rank_[x] < rank_[y]; }

  // Binary relation {(x, y) : x precedes y}.
  RelationTable table() const;
  // Graph {(i, rank(i))} of the index permutation.
  RelationTable pi_table() const;

 private:
  std::vector<Element> rank_;
  std::vector<Element> order_;
};

OrdBOrder build_ordb(const OrdBConfig& config, Element n);
RelationTable build_pi(const OrdBConfig& config, Element n);

struct DecodedInterval {
  std::uint64_t u = 0;
  std::vector<std::uint32_t> permutation;  // observed offsets in order
  BigNat code;
};

struct DecodeResult {
  Element n = 0;
  std::size_t k = 0;
  std::uint64_t window = 0;
  std::optional<std::uint64_t> ell;  // empty when no backbone row above 0 fits in [0..n]
  std::vector<bool> backbone;
  std::vector<DecodedInterval> intervals;
  std::vector<bool> covered;
  // membership[x * k + i]: recovered value of x in U_{i+1}; meaningful where covered[x]
  std::vector<bool> membership;
  // recovered row-major key (row group, offset, backbone rank); x precedes y in
  // the triangle's row-major order iff key[x] < key[y]
  std::vector<std::array<std::uint64_t, 3>> ordc_key;

  bool member(Element x, std::size_t i) const { return membership[std::size_t{x} * k + i]; }
  bool ordc_less(Element x, Element y) const { return ordc_key[x] < ordc_key[y]; }
  std::size_t covered_count() const;
  // every x in [lo, hi] (clipped to [0..n]) is covered
  bool covers(std::uint64_t lo, std::uint64_t hi) const;
};

// Recovers backbone, ell, interval codes, predicate bits with coverage, and
// the row-major order from the order tables alone. Throws DecodeError when the
// tables cannot come from build_ordb.
DecodeResult decode_ordb(Element n, const RelationTable& lt, const RelationTable& ordb,
                         std::size_t k, std::uint64_t window);
DecodeResult decode_ordb(const OrdBOrder& order, std::size_t k, std::uint64_t window);

struct Discrepancy {
  std::string kind;  // predicate name or "ordc"
  Element x = 0;
  Element y = 0;
};

struct DecodeAudit {
  std::size_t covered = 0;
  std::size_t predicate_checks = 0;
  std::size_t ordc_checks = 0;
  std::vector<Discrepancy> discrepancies;
  std::uint64_t coverage_lo = 0;  // q_{ell+1} + 1
  std::uint64_t coverage_hi = 0;  // n - w
  bool coverage_ok = false;       // everything in [coverage_lo, coverage_hi] is covered
};

// Compares a decode against the generating predicates and ordc_less.
DecodeAudit audit_decode(const DecodeResult& result, const OrdBConfig& config);

}  // namespace linord
