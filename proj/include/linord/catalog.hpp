#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linord/formula.hpp"
#include "linord/ordb.hpp"
#include "linord/relation.hpp"

namespace linord {

// Ground truth for one entry at a fixed n. nullopt marks tuples the formula
// makes no claim about (elements the encoding does not cover).
using Oracle = std::function<std::optional<bool>(std::span<const Element>)>;
using OracleFactory = std::function<Oracle(Element n)>;

struct CatalogEntry {
  std::string name;
  std::vector<std::string> params;
  OracleFactory oracle;  // empty for helper formulas
};

// A family of named formulas over a fixed set of builtins, kept in
// dependency order, each with its semantic oracle.
class Catalog {
 public:
  Catalog(std::string title, std::vector<std::string> builtins,
          std::optional<OrdBConfig> config = std::nullopt);

  void add(std::string name, std::vector<std::string> params, Formula body,
           OracleFactory oracle = {});
  void add(std::string name, std::vector<std::string> params, std::string_view text,
           OracleFactory oracle = {});

  const std::string& title() const { return title_; }
  const Definitions& definitions() const { return defs_; }
  const std::vector<CatalogEntry>& entries() const { return entries_; }
  const CatalogEntry* find(const std::string& name) const;
  // Names of the entries that carry an oracle, in dependency order.
  std::vector<std::string> verifiable() const;
  const std::vector<std::string>& builtins() const { return builtins_; }
  const OrdBConfig* config() const { return config_ ? &*config_ : nullptr; }

  // <[0..n], builtins...>
  FiniteStructure structure(Element n) const;

 private:
  std::string title_;
  std::vector<std::string> builtins_;
  std::optional<OrdBConfig> config_;
  Definitions defs_;
  std::vector<CatalogEntry> entries_;
};

// Shorthands over an order P in {lt, ordc, ordb}, with free variables x (and y).
enum class BasicKind { eq_const, max, succ, leq };
// eq_const(c) is the expanded FO(<) formula for x = c; P is ignored.
// Throws ConfigError on an unknown order name.
Formula build_basic(BasicKind kind, const std::string& order = "lt", std::uint64_t c = 0);

enum class CatalogVariant { repaired, literal };

// Grid, bit-chain and Bit formulas over <, ordc, C, Q. The literal variant
// keeps the textbook forms of phiQ, r and bit, which are wrong for some n.
Catalog bit_chain_catalog(CatalogVariant variant = CatalogVariant::repaired);

// Formulas over <, ordb that read back the backbone, the interval
// permutations, every U_i and the row-major order. Needs ell <= 6.
Catalog ordb_catalog(const OrdBConfig& config);

// ordb_from_pi(x, y) over <, pi.
Catalog permutation_catalog(const OrdBConfig& config);

// x < y over Bit alone: lt_bit compares the most significant differing bit,
// comparing positions with the same construction one level down. Level d is
// correct on [0 .. 2^(2^d) - 1]; lt_bit uses level 3.
Catalog bit_order_catalog();

// ---------------------------------------------------------------------------
// Verification

struct VerifyReport {
  std::string entry;
  Element n = 0;
  std::uint64_t checked = 0;
  std::uint64_t mismatches = 0;
  std::optional<Tuple> witness;  // first mismatching tuple
  double millis = 0;             // 0 unless timing was requested
};

// Compares the compiled table of each entry with its oracle on every tuple
// over [0..n]. Throws ConfigError for names that are not in the catalog or
// have no oracle.
std::vector<VerifyReport> verify_entries(const Catalog& catalog, const std::vector<std::string>& names,
                                         Element n, bool timing = false);
VerifyReport verify_against_oracle(const Catalog& catalog, const std::string& name, Element n,
                                   bool timing = false);

std::string reports_csv(const std::vector<VerifyReport>& reports);
std::string reports_json(const std::vector<VerifyReport>& reports);

// Carry into bit position p when adding a and b, by grade-school addition.
bool carry_into(std::uint64_t a, std::uint64_t b, std::uint64_t p);

}  // namespace linord
