#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "linord/bitvector.hpp"

namespace linord {

using Element = std::uint32_t;
using Tuple = std::vector<Element>;

// Upper bound on the number of bits a single table may occupy (512 MiB).
inline constexpr std::uint64_t kMaxTableBits = std::uint64_t{1} << 32;

// An arity-tagged set of tuples over [0..n], stored densely in row-major
// order: tuple (t_0, ..., t_{a-1}) lives at bit sum t_i * (n+1)^(a-1-i).
// Tables produced by the compiling evaluator also carry the variable that
// each column binds.
class RelationTable {
 public:
  RelationTable() = default;
  RelationTable(std::size_t arity, Element n, std::vector<std::string> vars = {});

  static RelationTable from_tuples(std::size_t arity, Element n,
                                   std::span<const Tuple> tuples);

  std::size_t arity() const { return arity_; }
  Element n() const { return n_; }
  std::uint64_t domain_size() const { return std::uint64_t{n_} + 1; }
  const std::vector<std::string>& vars() const { return vars_; }
  void set_vars(std::vector<std::string> vars);

  bool contains(std::span<const Element> tuple) const;
  bool contains(std::initializer_list<Element> tuple) const {
    return contains(std::span<const Element>(tuple.begin(), tuple.size()));
  }
  void insert(std::span<const Element> tuple);
  void insert(std::initializer_list<Element> tuple) {
    insert(std::span<const Element>(tuple.begin(), tuple.size()));
  }
  void erase(std::span<const Element> tuple);

  std::size_t size() const { return bits_.count(); }
  bool empty() const { return size() == 0; }
  std::vector<Tuple> tuples() const;

  std::uint64_t index_of(std::span<const Element> tuple) const;
  Tuple tuple_at(std::uint64_t index) const;

  const BitVector& bits() const { return bits_; }
  BitVector& bits() { return bits_; }

  // Same arity, domain and tuples (column variables are ignored).
  friend bool operator==(const RelationTable& a, const RelationTable& b) {
    return a.arity_ == b.arity_ && a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t arity_ = 0;
  Element n_ = 0;
  std::vector<std::string> vars_;
  BitVector bits_{1};
};

// Number of bits a table of the given shape needs; throws EvalError when it
// exceeds kMaxTableBits.
std::uint64_t table_bits(std::size_t arity, Element n);

// Domain [0..n] plus named relations.
class FiniteStructure {
 public:
  explicit FiniteStructure(Element n = 0) : n_(n) {}

  Element n() const { return n_; }
  std::uint64_t size() const { return std::uint64_t{n_} + 1; }

  // Throws ConfigError when the table is over a different domain.
  void add(const std::string& name, RelationTable table);
  const RelationTable* find(const std::string& name) const;
  const RelationTable& at(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }

  const std::map<std::string, RelationTable>& relations() const { return relations_; }

 private:
  Element n_;
  std::map<std::string, RelationTable> relations_;
};

}  // namespace linord
