#include "linord/relation.hpp"

#include "linord/error.hpp"

namespace linord {

std::uint64_t table_bits(std::size_t arity, Element n) {
  const std::uint64_t d = std::uint64_t{n} + 1;
  std::uint64_t bits = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    if (bits > kMaxTableBits / d) {
      throw EvalError("table of arity " + std::to_string(arity) + " over [0.." +
                      std::to_string(n) + "] exceeds the table size limit");
    }
    bits *= d;
  }
  return bits;
}

RelationTable::RelationTable(std::size_t arity, Element n, std::vector<std::string> vars)
    : arity_(arity), n_(n), bits_(table_bits(arity, n)) {
  set_vars(std::move(vars));
}

void RelationTable::set_vars(std::vector<std::string> vars) {
  if (!vars.empty() && vars.size() != arity_) {
    throw EvalError("variable list does not match table arity");
  }
  vars_ = std::move(vars);
}

RelationTable RelationTable::from_tuples(std::size_t arity, Element n,
                                         std::span<const Tuple> tuples) {
  RelationTable table(arity, n);
  for (const auto& t : tuples) table.insert(t);
  return table;
}

std::uint64_t RelationTable::index_of(std::span<const Element> tuple) const {
  if (tuple.size() != arity_) {
    throw EvalError("tuple width " + std::to_string(tuple.size()) + " does not match arity " +
                    std::to_string(arity_));
  }
  std::uint64_t index = 0;
  for (auto e : tuple) {
    if (e > n_) throw EvalError("element " + std::to_string(e) + " outside [0.." +
                                std::to_string(n_) + "]");
    index = index * domain_size() + e;
  }
  return index;
}

Tuple RelationTable::tuple_at(std::uint64_t index) const {
  Tuple t(arity_);
  for (std::size_t i = arity_; i-- > 0;) {
    t[i] = static_cast<Element>(index % domain_size());
    index /= domain_size();
  }
  return t;
}

bool RelationTable::contains(std::span<const Element> tuple) const {
  if (tuple.size() != arity_) return false;
  for (auto e : tuple) {
    if (e > n_) return false;
  }
  return bits_.test(index_of(tuple));
}

void RelationTable::insert(std::span<const Element> tuple) { bits_.set(index_of(tuple)); }

void RelationTable::erase(std::span<const Element> tuple) { bits_.reset(index_of(tuple)); }

std::vector<Tuple> RelationTable::tuples() const {
  std::vector<Tuple> out;
  for (std::size_t i = bits_.find_next(0); i < bits_.size(); i = bits_.find_next(i + 1)) {
    out.push_back(tuple_at(i));
  }
  return out;
}

void FiniteStructure::add(const std::string& name, RelationTable table) {
  if (table.n() != n_) {
    throw ConfigError("relation '" + name + "' is over [0.." + std::to_string(table.n()) +
                      "], structure domain is [0.." + std::to_string(n_) + "]");
  }
  relations_.insert_or_assign(name, std::move(table));
}

const RelationTable* FiniteStructure::find(const std::string& name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

const RelationTable& FiniteStructure::at(const std::string& name) const {
  if (const auto* t = find(name)) return *t;
  throw EvalError("unknown relation '" + name + "'");
}

}  // namespace linord
