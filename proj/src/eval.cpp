#include "linord/eval.hpp"

#include <algorithm>

#include "linord/error.hpp"

namespace linord {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

// ---------------------------------------------------------------------------
// Naive evaluator

NaiveEvaluator::NaiveEvaluator(const FiniteStructure& structure, const Definitions* defs,
                               bool memoize_definitions)
    : s_(structure), defs_(defs), memo_(memoize_definitions) {}

void NaiveEvaluator::validate(const Formula& f, const std::set<std::string>& bound) {
  std::visit(
      Overloaded{
          [&](const Atom& a) {
            for (const auto& v : a.args) {
              if (!bound.count(v)) throw EvalError("unbound variable '" + v + "'");
            }
            std::size_t arity = 0;
            if (const auto* t = s_.find(a.relation)) {
              arity = t->arity();
            } else if (const Definition* d = defs_ ? defs_->find(a.relation) : nullptr) {
              arity = d->params.size();
              if (!validated_.count(d->name)) {
                validate(d->body, std::set<std::string>(d->params.begin(), d->params.end()));
                validated_.insert(d->name);
              }
            } else {
              throw EvalError("unknown relation '" + a.relation + "'");
            }
            if (arity != a.args.size()) {
              throw EvalError("relation '" + a.relation + "' has arity " + std::to_string(arity) +
                              ", used with " + std::to_string(a.args.size()) + " arguments");
            }
          },
          [&](const Equal& e) {
            for (const auto* v : {&e.lhs, &e.rhs}) {
              if (!bound.count(*v)) throw EvalError("unbound variable '" + *v + "'");
            }
          },
          [&](const ConstEq& e) {
            if (!bound.count(e.var)) throw EvalError("unbound variable '" + e.var + "'");
          },
          [&](const Not& n) { validate(n.body, bound); },
          [&](const Binary& b) {
            validate(b.lhs, bound);
            validate(b.rhs, bound);
          },
          [&](const Quant& q) {
            auto inner = bound;
            inner.insert(q.var);
            validate(q.body, inner);
          },
      },
      f->v);
}

bool NaiveEvaluator::evaluate(const Formula& f, const Valuation& v) {
  std::set<std::string> bound;
  for (const auto& [name, value] : v) {
    if (value > s_.n()) {
      throw EvalError("variable '" + name + "' is bound outside [0.." + std::to_string(s_.n()) + "]");
    }
    bound.insert(name);
  }
  validate(f, bound);
  Valuation copy = v;
  return eval(f, copy);
}

bool NaiveEvaluator::call(const Definition& d, const std::vector<Element>& args) {
  std::uint64_t key = 0;
  if (memo_) {
    for (auto e : args) key = key * s_.size() + e;
    auto& table = cache_[d.name];
    auto it = table.find(key);
    if (it != table.end()) return it->second;
  }
  Valuation inner;
  for (std::size_t i = 0; i < args.size(); ++i) inner[d.params[i]] = args[i];
  const bool value = eval(d.body, inner);
  if (memo_) cache_[d.name].emplace(key, value);
  return value;
}

bool NaiveEvaluator::eval(const Formula& f, Valuation& v) {
  return std::visit(
      Overloaded{
          [&](const Atom& a) {
            std::vector<Element> args;
            args.reserve(a.args.size());
            for (const auto& name : a.args) args.push_back(v.at(name));
            if (const auto* t = s_.find(a.relation)) return t->contains(args);
            return call(defs_->at(a.relation), args);
          },
          [&](const Equal& e) { return v.at(e.lhs) == v.at(e.rhs); },
          [&](const ConstEq& e) { return v.at(e.var) == e.value; },
          [&](const Not& n) { return !eval(n.body, v); },
          [&](const Binary& b) {
            const bool l = eval(b.lhs, v);
            switch (b.op) {
              case BinOp::conj: return l && eval(b.rhs, v);
              case BinOp::disj: return l || eval(b.rhs, v);
              case BinOp::implies: return !l || eval(b.rhs, v);
              case BinOp::iff: return l == eval(b.rhs, v);
            }
            return false;
          },
          [&](const Quant& q) {
            auto it = v.find(q.var);
            const bool had = it != v.end();
            const Element saved = had ? it->second : 0;
            const bool want = q.q == Quantifier::exists;
            bool result = !want;
            for (Element e = 0; e <= s_.n(); ++e) {
              v[q.var] = e;
              if (eval(q.body, v) == want) {
                result = want;
                break;
              }
            }
            if (had) {
              v[q.var] = saved;
            } else {
              v.erase(q.var);
            }
            return result;
          },
      },
      f->v);
}

bool evaluate(const FiniteStructure& s, const Formula& f, const Valuation& v,
              const Definitions* defs) {
  return NaiveEvaluator(s, defs).evaluate(f, v);
}

// ---------------------------------------------------------------------------
// Table algebra

namespace {

using Word = BitVector::Word;

Word low_mask(std::size_t len) { return len >= 64 ? ~Word{0} : (Word{1} << len) - 1; }

std::uint64_t power(std::uint64_t d, std::size_t e) {
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < e; ++i) p *= d;
  return p;
}

// Stride of every variable of `target` inside table `t`, 0 where absent.
std::vector<std::uint64_t> strides_in(const RelationTable& t, const std::vector<std::string>& target) {
  const std::uint64_t d = t.domain_size();
  std::vector<std::uint64_t> out(target.size(), 0);
  const auto& vars = t.vars();
  for (std::size_t i = 0; i < target.size(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), target[i]);
    if (it != vars.end()) {
      out[i] = power(d, vars.size() - 1 - static_cast<std::size_t>(it - vars.begin()));
    }
  }
  return out;
}

std::vector<std::string> sorted_union(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Odometer over all assignments of the first `m` columns of a table with the
// given per-column source strides; calls fn(row, source offsets).
template <class Fn>
void for_each_prefix(std::uint64_t d, std::size_t m, const std::vector<const std::vector<std::uint64_t>*>& strides,
                     Fn&& fn) {
  std::vector<std::uint64_t> idx(m, 0);
  std::vector<std::uint64_t> off(strides.size(), 0);
  const std::uint64_t rows = power(d, m);
  for (std::uint64_t row = 0; row < rows; ++row) {
    fn(row, off);
    for (std::size_t j = m; j-- > 0;) {
      ++idx[j];
      for (std::size_t s = 0; s < strides.size(); ++s) off[s] += (*strides[s])[j];
      if (idx[j] < d) break;
      for (std::size_t s = 0; s < strides.size(); ++s) off[s] -= (*strides[s])[j] * d;
      idx[j] = 0;
    }
  }
}

Word apply(BinOp op, Word a, Word b) {
  switch (op) {
    case BinOp::conj: return a & b;
    case BinOp::disj: return a | b;
    case BinOp::implies: return ~a | b;
    case BinOp::iff: return ~(a ^ b);
  }
  return 0;
}

RelationTable combine(BinOp op, const RelationTable& a, const RelationTable& b) {
  const auto vars = sorted_union(a.vars(), b.vars());
  const Element n = a.n();
  const std::uint64_t d = a.domain_size();
  RelationTable out(vars.size(), n, vars);
  if (vars.empty()) {
    if (apply(op, a.bits().test(0), b.bits().test(0)) & 1U) out.bits().set(0);
    return out;
  }
  const auto sa = strides_in(a, vars);
  const auto sb = strides_in(b, vars);
  const std::size_t m = vars.size() - 1;
  const bool a_row = sa[m] != 0;
  const bool b_row = sb[m] != 0;
  auto& dst = out.bits();
  for_each_prefix(d, m, {&sa, &sb}, [&](std::uint64_t row, const std::vector<std::uint64_t>& off) {
    const Word a_fill = a_row ? 0 : (a.bits().test(off[0]) ? ~Word{0} : 0);
    const Word b_fill = b_row ? 0 : (b.bits().test(off[1]) ? ~Word{0} : 0);
    for (std::uint64_t c = 0; c < d; c += 64) {
      const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(64, d - c));
      const Word wa = a_row ? a.bits().extract(off[0] + c, len) : a_fill;
      const Word wb = b_row ? b.bits().extract(off[1] + c, len) : b_fill;
      dst.deposit(row * d + c, len, apply(op, wa, wb) & low_mask(len));
    }
  });
  return out;
}

RelationTable quantify(Quantifier q, const std::string& var, const RelationTable& t) {
  const auto& vars = t.vars();
  auto it = std::find(vars.begin(), vars.end(), var);
  if (it == vars.end()) return t;
  const std::size_t p = static_cast<std::size_t>(it - vars.begin());
  std::vector<std::string> rest = vars;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(p));
  const std::uint64_t d = t.domain_size();
  const std::uint64_t outer = power(d, p);
  const std::uint64_t inner = power(d, vars.size() - 1 - p);
  RelationTable out(rest.size(), t.n(), rest);
  auto& dst = out.bits();
  const auto& src = t.bits();
  const bool ex = q == Quantifier::exists;
  for (std::uint64_t o = 0; o < outer; ++o) {
    if (inner == 1) {
      const bool v = ex ? src.any_range(o * d, o * d + d) : src.all_range(o * d, o * d + d);
      if (v) dst.set(o);
      continue;
    }
    dst.copy_range(o * inner, src, o * d * inner, inner);
    for (std::uint64_t m = 1; m < d; ++m) {
      if (ex) {
        dst.or_range(o * inner, src, (o * d + m) * inner, inner);
      } else {
        dst.and_range(o * inner, src, (o * d + m) * inner, inner);
      }
    }
  }
  return out;
}

}  // namespace

RelationTable reorder(const RelationTable& t, const std::vector<std::string>& vars) {
  if (t.vars() == vars) return t;
  std::set<std::string> target(vars.begin(), vars.end());
  if (target.size() != vars.size()) throw EvalError("repeated variable in column list");
  for (const auto& v : t.vars()) {
    if (!target.count(v)) throw EvalError("column list lacks free variable '" + v + "'");
  }
  const std::uint64_t d = t.domain_size();
  RelationTable out(vars.size(), t.n(), vars);
  if (vars.empty()) {
    if (t.bits().test(0)) out.bits().set(0);
    return out;
  }
  const auto s = strides_in(t, vars);
  const std::size_t m = vars.size() - 1;
  auto& dst = out.bits();
  const auto& src = t.bits();
  for_each_prefix(d, m, {&s}, [&](std::uint64_t row, const std::vector<std::uint64_t>& off) {
    const std::uint64_t base = row * d;
    if (s[m] == 1) {
      dst.copy_range(base, src, off[0], d);
    } else if (s[m] == 0) {
      if (src.test(off[0])) {
        for (std::uint64_t c = 0; c < d; c += 64) {
          const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(64, d - c));
          dst.deposit(base + c, len, low_mask(len));
        }
      }
    } else {
      for (std::uint64_t e = 0; e < d; ++e) {
        if (src.test(off[0] + e * s[m])) dst.set(base + e);
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Compiling evaluator

CompilingEvaluator::CompilingEvaluator(const FiniteStructure& structure, const Definitions* defs)
    : s_(structure), defs_(defs) {}

const RelationTable& CompilingEvaluator::relation(const std::string& name, std::size_t arity) {
  const RelationTable* t = s_.find(name);
  if (t == nullptr) {
    if (defs_ == nullptr || !defs_->has(name)) throw EvalError("unknown relation '" + name + "'");
    t = &definition(name);
  }
  if (t->arity() != arity) {
    throw EvalError("relation '" + name + "' has arity " + std::to_string(t->arity()) +
                    ", used with " + std::to_string(arity) + " arguments");
  }
  return *t;
}

const RelationTable& CompilingEvaluator::definition(const std::string& name) {
  auto it = defined_.find(name);
  if (it != defined_.end()) return it->second;
  if (defs_ == nullptr) throw EvalError("unknown definition '" + name + "'");
  const Definition& d = defs_->at(name);
  RelationTable table = reorder(compile(d.body), d.params);
  return defined_.emplace(name, std::move(table)).first->second;
}

RelationTable CompilingEvaluator::atom_table(const Atom& a) {
  const RelationTable& src = relation(a.relation, a.args.size());
  std::vector<std::string> vars = a.args;
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars == a.args) {
    RelationTable out = src;
    out.set_vars(vars);
    return out;
  }
  const std::uint64_t d = src.domain_size();
  RelationTable out(vars.size(), s_.n(), vars);
  // source stride contributed by each sorted variable
  std::vector<std::uint64_t> stride(vars.size(), 0);
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    const auto pos = std::find(vars.begin(), vars.end(), a.args[i]) - vars.begin();
    stride[static_cast<std::size_t>(pos)] += power(d, a.args.size() - 1 - i);
  }
  const std::size_t m = vars.size() - 1;
  auto& dst = out.bits();
  for_each_prefix(d, m, {&stride}, [&](std::uint64_t row, const std::vector<std::uint64_t>& off) {
    for (std::uint64_t e = 0; e < d; ++e) {
      if (src.bits().test(off[0] + e * stride[m])) dst.set(row * d + e);
    }
  });
  return out;
}

RelationTable CompilingEvaluator::compile(const Formula& f) {
  const Element n = s_.n();
  const std::uint64_t d = s_.size();
  return std::visit(
      Overloaded{
          [&](const Atom& a) { return atom_table(a); },
          [&](const Equal& e) {
            if (e.lhs == e.rhs) {
              RelationTable t(1, n, {e.lhs});
              t.bits().fill(true);
              return t;
            }
            std::vector<std::string> vars{e.lhs, e.rhs};
            std::sort(vars.begin(), vars.end());
            RelationTable t(2, n, vars);
            for (std::uint64_t x = 0; x < d; ++x) t.bits().set(x * d + x);
            return t;
          },
          [&](const ConstEq& e) {
            RelationTable t(1, n, {e.var});
            if (e.value <= n) t.bits().set(e.value);
            return t;
          },
          [&](const Not& x) {
            RelationTable t = compile(x.body);
            t.bits().flip();
            return t;
          },
          [&](const Binary& b) { return combine(b.op, compile(b.lhs), compile(b.rhs)); },
          [&](const Quant& q) { return quantify(q.q, q.var, compile(q.body)); },
      },
      f->v);
}

RelationTable CompilingEvaluator::define(const Formula& f, const std::vector<std::string>& vars) {
  return reorder(compile(f), vars);
}

bool CompilingEvaluator::holds(const Formula& f, const Valuation& v) {
  const RelationTable t = compile(f);
  std::vector<Element> tuple;
  for (const auto& name : t.vars()) {
    auto it = v.find(name);
    if (it == v.end()) throw EvalError("unbound variable '" + name + "'");
    tuple.push_back(it->second);
  }
  return t.contains(tuple);
}

RelationTable define(const FiniteStructure& s, const Formula& f,
                     const std::vector<std::string>& vars, const Definitions* defs) {
  return CompilingEvaluator(s, defs).define(f, vars);
}

}  // namespace linord
