#pragma once

// Test-only generators and brute-force oracles. Nothing here calls the code
// path it is used to check: effect sets, class membership, adjacency and
// induction are re-derived from first principles.

#include <actsem/actsem.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using namespace actsem;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin(double p = 0.5) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  double real(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[rng_() % v.size()];
  }

  BaseType base_type() { return kBaseTypes[rng_() % kBaseTypes.size()]; }

  ValueType concrete_type() {
    if (coin(0.2)) return ValueType::product({base_type(), base_type()});
    return base_type();
  }

  /// Random value; `exact` keeps payloads on a small integer grid so
  /// collisions (equal values) are frequent.
  TypedValue value(const ValueType& t, std::size_t dim = 2, bool exact = true) {
    if (t.is_product()) {
      std::vector<TypedValue> parts;
      for (BaseType b : t.parts()) parts.push_back(value(b, dim, exact));
      return TypedValue::product(std::move(parts));
    }
    auto num = [&](double lo, double hi) { return exact ? static_cast<double>(integer(int(lo), int(hi))) : real(lo, hi); };
    switch (t.base()) {
      case BaseType::Num: return TypedValue::num(num(-3, 3));
      case BaseType::Dist: return TypedValue::dist(num(0, 4));
      case BaseType::Angl: return TypedValue::angl(exact ? 45.0 * integer(0, 7) : real(0, 359.9));
      case BaseType::Bool: return TypedValue::boolean(coin());
      case BaseType::Obj: return TypedValue::obj(pick(std::vector<std::string>{"ball", "cup", "none", "obst"}));
      case BaseType::Pos: {
        Coord c;
        for (std::size_t i = 0; i < dim; ++i) c.push_back(num(-2, 2));
        return TypedValue::pos(std::move(c));
      }
    }
    return TypedValue::num(0);
  }

  /// A schema of `n` variables named v0..v{n-1}.
  std::vector<std::pair<std::string, ValueType>> schema(std::size_t n) {
    std::vector<std::pair<std::string, ValueType>> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back("v" + std::to_string(i), concrete_type());
    return out;
  }

  StateSnapshot snapshot(const std::vector<std::pair<std::string, ValueType>>& schema, Timestamp t,
                         std::size_t dim = 2, bool exact = true) {
    StateSnapshot s;
    s.t = t;
    for (const auto& [name, type] : schema) s.bindings.push_back({name, value(type, dim, exact)});
    return s;
  }

  /// Copy of `s` with each binding independently re-drawn with probability p.
  StateSnapshot perturb(const StateSnapshot& s, Timestamp t, double p, std::size_t dim = 2) {
    StateSnapshot out = s;
    out.t = t;
    for (auto& b : out.bindings)
      if (coin(p)) b.value = value(b.value.type(), dim);
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// --- independent oracles ----------------------------------------------------

/// The class table, written out as literal member lists.
inline bool member(TypeClass c, BaseType t) {
  static const std::map<TypeClass, std::set<BaseType>> table{
      {TypeClass::Arith, {BaseType::Num, BaseType::Pos, BaseType::Dist}},
      {TypeClass::Comp, {BaseType::Num, BaseType::Obj}},
      {TypeClass::Spatial, {BaseType::Pos, BaseType::Dist, BaseType::Angl, BaseType::Obj}},
      {TypeClass::Logic, {BaseType::Bool, BaseType::Obj}},
  };
  return table.at(c).contains(t);
}

inline bool slot_accepts(const ValueType& slot, const ValueType& t) {
  if (slot.is_any()) return true;
  if (slot.is_class()) return t.is_base() && member(slot.type_class(), t.base());
  return slot == t;
}

inline bool signature_fits(const RelationSignature& sig, const std::array<ValueType, 3>& types) {
  if (sig.arg_types.size() == 2) return slot_accepts(sig.arg_types[0], types[0]) && slot_accepts(sig.arg_types[1], types[2]);
  for (std::size_t i = 0; i < 3; ++i)
    if (!slot_accepts(sig.arg_types[i], types[i])) return false;
  return true;
}

/// Payload comparison via the textual form (exact) or numeric tolerance.
inline bool values_differ(const TypedValue& a, const TypedValue& b, double tol) {
  if (a.type() != b.type()) return true;
  if (a.type().is_product()) {
    for (std::size_t i = 0; i < a.parts().size(); ++i)
      if (values_differ(a.parts()[i], b.parts()[i], tol)) return true;
    return false;
  }
  switch (a.type().base()) {
    case BaseType::Obj: return a.symbol() != b.symbol();
    case BaseType::Pos:
      if (a.coords().size() != b.coords().size()) return true;
      for (std::size_t i = 0; i < a.coords().size(); ++i)
        if (std::fabs(a.coords()[i] - b.coords()[i]) > tol) return true;
      return false;
    default: return std::fabs(a.scalar() - b.scalar()) > tol;
  }
}

inline std::set<std::string> changed_fields(const StateSnapshot& prev, const StateSnapshot& next, double tol) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < prev.bindings.size(); ++i) {
    const auto& b = prev.bindings[i];
    for (const auto& o : next.bindings)
      if (o.name == b.name && values_differ(b.value, o.value, tol)) out.insert(b.name);
  }
  return out;
}

struct FlatCandidate {
  std::string variable;
  std::string relation;
  std::size_t param_index;
  ConstantBinding constants;

  bool operator==(const FlatCandidate&) const = default;
  auto operator<=>(const FlatCandidate& o) const {
    return std::tie(variable, relation, param_index) <=> std::tie(o.variable, o.relation, o.param_index);
  }
};

/// Nested loop over triplets x relations x clauses, calling clause bodies
/// directly and checking constant domains by hand.
inline std::set<FlatCandidate> brute_force_induce(const TransitionGroup& g, const RelationLibrary& lib,
                                                  const EvaluationContext& ctx) {
  std::set<FlatCandidate> out;
  for (const auto& tr : g.triplets) {
    const std::array<ValueType, 3> types{tr.before.type(), tr.parameter.type(), tr.after.type()};
    for (const auto& rel : lib) {
      for (const auto& clause : rel.clauses) {
        if (!signature_fits(clause.signature, types)) continue;
        std::vector<TypedValue> args{tr.before};
        if (clause.signature.arg_types.size() == 3) args.push_back(tr.parameter);
        args.push_back(tr.after);
        Verdict v = clause.evaluate(args, ctx, nullptr);
        bool ok = v.accepted;
        for (const auto& [k, val] : v.binding) {
          const ConstantDomain* d = nullptr;
          for (const auto& dom : rel.free_constants)
            if (dom.name == k) d = &dom;
          if (d == nullptr || !d->contains(val, ctx.tol)) ok = false;
        }
        if (ok) out.insert({tr.variable, rel.name, tr.param_index, v.binding});
        break;  // first matching clause only
      }
    }
  }
  return out;
}

inline std::set<FlatCandidate> flatten(const ActionTheory& th) {
  std::set<FlatCandidate> out;
  for (const auto& [var, set] : th.candidates)
    for (const auto& [key, info] : set) out.insert({var, key.relation, key.param_index, info.constants});
  return out;
}

}  // namespace oracle
