#pragma once

// Background knowledge: typed, evaluable relations and the built-in library.
//
// A relation is a name plus one or more typed clauses. Induction selects the
// clause whose signature matches the triplet types, so a relation such as
// change_in_orientation can explain both the preserved position and the
// turned heading.

#include <actsem/error.hpp>
#include <actsem/trace.hpp>
#include <actsem/types.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace actsem {

using ConstantValue = std::variant<double, std::string>;
using ConstantBinding = std::map<std::string, ConstantValue>;

inline std::string format_constant(const ConstantValue& v) {
  if (const double* d = std::get_if<double>(&v)) return text::format_number(*d);
  return std::get<std::string>(v);
}

inline bool constants_compatible(const ConstantBinding& a, const ConstantBinding& b, const Tolerance& tol) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.index() != ib->second.index()) return false;
    if (const double* da = std::get_if<double>(&ia->second)) {
      if (!tol.equal(*da, std::get<double>(ib->second))) return false;
    } else if (std::get<std::string>(ia->second) != std::get<std::string>(ib->second)) {
      return false;
    }
  }
  return true;
}

/// Allowed values of a free constant: either a finite set or a numeric
/// interval (lower bound optionally exclusive).
struct ConstantDomain {
  std::string name;
  std::vector<ConstantValue> values;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_exclusive = false;

  static ConstantDomain positive(std::string name) {
    ConstantDomain d;
    d.name = std::move(name);
    d.lower = 0.0;
    d.lower_exclusive = true;
    return d;
  }

  bool is_finite() const { return !values.empty(); }

  bool contains(const ConstantValue& v, const Tolerance& tol) const {
    if (is_finite()) {
      return std::any_of(values.begin(), values.end(), [&](const ConstantValue& c) {
        return constants_compatible({{name, c}}, {{name, v}}, tol);
      });
    }
    const double* d = std::get_if<double>(&v);
    if (d == nullptr) return false;
    if (lower_exclusive ? !(*d > lower) : !(*d >= lower)) return false;
    return *d <= upper;
  }
};

/// Read-only view of the snapshots bracketing the action being explained.
struct EvaluationContext {
  const StateSnapshot* prior = nullptr;
  const StateSnapshot* posterior = nullptr;
  std::string heading_var = "r_dir";
  std::string position_var = "r_pos";
  Tolerance tol{};
};

struct Verdict {
  bool accepted = false;
  ConstantBinding binding;
  std::string diagnostic;

  static Verdict accept(ConstantBinding b = {}) { return {true, std::move(b), {}}; }
  static Verdict reject(std::string why = {}) { return {false, {}, std::move(why)}; }
};

/// `args` is (before, parameter, after) for ternary clauses and (before,
/// after) for predicates. When `fixed` is non-null the free constants are
/// taken from it instead of being solved.
using Evaluator =
    std::function<Verdict(std::span<const TypedValue> args, const EvaluationContext& ctx, const ConstantBinding* fixed)>;

struct RelationClause {
  RelationSignature signature;
  Evaluator evaluate;
};

struct RelationDef {
  std::string name;
  std::vector<RelationClause> clauses;
  std::vector<ConstantDomain> free_constants;
  std::string description;

  const RelationClause* clause_for(std::span<const ValueType> triplet_types) const {
    for (const auto& c : clauses)
      if (signature_match(c.signature, triplet_types)) return &c;
    return nullptr;
  }

  const ConstantDomain* constant(std::string_view n) const {
    for (const auto& d : free_constants)
      if (d.name == n) return &d;
    return nullptr;
  }
};

/// Evaluates `rel` on a triplet. Rejects when no clause matches the triplet
/// types or when a returned constant falls outside its declared domain.
inline Verdict evaluate_relation(const RelationDef& rel, const TypedValue& before, const TypedValue& param,
                                 const TypedValue& after, const EvaluationContext& ctx,
                                 const ConstantBinding* fixed = nullptr) {
  const std::array<ValueType, 3> types{before.type(), param.type(), after.type()};
  const RelationClause* clause = rel.clause_for(types);
  if (clause == nullptr) return Verdict::reject("no clause of " + rel.name + " matches the triplet types");
  Verdict v;
  if (clause->signature.is_predicate()) {
    const std::array<TypedValue, 2> args{before, after};
    v = clause->evaluate(args, ctx, fixed);
  } else {
    const std::array<TypedValue, 3> args{before, param, after};
    v = clause->evaluate(args, ctx, fixed);
  }
  if (!v.accepted) return v;
  for (const auto& [key, value] : v.binding) {
    const ConstantDomain* dom = rel.constant(key);
    if (dom == nullptr) return Verdict::reject(rel.name + " bound undeclared constant " + key);
    if (!dom->contains(value, ctx.tol))
      return Verdict::reject(rel.name + ": constant " + key + "=" + format_constant(value) + " outside its domain");
  }
  return v;
}

/// Finite-domain constant search: accepts iff exactly one value satisfies
/// `holds`.
template <typename Pred>
Verdict solve_by_search(const ConstantDomain& domain, Pred&& holds) {
  std::optional<ConstantValue> found;
  for (const auto& c : domain.values) {
    if (!holds(c)) continue;
    if (found) return Verdict::reject("ambiguous: several values of " + domain.name + " fit");
    found = c;
  }
  if (!found) return Verdict::reject("no value of " + domain.name + " fits");
  return Verdict::accept({{domain.name, *found}});
}

class RelationLibrary {
 public:
  void add(RelationDef rel) {
    if (rel.clauses.empty()) throw Error(ErrorCode::Range, "relation '" + rel.name + "' has no clauses");
    auto it = std::lower_bound(relations_.begin(), relations_.end(), rel.name,
                               [](const RelationDef& r, const std::string& n) { return r.name < n; });
    if (it != relations_.end() && it->name == rel.name)
      throw Error(ErrorCode::Duplicate, "relation '" + rel.name + "' already registered");
    relations_.insert(it, std::move(rel));
  }

  const RelationDef* find(std::string_view name) const {
    for (const auto& r : relations_)
      if (r.name == name) return &r;
    return nullptr;
  }

  std::size_t size() const { return relations_.size(); }
  bool empty() const { return relations_.empty(); }
  auto begin() const { return relations_.begin(); }
  auto end() const { return relations_.end(); }

 private:
  std::vector<RelationDef> relations_;  // sorted by name
};

inline RelationLibrary register_relation(RelationLibrary lib, RelationDef rel) {
  lib.add(std::move(rel));
  return lib;
}

// --- geometry helpers ---------------------------------------------------------

/// sin/cos of an angle in degrees, exact at multiples of 90.
inline double sin_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (r == 0.0 || r == 180.0) return 0.0;
  if (r == 90.0) return 1.0;
  if (r == 270.0) return -1.0;
  return std::sin(r * std::numbers::pi / 180.0);
}

inline double cos_deg(double deg) { return sin_deg(deg + 90.0); }

inline double euclidean_distance(const Coord& a, const Coord& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

/// +1 when heading has an eastward component, -1 westward, nullopt when the
/// heading is (numerically) due north or south or missing from the context.
inline std::optional<int> orientation_west_east(const EvaluationContext& ctx) {
  if (ctx.prior == nullptr) return std::nullopt;
  const TypedValue* h = ctx.prior->value(ctx.heading_var);
  if (h == nullptr || !h->type().is_base() || h->type().base() != BaseType::Angl) return std::nullopt;
  double s = sin_deg(h->scalar());
  if (s > ctx.tol.abs) return 1;
  if (s < -ctx.tol.abs) return -1;
  return std::nullopt;
}

inline std::optional<double> fixed_number(const ConstantBinding* fixed, const std::string& name) {
  if (fixed == nullptr) return std::nullopt;
  auto it = fixed->find(name);
  if (it == fixed->end()) return std::nullopt;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  return std::nullopt;
}

// --- built-ins --------------------------------------------------------------

namespace builtin {

inline RelationDef single(std::string name, std::vector<ValueType> types, Evaluator eval, std::string description,
                          std::vector<ConstantDomain> constants = {}) {
  RelationDef def;
  def.name = name;
  def.clauses.push_back({RelationSignature{std::move(name), std::move(types)}, std::move(eval)});
  def.free_constants = std::move(constants);
  def.description = std::move(description);
  return def;
}

template <typename Op>
RelationDef arithmetic(std::string name, Op op, std::string description) {
  return single(
      std::move(name), {BaseType::Num, BaseType::Num, BaseType::Num},
      [op](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
        std::optional<double> z = op(a[0].scalar(), a[1].scalar());
        if (!z) return Verdict::reject("undefined");
        return ctx.tol.equal(*z, a[2].scalar()) ? Verdict::accept() : Verdict::reject();
      },
      std::move(description));
}

/// -1, 0, +1 ordering of two comparable values; nullopt when incomparable.
inline std::optional<int> compare(const TypedValue& x, const TypedValue& y, const Tolerance& tol) {
  if (x.type() != y.type()) return std::nullopt;
  if (x.is_scalar()) {
    if (tol.equal(x.scalar(), y.scalar())) return 0;
    return x.scalar() < y.scalar() ? -1 : 1;
  }
  if (x.type().is_base() && x.type().base() == BaseType::Obj) {
    int c = x.symbol().compare(y.symbol());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  return std::nullopt;
}

template <typename Accept>
RelationDef comparison(std::string name, Accept accept, std::string description) {
  return single(
      std::move(name), {TypeClass::Comp, TypeClass::Comp},
      [accept](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
        auto c = compare(a[0], a[1], ctx.tol);
        if (!c) return Verdict::reject("incomparable");
        return accept(*c) ? Verdict::accept() : Verdict::reject();
      },
      std::move(description));
}

inline RelationDef travel_axis(std::size_t axis) {
  const std::string name = "travel_axis" + std::to_string(axis);
  return single(
      name, {BaseType::Pos, BaseType::Dist, BaseType::Pos},
      [axis](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding* fixed) {
        const Coord& p1 = a[0].coords();
        const Coord& p2 = a[2].coords();
        const double d = a[1].scalar();
        if (p1.size() != p2.size() || axis >= p1.size()) return Verdict::reject("axis out of range");
        for (std::size_t j = 0; j < p1.size(); ++j)
          if (j != axis && !ctx.tol.equal(p1[j], p2[j])) return Verdict::reject("off-axis coordinate changed");
        const double delta = p2[axis] - p1[axis];
        if (ctx.tol.equal(delta, 0.0)) return Verdict::reject("positions do not differ");
        if (!(d > ctx.tol.abs)) return Verdict::reject("zero distance");
        auto z = orientation_west_east(ctx);
        if (!z) return Verdict::reject("heading has no west-east orientation");
        if (auto c = fixed_number(fixed, "C")) {
          return ctx.tol.equal(delta, *z * *c * d) ? Verdict::accept({{"C", *c}}) : Verdict::reject();
        }
        return Verdict::accept({{"C", delta / (*z * d)}});
      },
      "exactly coordinate " + std::to_string(axis) +
          " changes by Z*C*D, Z = +1 heading east and -1 heading west",
      {ConstantDomain::positive("C")});
}

}  // namespace builtin

inline RelationLibrary builtin_library() {
  using namespace builtin;
  RelationLibrary lib;

  lib.add(arithmetic(
      "add_to", [](double x, double y) -> std::optional<double> { return x + y; }, "Z = X + Y"));
  lib.add(arithmetic(
      "sub_from", [](double x, double y) -> std::optional<double> { return x - y; }, "Z = X - Y"));
  lib.add(arithmetic(
      "mult_by", [](double x, double y) -> std::optional<double> { return x * y; }, "Z = X * Y"));
  lib.add(arithmetic(
      "div_by",
      [](double x, double y) -> std::optional<double> {
        if (y == 0.0) return std::nullopt;
        return x / y;
      },
      "Z = X / Y, Y != 0"));

  lib.add(comparison("greater_than", [](int c) { return c > 0; }, "X > Y"));
  lib.add(comparison("less_than", [](int c) { return c < 0; }, "X < Y"));
  lib.add(comparison("equals", [](int c) { return c == 0; }, "X = Y"));

  lib.add(single(
      "left_of", {BaseType::Pos, BaseType::Pos},
      [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
        return a[1].coords()[0] - a[0].coords()[0] > ctx.tol.abs ? Verdict::accept() : Verdict::reject();
      },
      "X1 < X2 for [X1,_] and [X2,_]"));

  lib.add(single(
      "dist", {BaseType::Pos, BaseType::Pos, BaseType::Dist},
      [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
        if (a[0].coords().size() != a[1].coords().size()) return Verdict::reject("dimension mismatch");
        return ctx.tol.equal(euclidean_distance(a[0].coords(), a[1].coords()), a[2].scalar()) ? Verdict::accept()
                                                                                              : Verdict::reject();
      },
      "D = Euclidean distance between P1 and P2"));

  lib.add(single(
      "has_new_position", {BaseType::Pos, BaseType::Dist, BaseType::Pos},
      [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding* fixed) {
        if (a[0].coords().size() != a[2].coords().size()) return Verdict::reject("dimension mismatch");
        const double disp = euclidean_distance(a[0].coords(), a[2].coords());
        const double d = a[1].scalar();
        if (!(disp > ctx.tol.abs)) return Verdict::reject("positions do not differ");
        if (!(d > ctx.tol.abs)) return Verdict::reject("zero distance");
        if (auto c = fixed_number(fixed, "C"))
          return ctx.tol.equal(disp, *c * d) ? Verdict::accept({{"C", *c}}) : Verdict::reject();
        return Verdict::accept({{"C", disp / d}});
      },
      "positions differ and the displacement is C*D", {ConstantDomain::positive("C")}));

  lib.add(travel_axis(0));
  lib.add(travel_axis(1));

  {
    RelationDef def;
    def.name = "change_in_orientation";
    def.description = "position preserved while the heading turns by G";
    def.clauses.push_back(
        {RelationSignature{def.name, {BaseType::Pos, BaseType::Angl, BaseType::Pos}},
         [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
           if (!approx_equal(a[0], a[2], ctx.tol)) return Verdict::reject("position changed");
           if (ctx.prior == nullptr || ctx.posterior == nullptr) return Verdict::reject("no context");
           const TypedValue* h0 = ctx.prior->value(ctx.heading_var);
           const TypedValue* h1 = ctx.posterior->value(ctx.heading_var);
           if (h0 == nullptr || h1 == nullptr) return Verdict::reject("no heading observable");
           return approx_equal(*h0, *h1, ctx.tol) ? Verdict::reject("heading unchanged") : Verdict::accept();
         }});
    def.clauses.push_back(
        {RelationSignature{def.name, {BaseType::Angl, BaseType::Angl, BaseType::Angl}},
         [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
           double turn = std::fmod(a[2].scalar() - a[0].scalar() + 720.0, 360.0);
           double g = std::fmod(a[1].scalar(), 360.0);
           auto circ_eq = [&](double x, double y) {
             double d = std::fabs(x - y);
             return std::min(d, 360.0 - d) <= ctx.tol.abs;
           };
           if (circ_eq(turn, 0.0)) return Verdict::reject("heading unchanged");
           if (!circ_eq(turn, g) && !circ_eq(turn, 360.0 - g)) return Verdict::reject("turn differs from G");
           if (ctx.prior == nullptr || ctx.posterior == nullptr) return Verdict::reject("no context");
           const TypedValue* p0 = ctx.prior->value(ctx.position_var);
           const TypedValue* p1 = ctx.posterior->value(ctx.position_var);
           if (p0 == nullptr || p1 == nullptr) return Verdict::reject("no position observable");
           return approx_equal(*p0, *p1, ctx.tol) ? Verdict::accept() : Verdict::reject("position changed");
         }});
    lib.add(std::move(def));
  }

  lib.add(single(
      "preserves_value", {ValueType::any(), ValueType::any(), ValueType::any()},
      [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
        return approx_equal(a[0], a[2], ctx.tol) ? Verdict::accept() : Verdict::reject();
      },
      "before = after"));

  return lib;
}

}  // namespace actsem
