#pragma once

// Declarative relation manifests. Each entry picks one of a closed set of
// body templates:
//
//   linear        after = before * parameter
//   affine        after = before + C * parameter  (C free; `axis` for pos)
//   equality      after = parameter, or before = after for predicates
//   inequality    before <op> after, op in < > <= >=   (predicates only)
//   preservation  before = after
//
// {"relations": [{"name": "travel_axis2", "signature": "pos x dist -> pos",
//                 "template": "affine", "axis": 2,
//                 "constant": {"name": "C", "min": 0, "exclusive_min": true}}]}

#include <actsem/error.hpp>
#include <actsem/relations.hpp>

#include <json.hpp>

#include <optional>
#include <string>

namespace actsem {

namespace detail {

inline std::optional<double> as_scalar(const TypedValue& v) {
  if (v.is_scalar()) return v.scalar();
  return std::nullopt;
}

inline Evaluator linear_body() {
  return [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
    auto k = as_scalar(a[1]);
    if (!k) return Verdict::reject("parameter is not scalar");
    if (a[0].is_scalar() && a[2].is_scalar())
      return ctx.tol.equal(a[0].scalar() * *k, a[2].scalar()) ? Verdict::accept() : Verdict::reject();
    if (a[0].type() == ValueType(BaseType::Pos) && a[2].type() == ValueType(BaseType::Pos)) {
      const auto& p = a[0].coords();
      const auto& q = a[2].coords();
      if (p.size() != q.size()) return Verdict::reject("dimension mismatch");
      for (std::size_t i = 0; i < p.size(); ++i)
        if (!ctx.tol.equal(p[i] * *k, q[i])) return Verdict::reject();
      return Verdict::accept();
    }
    return Verdict::reject("unsupported payloads");
  };
}

inline Evaluator affine_body(ConstantDomain domain, std::optional<std::size_t> axis) {
  return [domain, axis](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding* fixed) {
    auto k = as_scalar(a[1]);
    if (!k) return Verdict::reject("parameter is not scalar");
    double before = 0.0, after = 0.0;
    if (a[0].is_scalar() && a[2].is_scalar()) {
      before = a[0].scalar();
      after = a[2].scalar();
    } else if (axis && a[0].type() == ValueType(BaseType::Pos) && a[2].type() == ValueType(BaseType::Pos)) {
      const auto& p = a[0].coords();
      const auto& q = a[2].coords();
      if (p.size() != q.size() || *axis >= p.size()) return Verdict::reject("axis out of range");
      for (std::size_t i = 0; i < p.size(); ++i)
        if (i != *axis && !ctx.tol.equal(p[i], q[i])) return Verdict::reject("off-axis coordinate changed");
      before = p[*axis];
      after = q[*axis];
    } else {
      return Verdict::reject("unsupported payloads");
    }
    const double delta = after - before;
    auto fits = [&](const ConstantValue& c) {
      const double* d = std::get_if<double>(&c);
      return d != nullptr && ctx.tol.equal(delta, *d * *k);
    };
    if (auto c = fixed_number(fixed, domain.name))
      return fits(*c) ? Verdict::accept({{domain.name, *c}}) : Verdict::reject();
    if (domain.is_finite()) return solve_by_search(domain, fits);
    if (ctx.tol.equal(*k, 0.0))
      return ctx.tol.equal(delta, 0.0) ? Verdict::reject("ambiguous: any " + domain.name + " fits")
                                       : Verdict::reject("zero parameter");
    return Verdict::accept({{domain.name, delta / *k}});
  };
}

inline Evaluator equality_body(bool predicate) {
  return [predicate](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
    const TypedValue& lhs = predicate ? a[0] : a[1];
    const TypedValue& rhs = predicate ? a[1] : a[2];
    return approx_equal(lhs, rhs, ctx.tol) ? Verdict::accept() : Verdict::reject();
  };
}

inline Evaluator inequality_body(const std::string& op) {
  if (op != "<" && op != ">" && op != "<=" && op != ">=")
    throw Error(ErrorCode::Parse, "inequality op must be one of < > <= >=");
  return [op](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
    auto x = as_scalar(a[0]);
    auto y = as_scalar(a[1]);
    if (!x || !y) return Verdict::reject("non-scalar operands");
    const bool eq = ctx.tol.equal(*x, *y);
    bool ok = false;
    if (op == "<") ok = !eq && *x < *y;
    else if (op == ">") ok = !eq && *x > *y;
    else if (op == "<=") ok = eq || *x < *y;
    else ok = eq || *x > *y;
    return ok ? Verdict::accept() : Verdict::reject();
  };
}

inline Evaluator preservation_body(bool predicate) {
  return [predicate](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
    return approx_equal(a[0], a[predicate ? 1 : 2], ctx.tol) ? Verdict::accept() : Verdict::reject();
  };
}

inline ConstantDomain constant_domain(const nlohmann::json& j) {
  ConstantDomain d;
  d.name = j.value("name", std::string("C"));
  if (j.contains("values")) {
    for (const auto& v : j.at("values")) {
      if (v.is_number()) d.values.emplace_back(v.get<double>());
      else d.values.emplace_back(v.get<std::string>());
    }
  }
  if (j.contains("min")) d.lower = j.at("min").get<double>();
  if (j.contains("max")) d.upper = j.at("max").get<double>();
  d.lower_exclusive = j.value("exclusive_min", false);
  return d;
}

}  // namespace detail

inline RelationDef relation_from_manifest_entry(const nlohmann::json& j) {
  RelationDef def;
  def.name = j.at("name").get<std::string>();
  if (!text::is_identifier(def.name)) throw Error(ErrorCode::Parse, "bad relation name '" + def.name + "'");
  RelationSignature sig{def.name, parse_signature_types(j.at("signature").get<std::string>())};
  const bool predicate = sig.is_predicate();
  const std::string tmpl = j.at("template").get<std::string>();
  def.description = j.value("description", tmpl);
  Evaluator body;
  if (tmpl == "linear") {
    if (predicate) throw Error(ErrorCode::Parse, "linear template needs a ternary signature");
    body = detail::linear_body();
  } else if (tmpl == "affine") {
    if (predicate) throw Error(ErrorCode::Parse, "affine template needs a ternary signature");
    ConstantDomain dom;
    dom.name = "C";
    if (j.contains("constant")) dom = detail::constant_domain(j.at("constant"));
    std::optional<std::size_t> axis;
    if (j.contains("axis")) axis = j.at("axis").get<std::size_t>();
    body = detail::affine_body(dom, axis);
    def.free_constants.push_back(std::move(dom));
  } else if (tmpl == "equality") {
    body = detail::equality_body(predicate);
  } else if (tmpl == "inequality") {
    if (!predicate) throw Error(ErrorCode::Parse, "inequality template needs a binary signature");
    body = detail::inequality_body(j.at("op").get<std::string>());
  } else if (tmpl == "preservation") {
    body = detail::preservation_body(predicate);
  } else {
    throw Error(ErrorCode::Parse, "unknown body template '" + tmpl + "'");
  }
  def.clauses.push_back({std::move(sig), std::move(body)});
  return def;
}

/// Adds every manifest entry to `lib`; duplicates raise ErrorCode::Duplicate.
inline void load_relation_manifest(RelationLibrary& lib, const std::string& src) {
  try {
    auto j = nlohmann::json::parse(src);
    for (const auto& entry : j.at("relations")) lib.add(relation_from_manifest_entry(entry));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("invalid relation manifest: ") + e.what());
  }
}

}  // namespace actsem
