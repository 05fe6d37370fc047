#include "oracles.hpp"

#include <actsem/induction.hpp>
#include <actsem/manifest.hpp>
#include <actsem/relations.hpp>

#include <gtest/gtest.h>

using namespace actsem;

namespace {

StateSnapshot heading_snapshot(Timestamp t, double heading, Coord pos = {0, 0}) {
  return {t, {{"r_pos", TypedValue::pos(std::move(pos))}, {"r_dir", TypedValue::angl(heading)}}};
}

Verdict eval(const RelationLibrary& lib, std::string_view name, const TypedValue& before, const TypedValue& param,
             const TypedValue& after, const EvaluationContext& ctx = {}) {
  const RelationDef* rel = lib.find(name);
  EXPECT_NE(rel, nullptr) << name;
  return evaluate_relation(*rel, before, param, after, ctx);
}

double constant_c(const Verdict& v) { return std::get<double>(v.binding.at("C")); }

}  // namespace

TEST(BuiltinLibrary, ContainsTheDocumentedRelations) {
  RelationLibrary lib = builtin_library();
  for (const char* n : {"add_to", "sub_from", "mult_by", "div_by", "greater_than", "less_than", "equals", "left_of",
                        "dist", "has_new_position", "travel_axis0", "travel_axis1", "change_in_orientation",
                        "preserves_value"})
    EXPECT_NE(lib.find(n), nullptr) << n;
  EXPECT_EQ(lib.size(), 14u);
}

TEST(BuiltinLibrary, ArithmeticExamples) {
  RelationLibrary lib = builtin_library();
  auto n = TypedValue::num;
  EXPECT_TRUE(eval(lib, "add_to", n(2), n(3), n(5)).accepted);
  EXPECT_FALSE(eval(lib, "add_to", n(2), n(3), n(7)).accepted);
  EXPECT_TRUE(eval(lib, "sub_from", n(5), n(3), n(2)).accepted);
  EXPECT_TRUE(eval(lib, "mult_by", n(2), n(3), n(6)).accepted);
  EXPECT_TRUE(eval(lib, "div_by", n(6), n(3), n(2)).accepted);
  EXPECT_FALSE(eval(lib, "div_by", n(6), n(0), n(0)).accepted);
  // dist-typed operands do not conform to num
  EXPECT_FALSE(eval(lib, "add_to", n(2), TypedValue::dist(3), n(5)).accepted);
}

TEST(BuiltinLibrary, SpatialExamples) {
  RelationLibrary lib = builtin_library();
  auto p = [](double x, double y) { return TypedValue::pos({x, y}); };
  EXPECT_TRUE(eval(lib, "left_of", p(3, 9), TypedValue::num(0), p(5, 0)).accepted);
  EXPECT_FALSE(eval(lib, "left_of", p(5, 9), TypedValue::num(0), p(3, 0)).accepted);
  EXPECT_EQ(euclidean_distance({0, 0}, {3, 4}), 5.0);
  EXPECT_TRUE(eval(lib, "dist", p(0, 0), p(3, 4), TypedValue::dist(5)).accepted);
  EXPECT_FALSE(eval(lib, "dist", p(0, 0), p(3, 4), TypedValue::dist(6)).accepted);
}

TEST(BuiltinLibrary, TravelWorkedExample) {
  RelationLibrary lib = builtin_library();
  StateSnapshot prior = heading_snapshot(31, 90, {9, 14});
  StateSnapshot posterior = heading_snapshot(33, 90, {9, 20});
  EvaluationContext ctx{&prior, &posterior};
  Verdict v = eval(lib, "travel_axis1", TypedValue::pos({9, 14}), TypedValue::dist(3), TypedValue::pos({9, 20}), ctx);
  ASSERT_TRUE(v.accepted) << v.diagnostic;
  EXPECT_EQ(constant_c(v), 2.0);

  Verdict h = eval(lib, "has_new_position", TypedValue::pos({9, 14}), TypedValue::dist(3), TypedValue::pos({9, 20}), ctx);
  ASSERT_TRUE(h.accepted);
  EXPECT_EQ(constant_c(h), 2.0);

  // the wrong axis and a westward heading both reject
  EXPECT_FALSE(
      eval(lib, "travel_axis0", TypedValue::pos({9, 14}), TypedValue::dist(3), TypedValue::pos({9, 20}), ctx).accepted);
  StateSnapshot west = heading_snapshot(31, 270, {9, 14});
  EvaluationContext wctx{&west, &posterior};
  EXPECT_FALSE(
      eval(lib, "travel_axis1", TypedValue::pos({9, 14}), TypedValue::dist(3), TypedValue::pos({9, 20}), wctx).accepted);
  Verdict back =
      eval(lib, "travel_axis1", TypedValue::pos({9, 20}), TypedValue::dist(3), TypedValue::pos({9, 14}), wctx);
  ASSERT_TRUE(back.accepted);
  EXPECT_EQ(constant_c(back), 2.0);
}

TEST(BuiltinLibrary, ZeroDistanceMovesOnlyPreserve) {
  RelationLibrary lib = builtin_library();
  StateSnapshot prior = heading_snapshot(1, 90);
  EvaluationContext ctx{&prior, &prior};
  auto p = TypedValue::pos({1, 1});
  EXPECT_FALSE(eval(lib, "travel_axis0", p, TypedValue::dist(0), p, ctx).accepted);
  EXPECT_FALSE(eval(lib, "has_new_position", p, TypedValue::dist(0), p, ctx).accepted);
  EXPECT_TRUE(eval(lib, "preserves_value", p, TypedValue::dist(0), p, ctx).accepted);
  EXPECT_FALSE(eval(lib, "has_new_position", p, TypedValue::dist(0), TypedValue::pos({2, 1}), ctx).accepted);
}

TEST(BuiltinLibrary, ChangeInOrientation) {
  RelationLibrary lib = builtin_library();
  StateSnapshot prior = heading_snapshot(1, 0, {4, 5});
  StateSnapshot turned = heading_snapshot(3, 90, {4, 5});
  EvaluationContext ctx{&prior, &turned};
  auto pos = TypedValue::pos({4, 5});
  Verdict v = eval(lib, "change_in_orientation", pos, TypedValue::angl(90), pos, ctx);
  EXPECT_TRUE(v.accepted);
  EXPECT_TRUE(v.binding.empty());
  // heading clause: 0 -> 90 explained by G=90, position unchanged in context
  EXPECT_TRUE(
      eval(lib, "change_in_orientation", TypedValue::angl(0), TypedValue::angl(90), TypedValue::angl(90), ctx).accepted);
  EXPECT_TRUE(eval(lib, "change_in_orientation", TypedValue::angl(10), TypedValue::angl(45), TypedValue::angl(325), ctx)
                  .accepted);
  EXPECT_FALSE(
      eval(lib, "change_in_orientation", TypedValue::angl(0), TypedValue::angl(45), TypedValue::angl(90), ctx).accepted);

  StateSnapshot still = heading_snapshot(3, 0, {4, 5});
  EvaluationContext no_turn{&prior, &still};
  EXPECT_FALSE(eval(lib, "change_in_orientation", pos, TypedValue::angl(90), pos, no_turn).accepted);
  EXPECT_FALSE(
      eval(lib, "change_in_orientation", pos, TypedValue::angl(90), TypedValue::pos({4, 6}), ctx).accepted);
}

TEST(BuiltinLibrary, ComparisonsOnNumbersAndSymbols) {
  RelationLibrary lib = builtin_library();
  auto n = TypedValue::num;
  EXPECT_TRUE(eval(lib, "greater_than", n(3), n(0), n(2)).accepted);
  EXPECT_FALSE(eval(lib, "greater_than", n(2), n(0), n(2)).accepted);
  EXPECT_TRUE(eval(lib, "less_than", n(1), n(0), n(2)).accepted);
  EXPECT_TRUE(eval(lib, "equals", TypedValue::obj("a"), n(0), TypedValue::obj("a")).accepted);
  EXPECT_TRUE(eval(lib, "less_than", TypedValue::obj("a"), n(0), TypedValue::obj("b")).accepted);
  EXPECT_FALSE(eval(lib, "equals", n(1), n(0), TypedValue::obj("a")).accepted);
  EXPECT_FALSE(eval(lib, "equals", TypedValue::dist(1), n(0), TypedValue::dist(1)).accepted);  // dist not in comp
}

TEST(BuiltinLibrary, EvaluationIsDeterministic) {
  RelationLibrary lib = builtin_library();
  oracle::Gen gen(17);
  const std::vector<ValueType> types{BaseType::Num, BaseType::Pos, BaseType::Dist, BaseType::Angl, BaseType::Obj};
  for (int i = 0; i < 3000; ++i) {
    StateSnapshot prior = heading_snapshot(1, 45.0 * gen.integer(0, 7));
    StateSnapshot posterior = heading_snapshot(3, 45.0 * gen.integer(0, 7));
    EvaluationContext ctx{&prior, &posterior};
    TypedValue before = gen.value(gen.pick(types));
    TypedValue param = gen.value(gen.pick(types));
    TypedValue after = gen.coin() ? gen.value(before.type()) : gen.value(gen.pick(types));
    for (const auto& rel : lib) {
      Verdict a = evaluate_relation(rel, before, param, after, ctx);
      Verdict b = evaluate_relation(rel, before, param, after, ctx);
      ASSERT_EQ(a.accepted, b.accepted);
      ASSERT_EQ(a.binding, b.binding);
    }
  }
}

TEST(BuiltinLibrary, ConstantsAreWitnesses) {
  RelationLibrary lib = builtin_library();
  oracle::Gen gen(23);
  int accepted_with_constants = 0;
  for (int i = 0; i < 5000; ++i) {
    const double heading = 90.0 * gen.integer(0, 3);
    StateSnapshot prior = heading_snapshot(1, heading);
    StateSnapshot posterior = heading_snapshot(3, heading);
    EvaluationContext ctx{&prior, &posterior};
    Coord p1{static_cast<double>(gen.integer(0, 6)), static_cast<double>(gen.integer(0, 6))};
    Coord p2 = p1;
    p2[static_cast<std::size_t>(gen.integer(0, 1))] += gen.integer(-6, 6);
    if (gen.coin(0.3)) p2[0] += gen.real(-2, 2);
    TypedValue before = TypedValue::pos(p1), after = TypedValue::pos(p2);
    TypedValue d = TypedValue::dist(gen.integer(0, 4));
    for (const auto& rel : lib) {
      Verdict v = evaluate_relation(rel, before, d, after, ctx);
      if (!v.accepted || v.binding.empty()) continue;
      ++accepted_with_constants;
      Verdict again = evaluate_relation(rel, before, d, after, ctx, &v.binding);
      ASSERT_TRUE(again.accepted) << rel.name;
      ConstantBinding off = v.binding;
      off["C"] = std::get<double>(off["C"]) + 0.5;
      ASSERT_FALSE(evaluate_relation(rel, before, d, after, ctx, &off).accepted) << rel.name;
    }
  }
  EXPECT_GT(accepted_with_constants, 100);
}

TEST(BuiltinLibrary, PreservesValueIsToleranceEquality) {
  RelationLibrary lib = builtin_library();
  oracle::Gen gen(41);
  EvaluationContext ctx;
  for (int i = 0; i < 2000; ++i) {
    ValueType t = gen.concrete_type();
    TypedValue a = gen.value(t);
    TypedValue b = gen.coin() ? a : gen.value(t);
    if (gen.coin(0.1) && a.is_scalar() && a.type() != ValueType(BaseType::Bool) && a.type() != ValueType(BaseType::Angl))
      b = TypedValue::scalar(a.type().base(), a.scalar() + 1e-12);
    Verdict v = eval(lib, "preserves_value", a, TypedValue::num(0), b, ctx);
    ASSERT_EQ(v.accepted, !oracle::values_differ(a, b, kDefaultTolerance));
  }
}

TEST(RegisterRelation, GrowsLibraryAndRejectsDuplicates) {
  RelationLibrary lib = builtin_library();
  const std::size_t before = lib.size();
  RelationLibrary more = register_relation(
      lib, relation_from_manifest_entry(nlohmann::json::parse(
               R"({"name": "travel_axis2", "signature": "pos x dist -> pos", "template": "affine", "axis": 2,
                   "constant": {"name": "C", "min": 0, "exclusive_min": true}})")));
  EXPECT_EQ(more.size(), before + 1);
  EXPECT_EQ(lib.size(), before);
  try {
    register_relation(more, builtin_library().find("add_to") ? RelationDef(*builtin_library().find("add_to"))
                                                             : RelationDef{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Duplicate);
  }
  Verdict v = evaluate_relation(*more.find("travel_axis2"), TypedValue::pos({1, 1, 0}), TypedValue::dist(2),
                                TypedValue::pos({1, 1, 4}), EvaluationContext{});
  ASSERT_TRUE(v.accepted);
  EXPECT_EQ(std::get<double>(v.binding.at("C")), 2.0);
}

TEST(RegisterRelation, CustomEvaluatorIsFoundByInduction) {
  RelationDef doubling;
  doubling.name = "scaled_by";
  doubling.clauses.push_back({RelationSignature{"scaled_by", {BaseType::Num, BaseType::Num, BaseType::Num}},
                              [](std::span<const TypedValue> a, const EvaluationContext& ctx, const ConstantBinding*) {
                                return ctx.tol.equal(a[2].scalar(), a[0].scalar() * a[1].scalar()) ? Verdict::accept()
                                                                                                   : Verdict::reject();
                              }});
  RelationLibrary lib = register_relation(builtin_library(), doubling);

  // x doubles on every `scale` action with parameter 2
  Sample s = ingest_trace(
      "state t=1 x=num:3\naction t=2 name=scale params=[num:2]\n"
      "state t=3 x=num:6\naction t=4 name=scale params=[num:2]\n"
      "state t=5 x=num:12\naction t=6 name=scale params=[num:2]\nstate t=7 x=num:24\n");
  TheoryStore store = learn_from_trace(s, lib);
  const ActionTheory* th = store.find("scale");
  ASSERT_NE(th, nullptr);
  ASSERT_TRUE(th->candidates.contains("x"));
  EXPECT_TRUE(th->candidates.at("x").contains(CandidateKey{"scaled_by", 0}));
  EXPECT_TRUE(th->candidates.at("x").contains(CandidateKey{"mult_by", 0}));
  EXPECT_FALSE(th->candidates.at("x").contains(CandidateKey{"add_to", 0}));  // only fits the first step
}

TEST(Manifest, TemplatesAndErrors) {
  RelationLibrary lib;
  load_relation_manifest(lib, R"({"relations": [
      {"name": "times", "signature": "num x num -> num", "template": "linear"},
      {"name": "step", "signature": "num x num -> num", "template": "affine",
       "constant": {"name": "K", "values": [1, 2, 3]}},
      {"name": "becomes", "signature": "num x num -> num", "template": "equality"},
      {"name": "rises", "signature": "num,num", "template": "inequality", "op": "<"},
      {"name": "keeps", "signature": "any x any -> any", "template": "preservation"}]})");
  EXPECT_EQ(lib.size(), 5u);
  auto n = TypedValue::num;
  EvaluationContext ctx;
  EXPECT_TRUE(evaluate_relation(*lib.find("times"), n(3), n(2), n(6), ctx).accepted);
  Verdict step = evaluate_relation(*lib.find("step"), n(1), n(2), n(5), ctx);
  ASSERT_TRUE(step.accepted);
  EXPECT_EQ(std::get<double>(step.binding.at("K")), 2.0);
  EXPECT_FALSE(evaluate_relation(*lib.find("step"), n(1), n(2), n(15), ctx).accepted);
  // zero parameter with no change fits every K: ambiguous
  Verdict amb = evaluate_relation(*lib.find("step"), n(1), n(0), n(1), ctx);
  EXPECT_FALSE(amb.accepted);
  EXPECT_NE(amb.diagnostic.find("ambiguous"), std::string::npos);
  EXPECT_TRUE(evaluate_relation(*lib.find("becomes"), n(1), n(4), n(4), ctx).accepted);
  EXPECT_TRUE(evaluate_relation(*lib.find("rises"), n(1), n(0), n(4), ctx).accepted);
  EXPECT_TRUE(evaluate_relation(*lib.find("keeps"), TypedValue::obj("a"), n(0), TypedValue::obj("a"), ctx).accepted);

  EXPECT_THROW(load_relation_manifest(lib, R"({"relations": [{"name": "times", "signature": "num x num -> num",
                                              "template": "linear"}]})"),
               Error);
  EXPECT_THROW(load_relation_manifest(lib, R"({"relations": [{"name": "x", "signature": "num,num",
                                              "template": "magic"}]})"),
               Error);
  EXPECT_THROW(load_relation_manifest(lib, "not json"), Error);
}
