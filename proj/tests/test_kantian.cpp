#include <random>

#include <gtest/gtest.h>

#include "ddlkant/kantian.hpp"
#include "ddlkant/scenario.hpp"
#include "ddlkant/search.hpp"
#include "ddlkant/syntax.hpp"
#include "oracles.hpp"

using namespace ddlkant;

namespace {

Bounds bounds(int nw, int ns) {
  Bounds b;
  b.n_worlds = nw;
  b.n_subjects = ns;
  return b;
}

Formula corpus_formula(const std::string& name) {
  return expand(parse(read_file(std::string(DDLKANT_CORPUS_DIR) + "/" + name)));
}

bool contains_macro(const Formula& fm) { return symbols_of({fm}).has_macros; }

}  // namespace

TEST(Expand, Will) {
  EXPECT_EQ(expand(parse("(will (maxim c a g) s1)")), parse("(box (implies c (act a s1)))"));
}

TEST(Expand, ProhibitedPermissibleObligatory) {
  EXPECT_EQ(expand(parse("(prohibited (maxim c a g) s1)")), parse("(ob (not (act a s1)) c)"));
  EXPECT_EQ(expand(parse("(permissible (maxim c a g) s1)")), parse("(not (ob (not (act a s1)) c))"));
  EXPECT_EQ(expand(parse("(obligatory (maxim c a g) s1)")), parse("(ob (act a s1) c)"));
}

TEST(Expand, EffectiveAndNotUniversalizable) {
  EXPECT_EQ(expand(parse("(effective (maxim c a g) s1)")), parse("(box (iff (box (implies c (act a s1))) g))"));
  EXPECT_EQ(expand(parse("(not-universalizable (maxim c a g) s1)")),
            parse("(box (implies (forall-subject p (box (implies c (act a p)))) "
                  "(not (box (iff (box (implies c (act a s1))) g)))))"));
}

TEST(Expand, FreshVariableAvoidsCapture) {
  Formula got = expand(parse("(not-universalizable (maxim p a p) p)"));
  EXPECT_EQ(got, parse("(box (implies (forall-subject p1 (box (implies p (act a p1)))) "
                       "(not (box (iff (box (implies p (act a p))) p)))))"));
}

TEST(Expand, WellFormedReadings) {
  EXPECT_EQ(expand(parse("(well-formed (maxim c a g) s1)")),
            parse("(and (not (box (implies c g))) (not (box (implies c (act a s1)))))"));
  KantOptions pointwise;
  pointwise.well_formed = WellFormedReading::Pointwise;
  EXPECT_EQ(expand(parse("(well-formed (maxim c a g) s1)"), pointwise),
            parse("(box (and (not (implies c g)) (not (implies c (act a s1)))))"));
}

// Circumstances, act and goal all "eating breakfast": well-formedness is false in every model.
TEST(Expand, BreakfastMaximIsNeverWellFormed) {
  Formula wf = expand(parse("(well-formed (maxim (act eat s1) eat (act eat s1)) s1)"));
  EXPECT_EQ(check_valid({}, f::neg(wf), bounds(3, 2)).outcome, Outcome::ValidAtBounds);
  KantOptions pointwise;
  pointwise.well_formed = WellFormedReading::Pointwise;
  Formula wf_a = expand(parse("(well-formed (maxim (act eat s1) eat (act eat s1)) s1)"), pointwise);
  EXPECT_EQ(check_valid({}, f::neg(wf_a), bounds(3, 2)).outcome, Outcome::ValidAtBounds);
}

TEST(Expand, IdempotentAndMacroFree) {
  std::mt19937_64 rng(31);
  oracle::GenOptions o;
  o.macros = true;
  o.max_depth = 5;
  oracle::FormulaGen gen(rng, o);
  for (int i = 0; i < 3000; ++i) {
    Formula fm = gen();
    Formula once = expand(fm);
    EXPECT_FALSE(contains_macro(once)) << print(fm);
    EXPECT_EQ(expand(once), once);
  }
}

TEST(Expand, MaximVariables) {
  Formula got = expand(parse("(forall-maxim m (forall-subject s (prohibited m s)))"));
  EXPECT_EQ(got, f::forall_maxim("m", f::forall_subject("s", f::ob(f::neg(f::maxim_act("m", {"s", true})),
                                                                   f::maxim_circ("m")))));
}

TEST(Axioms, ClosedAndMacroFree) {
  for (const Formula& fm : {custom_ful(), custom_ful({}, false), kroy_ful(), distributive_background()}) {
    EXPECT_TRUE(free_sorts(fm).empty());
    EXPECT_FALSE(contains_macro(fm));
  }
}

TEST(Axioms, CorpusFilesMatchBuiltIns) {
  EXPECT_EQ(corpus_formula("ful.l"), custom_ful());
  EXPECT_EQ(corpus_formula("ful-unguarded.l"), custom_ful({}, false));
  EXPECT_EQ(corpus_formula("kroy.l"), kroy_ful());
  EXPECT_EQ(corpus_formula("distributive.l"), distributive_background());
  auto custom = parse_all(read_file(std::string(DDLKANT_CORPUS_DIR) + "/custom-axioms.l"));
  System sys = make_system("custom");
  ASSERT_EQ(custom.size(), sys.axioms.size());
  for (std::size_t i = 0; i < custom.size(); ++i) EXPECT_EQ(expand(custom[i]), sys.axioms[i]);
}

TEST(Axioms, FulIndependentOfBaseDdl) {
  SearchResult r = check_valid({}, custom_ful(), bounds(3, 2));
  ASSERT_EQ(r.outcome, Outcome::CountermodelFound);
  EXPECT_TRUE(check_frame(*r.model).empty());
  EXPECT_FALSE(oracle::valid_in(custom_ful(), *r.model));
}

TEST(Axioms, FulConsistentWithBaseDdl) {
  SearchResult r = find_model({custom_ful()}, {}, bounds(3, 2));
  ASSERT_EQ(r.outcome, Outcome::ModelFound);
  EXPECT_TRUE(oracle::valid_in(custom_ful(), *r.model));
}

TEST(Axioms, KroyTautologicalWithOneSubject) {
  EXPECT_EQ(check_valid({}, kroy_ful(), bounds(3, 1)).outcome, Outcome::ValidAtBounds);
  EXPECT_EQ(check_valid({}, kroy_ful(), bounds(3, 2)).outcome, Outcome::CountermodelFound);
}

TEST(Axioms, DistributiveRulesOutContradictoryObligations) {
  Formula contra = parse("(and (ob p c) (ob (not p) c))");
  for (int nw = 1; nw <= 3; ++nw)
    for (int ns = 1; ns <= 2; ++ns) {
      SearchOptions c1_only;
      c1_only.frame = FrameConditions::only({1});
      EXPECT_EQ(find_model({distributive_background()}, {contra}, bounds(nw, ns), c1_only).outcome,
                Outcome::NoModelAtBounds);
      EXPECT_EQ(find_model({distributive_background()}, {contra}, bounds(nw, ns)).outcome, Outcome::NoModelAtBounds);
    }
  EXPECT_EQ(find_model({}, {contra}, bounds(3, 2)).outcome, Outcome::ModelFound);
}

// Forward direction O{A|C} & O{B|C} -> O{A&B|C} fails in some frame-valid model at two worlds.
TEST(Axioms, DistributiveForwardDirectionNotInBaseDdl) {
  Formula fwd = parse("(forall-term a (forall-term b (forall-term c "
                      "(implies (and (ob a c) (ob b c)) (ob (and a b) c)))))");
  oracle::Signature sig;
  EXPECT_FALSE(oracle::first_model(sig, 1, [&](const Model& m) { return !oracle::valid_in(fwd, m); }));
  auto want = oracle::first_model(sig, 2, [&](const Model& m) { return !oracle::valid_in(fwd, m); });
  ASSERT_TRUE(want);
  SearchResult r = check_valid({}, fwd, bounds(2, 1));
  ASSERT_EQ(r.outcome, Outcome::CountermodelFound);
  EXPECT_EQ(*r.model, *want);
}

TEST(Axioms, DistributiveIdentityInstanceIsTautology) {
  EXPECT_EQ(check_valid({}, parse("(iff (and (ob p c) (ob p c)) (ob (and p p) c))"), bounds(3, 2)).outcome,
            Outcome::ValidAtBounds);
}

TEST(Axioms, UnguardedFulInconsistent) {
  Formula breakfast = corpus_formula("breakfast.l");
  System sys = make_system("custom");
  EXPECT_EQ(find_model(sys.axioms, {breakfast}, bounds(3, 2)).outcome, Outcome::ModelFound);
  std::vector<Formula> unguarded = sys.axioms;
  unguarded[0] = custom_ful({}, false);
  EXPECT_EQ(find_model(unguarded, {breakfast}, bounds(3, 2)).outcome, Outcome::NoModelAtBounds);
}

TEST(Systems, Construction) {
  EXPECT_TRUE(make_system("naive").axioms.empty());
  EXPECT_EQ(make_system("kroy").axioms.size(), 1u);
  System custom = make_system("custom");
  EXPECT_EQ(custom.axioms[0], custom_ful());
  EXPECT_EQ(custom.axioms[1], distributive_background());
  EXPECT_TRUE(custom.evaluates_maxims);
  KantOptions bare;
  bare.universalization_background = false;
  EXPECT_EQ(make_system("custom", bare).axioms.size(), 2u);
  EXPECT_THROW(make_system("utilitarian"), UnknownSystem);
}

// The custom axioms leave no room for a second world: any two-world model makes some
// maxim with an unreachable goal well formed and not universalizable.
TEST(Systems, CustomModelsHaveOneWorld) {
  System sys = make_system("custom");
  Formula two_worlds = parse("(and (dia p) (dia (not p)))");
  EXPECT_EQ(find_model(sys.axioms, {two_worlds}, bounds(3, 2)).outcome, Outcome::NoModelAtBounds);
  KantOptions bare;
  bare.universalization_background = false;
  EXPECT_EQ(find_model(make_system("custom", bare).axioms, {two_worlds}, bounds(3, 2)).outcome,
            Outcome::NoModelAtBounds);
}

// Without the universalization background, obligation need not generalize across subjects.
TEST(Systems, UniversalizationBackgroundDecidesT2) {
  Formula t2 = parse("(forall-open a (forall-term c (forall-subject s (forall-subject p "
                     "(implies (ob (act a s) c) (ob (act a p) c))))))");
  KantOptions bare;
  bare.universalization_background = false;
  SearchResult without = check_valid(make_system("custom", bare).axioms, t2, bounds(3, 2));
  ASSERT_EQ(without.outcome, Outcome::CountermodelFound);
  EXPECT_EQ(without.model->n_subjects(), 2);
  EXPECT_EQ(check_valid(make_system("custom").axioms, t2, bounds(3, 2)).outcome, Outcome::ValidAtBounds);
}
