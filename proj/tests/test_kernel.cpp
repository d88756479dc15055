#include <random>

#include <gtest/gtest.h>

#include "ddlkant/model.hpp"
#include "ddlkant/syntax.hpp"
#include "oracles.hpp"

using namespace ddlkant;

namespace {

Model one_world_obligating_everything() {
  Model m = Model::empty(1, 1);
  m.set_obligatory(1, 1);
  m.val["p"] = 1;
  return m;
}

}  // namespace

TEST(Eval, TrueEverywhere) {
  std::mt19937_64 rng(1);
  oracle::GenOptions o;
  for (int nw = 1; nw <= 3; ++nw) {
    Model m = oracle::random_model(rng, nw, 2, o);
    for (int w = 0; w < nw; ++w) EXPECT_TRUE(eval(f::top(), m, w));
    EXPECT_EQ(extension(f::top(), m), m.all());
  }
}

TEST(Eval, HandEvaluatedObligation) {
  Model m = one_world_obligating_everything();
  EXPECT_TRUE(eval(parse("(ob p)"), m, 0));
  EXPECT_FALSE(eval(parse("(ob (not p))"), m, 0));
}

TEST(Eval, UninterpretedAndUnexpanded) {
  Model m = Model::empty(1, 1);
  EXPECT_THROW(eval(parse("p"), m, 0), UninterpretedSymbol);
  EXPECT_THROW(eval(parse("(act a s1)"), m, 0), UninterpretedSymbol);
  EXPECT_THROW(eval(parse("(will (maxim true a true) s1)"), m, 0), UnexpandedMacro);
}

TEST(Extension, NegationAndBox) {
  std::mt19937_64 rng(2);
  oracle::GenOptions o;
  oracle::FormulaGen gen(rng, o);
  for (int i = 0; i < 500; ++i) {
    Model m = oracle::random_model(rng, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2), o);
    Formula fm = gen();
    EXPECT_EQ(extension(f::neg(fm), m), m.all() & ~extension(fm, m));
    WorldSet b = extension(f::box(fm), m);
    EXPECT_TRUE(b == 0 || b == m.all());
  }
}

TEST(Rigidity, ObAndBoxIndependentOfWorld) {
  std::mt19937_64 rng(3);
  oracle::GenOptions o;
  oracle::FormulaGen gen(rng, o);
  for (int i = 0; i < 1000; ++i) {
    Model m = oracle::random_model(rng, 3, 2, o);
    Formula a = gen(), b = gen();
    for (const Formula& fm : {f::ob(a, b), f::box(a)}) {
      bool first = eval(fm, m, 0);
      for (int w = 1; w < 3; ++w) EXPECT_EQ(eval(fm, m, w), first);
    }
  }
}

// Extension-based evaluator with closed-subformula caching against direct recursion.
TEST(Eval, AgreesWithDirectRecursion) {
  std::mt19937_64 rng(4);
  oracle::GenOptions o;
  o.max_depth = 5;
  o.max_open = 1;
  o.max_maxim = 1;
  oracle::FormulaGen gen(rng, o);
  int pairs = 0;
  for (int i = 0; i < 10000; ++i) {
    int nw = 1 + static_cast<int>(rng() % 3), ns = 1 + static_cast<int>(rng() % 2);
    if (nw == 3 && ns == 2) nw = 2;  // keep maxim quantifiers cheap for the reference evaluator
    Model m = oracle::random_model(rng, nw, ns, o);
    Formula fm = gen();
    Evaluator cached(m, true), plain(m, false);
    for (int w = 0; w < nw; ++w) {
      bool want = oracle::holds(fm, m, w);
      ASSERT_EQ(cached.eval(fm, w), want) << print(fm);
      ASSERT_EQ(plain.eval(fm, w), want) << print(fm);
    }
    ++pairs;
  }
  EXPECT_GE(pairs, 10000);
}

TEST(Frame, EmptyObHasNoViolations) {
  for (int nw = 1; nw <= 4; ++nw) EXPECT_TRUE(check_frame(Model::empty(nw, 1)).empty());
}

TEST(Frame, EmptySetObligatedViolatesC1) {
  Model m = Model::empty(1, 1);
  m.set_obligatory(1, 0);
  auto v = check_frame(m);
  ASSERT_FALSE(v.empty());
  bool c1 = false;
  for (const auto& x : v) c1 = c1 || (x.condition == 1 && x.x == 1 && x.y == 0);
  EXPECT_TRUE(c1);
}

TEST(Frame, ExactlyTwoValidTablesAtOneWorld) {
  int valid = 0;
  for (int code = 0; code < 16; ++code) {
    Model m = Model::empty(1, 1);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        if ((code >> (x * 2 + y)) & 1) m.set_obligatory(static_cast<WorldSet>(x), static_cast<WorldSet>(y));
    if (check_frame(m).empty()) ++valid;
  }
  EXPECT_EQ(valid, 2);
  EXPECT_EQ(oracle::frame_valid_tables(1).size(), 2u);
}

// Per-condition agreement with the quantifier-by-quantifier oracle on every table at
// n_w <= 2, and on random tables at n_w = 3.
TEST(Frame, AgreesWithBruteForce) {
  for (int nw = 1; nw <= 2; ++nw) {
    const int sets = 1 << nw, bits = sets * sets;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
      Model m = Model::empty(nw, 1);
      for (int x = 0; x < sets; ++x) m.ob[static_cast<std::size_t>(x)] = (code >> (x * sets)) & ((1u << sets) - 1);
      for (int c = 1; c <= 5; ++c) {
        bool violated = !check_frame(m, FrameConditions::only({c})).empty();
        ASSERT_EQ(violated, !oracle::condition_holds(m, c)) << "C" << c << " code " << code;
      }
    }
  }
  std::mt19937_64 rng(5);
  oracle::GenOptions o;
  for (int i = 0; i < 2000; ++i) {
    Model m = oracle::random_model(rng, 3, 1, o);
    // sparsify so some tables satisfy some conditions
    for (auto& row : m.ob) row &= rng() & rng();
    for (int c = 1; c <= 5; ++c)
      ASSERT_EQ(check_frame(m, FrameConditions::only({c})).empty(), oracle::condition_holds(m, c));
  }
}

TEST(Frame, ViolationsNameTheirWitnesses) {
  Model m = Model::empty(2, 1);
  m.set_obligatory(3, 1);  // {w1} in ob(W) but not {w1} in ob({w1}): C5
  auto v = check_frame(m, FrameConditions::only({5}));
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].condition, 5);
  EXPECT_NE(describe(m, v[0]).find("C5"), std::string::npos);
}

TEST(ModelJson, RoundTrip) {
  std::mt19937_64 rng(6);
  oracle::GenOptions o;
  for (int i = 0; i < 200; ++i) {
    Model m = oracle::random_model(rng, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2), o);
    nlohmann::json j = to_json(m);
    EXPECT_EQ(model_from_json(j), m);
    EXPECT_EQ(to_json(model_from_json(nlohmann::json::parse(j.dump()))), j);
  }
}
