#include <sstream>

#include <gtest/gtest.h>

#include "ddlkant/harness.hpp"
#include "oracles.hpp"

using namespace ddlkant;

namespace {

const TestReport& default_report() {
  static const TestReport r = run_suite();
  return r;
}

int count_lines(const std::string& s, const std::string& prefix) {
  std::istringstream in(s);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST(Suite, EightTestsThreeSystems) {
  const auto& r = default_report();
  EXPECT_EQ(r.tests.size(), 8u);
  EXPECT_EQ(r.systems, (std::vector<std::string>{"naive", "kroy", "custom"}));
  EXPECT_EQ(faithfulness_tests().size(), 8u);
}

TEST(Suite, MatrixMatchesExpected) {
  const auto& r = default_report();
  EXPECT_TRUE(matches_expected(r)) << render_witnesses(r);
  EXPECT_EQ(r.passes("naive"), 0);
  EXPECT_EQ(r.passes("kroy"), 2);
  EXPECT_EQ(r.passes("custom"), 8);
  for (const auto& t : r.tests)
    for (const auto& s : r.systems) EXPECT_NE(r.at(t, s).result, CellResult::Error) << t << "/" << s;
}

// Every test a weaker system passes is also passed by the stronger ones.
TEST(Suite, PassesAreMonotone) {
  const auto& r = default_report();
  for (const auto& t : r.tests) {
    if (r.at(t, "naive").result == CellResult::Pass) EXPECT_EQ(r.at(t, "kroy").result, CellResult::Pass) << t;
    if (r.at(t, "kroy").result == CellResult::Pass) EXPECT_EQ(r.at(t, "custom").result, CellResult::Pass) << t;
  }
}

TEST(Suite, NoWarningsAtDefaultBounds) { EXPECT_TRUE(default_report().warnings.empty()); }

TEST(Suite, OneSubjectWarns) {
  SuiteOptions o;
  o.n_subjects = 1;
  TestReport r = run_suite(o);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("subject"), std::string::npos);
}

// The independence witness is a frame-valid model where the named custom axiom fails.
TEST(Suite, IndependenceWitnessIsBaseDdlCountermodel) {
  const Cell& c = default_report().at("T1", "custom");
  ASSERT_EQ(c.result, CellResult::Pass);
  EXPECT_EQ(c.witness.rfind("custom-ful:", 0), 0u) << c.witness;
  Model m = model_from_json(c.model);
  EXPECT_TRUE(oracle::frame_ok(m));
  EXPECT_FALSE(oracle::valid_in(custom_ful(), m));
}

TEST(Suite, WithoutUniversalizationCustomFailsT2) {
  SuiteOptions o;
  o.kant.universalization_background = false;
  TestReport r = run_suite(o);
  EXPECT_EQ(r.at("T2", "custom").result, CellResult::Fail);
  EXPECT_FALSE(matches_expected(r));
  EXPECT_FALSE(r.at("T2", "custom").model.is_null());
}

TEST(Report, JsonRoundTrip) {
  const auto& r = default_report();
  auto j = to_json(r);
  EXPECT_FALSE(j.contains("runtime_ms"));
  EXPECT_TRUE(to_json(r, true).contains("runtime_ms"));
  TestReport back = report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_TRUE(same_matrix(back, r));
  EXPECT_EQ(back.cells, r.cells);
  EXPECT_EQ(to_json(back), j);
}

TEST(Report, JsonMatrixAndCellsMustAgree) {
  auto j = to_json(default_report());
  j["matrix"]["T1"]["naive"] = "pass";
  EXPECT_THROW(report_from_json(j), Error);
}

TEST(Report, Deterministic) {
  EXPECT_EQ(to_json(run_suite()).dump(), to_json(default_report()).dump());
}

TEST(Render, TextTable) {
  std::string text = render_table(default_report(), "text");
  EXPECT_EQ(count_lines(text, "T"), 8);
  for (const char* title : {"Naive", "Kroy", "Custom"}) EXPECT_NE(text.find(title), std::string::npos);
  EXPECT_NE(text.find("[8/8]"), std::string::npos);
  EXPECT_EQ(text.find("runtime"), std::string::npos);
}

TEST(Render, MarkdownGrid) {
  std::string md = render_table(default_report(), "markdown");
  EXPECT_EQ(md.rfind("| Test | Naive | Kroy | Custom |", 0), 0u) << md;
  EXPECT_EQ(count_lines(md, "| T"), 9);  // header plus eight rows
  EXPECT_NE(md.find("|---|---|---|---|"), std::string::npos);
}

TEST(Render, Witnesses) {
  std::string w = render_witnesses(default_report());
  EXPECT_EQ(count_lines(w, "T"), 24);
}

TEST(CellNames, RoundTrip) {
  for (CellResult c : {CellResult::Pass, CellResult::Fail, CellResult::Error})
    EXPECT_EQ(cell_from_name(cell_name(c)), c);
  EXPECT_THROW(cell_from_name("maybe"), Error);
}
