#include <gtest/gtest.h>

#include "test_support.hpp"
#include "utpada/css.hpp"
#include "utpada/error.hpp"
#include "utpada/valcase.hpp"

using namespace utpada;
using testing_support::TempDir;

TEST(Css, ParsesRuleBlocksWithLines) {
  const auto rules = css::parse_stylesheet(".a { width: 70%; }\n\n.b,\n.c {\n  Display: Block !important;\n}\n");
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].selector, ".a");
  EXPECT_EQ(rules[0].first_line, 1u);
  ASSERT_NE(rules[0].find("width"), nullptr);
  EXPECT_EQ(rules[0].find("width")->value, "70%");
  EXPECT_EQ(rules[1].selector, ".b, .c");
  EXPECT_EQ(rules[1].first_line, 3u);
  EXPECT_EQ(rules[1].last_line, 6u);
  EXPECT_EQ(css::normalize_value(rules[1].find("display")->value), "block");
}

TEST(Css, LastDeclarationWins) {
  const auto rules = css::parse_stylesheet(".a { width: 70%; width: 100% }");
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].find("width")->value, "100%");
}

TEST(Css, FlattensMediaBlocks) {
  const auto rules = css::parse_stylesheet("@media (max-width: 600px) { .a { width: 100%; } }\n.b { color: red }");
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].selector, ".a");
  EXPECT_EQ(rules[1].selector, ".b");
}

TEST(Css, SelectorMatchesCommaParts) {
  EXPECT_TRUE(css::selector_matches(".b, .c", ".c"));
  EXPECT_TRUE(css::selector_matches(".a", ".a"));
  EXPECT_FALSE(css::selector_matches(".ab", ".a"));
}

namespace {

const char* kReq21890 = R"(id: CASE-REQ-21890
guideline: REQ-21890
desc: resize
applies: **/*.css

pattern: anti
kind: cssdecl
match: .extActAttributes :: width :: =70%

pattern: required
kind: cssdecl
match: .extActAttributes :: width :: =100%

remediate: SNIP-000001
)";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no utpada::Error thrown";
  return ErrorKind::IoError;
}

}  // namespace

TEST(Valcase, ParsesPaperCase) {
  const auto c = parse_case(kReq21890);
  EXPECT_EQ(c.case_id, "CASE-REQ-21890");
  EXPECT_EQ(c.guideline_id, "REQ-21890");
  ASSERT_EQ(c.anti_patterns.size(), 1u);
  ASSERT_EQ(c.required_patterns.size(), 1u);
  const auto& anti = c.anti_patterns[0].css();
  EXPECT_EQ(anti.selector, ".extActAttributes");
  EXPECT_EQ(anti.property, "width");
  EXPECT_EQ(anti.predicate, CssPredicateKind::Equals);
  EXPECT_EQ(anti.value, "70%");
  EXPECT_EQ(c.remediation_snippet_ids, (std::vector<std::string>{"SNIP-000001"}));
  EXPECT_TRUE(c.applies("app/profile.css"));
  EXPECT_FALSE(c.applies("app/profile.html"));
}

TEST(Valcase, TokenSeqPatternHasSixTokens) {
  const auto c = parse_case_file(testing_support::fixture("cases/req1289.vcase"));
  ASSERT_EQ(c.required_patterns.size(), 1u);
  EXPECT_EQ(c.required_patterns[0].kind(), PatternKind::TokenSeq);
  EXPECT_EQ(c.required_patterns[0].tokens().size(), 6u);
}

TEST(Valcase, SerializeRoundTrips) {
  const auto c = parse_case(kReq21890);
  EXPECT_EQ(parse_case(serialize_case(c)), c);
}

TEST(Valcase, PatternOrderIsPreserved) {
  const auto c = parse_case(
      "id: X\nguideline: G\napplies: *.kt\n"
      "pattern: required\nkind: regex\nmatch: ^b$\n"
      "pattern: required\nkind: regex\nmatch: ^a$\n");
  ASSERT_EQ(c.required_patterns.size(), 2u);
  EXPECT_EQ(c.required_patterns[0].payload(), "^b$");
  EXPECT_EQ(c.required_patterns[1].payload(), "^a$");
}

TEST(Valcase, MalformedCasesNameLineAndField) {
  EXPECT_EQ(kind_of([] { parse_case("id: X\nguideline: G\napplies: *.css\n"); }), ErrorKind::MalformedCase);
  EXPECT_EQ(kind_of([] { parse_case("guideline: G\napplies: *.css\npattern: anti\nkind: regex\nmatch: x\n"); }),
            ErrorKind::MalformedCase);
  try {
    parse_case("id: X\nguideline: G\napplies: *.css\npattern: anti\nkind: regex\nmatch: ([\n", "bad.vcase");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedCase);
    EXPECT_NE(std::string(e.what()).find("bad.vcase:6: match:"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([] { parse_case("id: X\nguideline: G\napplies: /abs\npattern: anti\nkind: regex\nmatch: x\n"); }),
            ErrorKind::MalformedCase);
  EXPECT_EQ(kind_of([] {
              parse_case("id: X\nguideline: G\napplies: *.css\npattern: anti\nkind: regex\nmatch: x\nremediate: nope\n");
            }),
            ErrorKind::MalformedCase);
  EXPECT_EQ(kind_of([] { parse_case("id: X\nguideline: G\napplies: *.css\npattern: anti\nkind: cssdecl\nmatch: .a :: :: present\n"); }),
            ErrorKind::MalformedCase);
}

TEST(Valcase, LoadCaseSetSortsFailsFastAndRejectsDuplicates) {
  TempDir dir;
  auto body = [](const std::string& id) {
    return "id: " + id + "\nguideline: G\napplies: **/*.kt\npattern: required\nkind: regex\nmatch: x\n";
  };
  dir.write("c.vcase", body("C"));
  dir.write("a.vcase", body("B"));
  dir.write("b.vcase", body("A"));
  dir.write("notes.txt", "ignored");
  const auto set = load_case_set(dir.path());
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set[0].case_id, "A");
  EXPECT_EQ(set[2].case_id, "C");

  dir.write("d.vcase", "id: D\n");
  try {
    load_case_set(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedCase);
    EXPECT_NE(std::string(e.what()).find("d.vcase"), std::string::npos);
  }
  std::filesystem::remove(dir / "d.vcase");
  dir.write("e.vcase", body("A"));
  EXPECT_EQ(kind_of([&] { load_case_set(dir.path()); }), ErrorKind::DuplicateCaseId);
}

TEST(Valcase, EmptyDirectoryIsEmptyCaseSet) {
  TempDir dir;
  EXPECT_EQ(kind_of([&] { load_case_set(dir.path()); }), ErrorKind::EmptyCaseSet);
}

TEST(Valcase, InsertCaseRejectsDuplicateId) {
  std::vector<ValidationCase> set;
  insert_case(set, parse_case(kReq21890));
  EXPECT_EQ(kind_of([&] { insert_case(set, parse_case(kReq21890)); }), ErrorKind::DuplicateCaseId);
}
