#include <gtest/gtest.h>

#include "naive_oracles.hpp"
#include "test_support.hpp"
#include "utpada/analyzer.hpp"
#include "utpada/error.hpp"
#include "utpada/report.hpp"
#include "utpada/snippetbank.hpp"
#include "utpada/text.hpp"

using namespace utpada;
using testing_support::fixture;
using testing_support::TempDir;

namespace {

SnippetBank bank_with_fix(bool curate) {
  SnippetBank bank;
  SnippetDraft d;
  d.title = "extActAttributes full width";
  d.language_tag = "css";
  d.keywords = {"resize", "width", "extActAttributes"};
  d.guideline_ids = {"REQ-21890"};
  d.body = testing_support::read_fixture("snippets/c-req-21890.css");
  d.submitted_by_role = ContributorRole::Ux;
  const auto s = bank.add(d, "2024-03-04T09:00:00Z");
  EXPECT_EQ(s.snippet_id, "SNIP-000001");
  if (curate) bank.curate(s.snippet_id, true, "2024-03-04T10:00:00Z");
  return bank;
}

const ValidationFinding* finding_for(const ValidationReport& r, std::string_view case_id, std::string_view path) {
  for (const auto& f : r.findings) {
    if (f.case_id == case_id && f.path == path) return &f;
  }
  return nullptr;
}

}  // namespace

TEST(Analyzer, BeforeTreeIsIncorrectAndRecommendsCuratedFix) {
  const auto tree = load_source_tree(fixture("req21890/before"));
  const auto cases = load_case_set(fixture("cases"));
  const auto bank = bank_with_fix(true);
  ValidationOptions opt;
  opt.timestamp = "2024-03-05T08:00:00Z";
  const auto report = run_validation(tree, cases, bank, opt);

  const auto* css = finding_for(report, "CASE-REQ-21890", "app/profile.css");
  ASSERT_NE(css, nullptr);
  EXPECT_EQ(css->status, FindingStatus::Incorrect);
  ASSERT_TRUE(css->location.has_value());
  EXPECT_EQ(css->location->first, 5u);
  EXPECT_EQ(css->recommended_snippet_ids, (std::vector<std::string>{"SNIP-000001"}));

  const auto counts = report.counts();
  const auto it = std::find_if(counts.begin(), counts.end(), [](const CaseCounts& c) { return c.case_id == "CASE-REQ-21890"; });
  ASSERT_NE(it, counts.end());
  EXPECT_EQ(it->incorrect, 1u);
  EXPECT_EQ(it->correct, 0u);
  EXPECT_EQ(it->missing, 0u);
  EXPECT_EQ(it->not_applicable, 1u);  // the html file
  EXPECT_TRUE(report.has_violations());
  EXPECT_EQ(validation_exit_code(report), 1);
}

TEST(Analyzer, UncuratedFixIsNotRecommended) {
  const auto tree = load_source_tree(fixture("req21890/before"));
  const auto cases = load_case_set(fixture("cases"));
  const auto bank = bank_with_fix(false);
  const auto report = run_validation(tree, cases, bank);
  for (const auto& f : report.findings) EXPECT_TRUE(f.recommended_snippet_ids.empty());
}

TEST(Analyzer, AfterTreeIsCorrect) {
  const auto tree = load_source_tree(fixture("req21890/after"));
  std::vector<ValidationCase> cases{parse_case_file(fixture("cases/req21890.vcase"))};
  const auto report = run_validation(tree, cases, SnippetFilter{});
  const auto counts = report.counts();
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts[0].correct, 1u);
  EXPECT_EQ(counts[0].incorrect, 0u);
  EXPECT_FALSE(report.has_violations());
  EXPECT_EQ(validation_exit_code(report), 0);
}

TEST(Analyzer, FindingsOrderedAndRunIdDeterministic) {
  const auto tree = load_source_tree(fixture("req21890/before"));
  const auto cases = load_case_set(fixture("cases"));
  ValidationOptions opt;
  opt.timestamp = "2024-03-05T08:00:00Z";
  const auto a = run_validation(tree, cases, SnippetFilter{}, opt);
  opt.threads = 4;
  const auto b = run_validation(tree, cases, SnippetFilter{}, opt);
  EXPECT_EQ(a.run_id, b.run_id);
  EXPECT_EQ(a.findings, b.findings);
  EXPECT_EQ(a.diagnostics, b.diagnostics);
  EXPECT_TRUE(std::is_sorted(a.findings.begin(), a.findings.end(), [](const auto& x, const auto& y) {
    return std::tie(x.case_id, x.path) < std::tie(y.case_id, y.path);
  }));
  EXPECT_EQ(a.findings.size(), cases.size() * tree.files.size());
}

TEST(Analyzer, AntiPatternBeatsRequired) {
  const auto c = parse_case(
      "id: X\nguideline: G\napplies: **/*.kt\n"
      "pattern: required\nkind: tokenseq\nmatch: check ( x )\n"
      "pattern: anti\nkind: regex\nmatch: !!\n"
      "remediate: SNIP-000004\n");
  const auto both = SourceFile::from_text("a/A.kt", LanguageTag::KotlinLike, "fun f() {\n  check(x)\n  val y = z!!\n}\n");
  const auto req = SourceFile::from_text("a/B.kt", LanguageTag::KotlinLike, "fun f() {\n  check( x )\n}\n");
  const auto none = SourceFile::from_text("a/C.kt", LanguageTag::KotlinLike, "fun f() {}\n");
  const auto other = SourceFile::from_text("a/D.css", LanguageTag::Css, ".a{}\n");
  auto yes = [](std::string_view) { return true; };

  const auto f1 = evaluate_case(c, both, yes);
  EXPECT_EQ(f1.status, FindingStatus::Incorrect);
  EXPECT_EQ(f1.location, (LineSpan{3, 3}));
  EXPECT_EQ(f1.recommended_snippet_ids, (std::vector<std::string>{"SNIP-000004"}));
  const auto f2 = evaluate_case(c, req, yes);
  EXPECT_EQ(f2.status, FindingStatus::Correct);
  EXPECT_TRUE(f2.recommended_snippet_ids.empty());
  const auto f3 = evaluate_case(c, none, yes);
  EXPECT_EQ(f3.status, FindingStatus::Missing);
  EXPECT_FALSE(f3.location.has_value());
  EXPECT_EQ(f3.recommended_snippet_ids.size(), 1u);
  EXPECT_EQ(evaluate_case(c, other, yes).status, FindingStatus::NotApplicable);
}

TEST(Analyzer, TokenSeqIgnoresWhitespaceAndComments) {
  const auto c = parse_case_file(fixture("cases/req1289.vcase"));
  const auto f = SourceFile::from_text(
      "X.kt", LanguageTag::KotlinLike,
      "fun f() {\n  throw   IllegalStateException( /* why */\n    \"Incorrect Typecast\"\n  )\n}\n");
  const auto spans = match_pattern(c.required_patterns[0], f);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0], (LineSpan{2, 4}));
}

TEST(Analyzer, TokenMatchesAgreeWithNaiveScan) {
  auto rng = testing_support::rng(7);
  const std::vector<std::string> alphabet{"a", "b", "(", ")", "a", ";"};
  for (int round = 0; round < 300; ++round) {
    std::string src;
    std::vector<std::string> hay_text;
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      const auto& t = alphabet[rng() % alphabet.size()];
      src += t;
      src += (rng() % 5 == 0) ? "\n" : " ";
    }
    std::string needle_src;
    const int m = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < m; ++i) needle_src += alphabet[rng() % alphabet.size()] + " ";
    const auto file = SourceFile::from_text("x.kt", LanguageTag::KotlinLike, src);
    for (const auto& t : file.tokens) hay_text.push_back(t.text);
    const auto p = Pattern::token_seq(needle_src);
    const auto got = match_pattern(p, file);
    const auto want = oracle::naive_token_matches(p.tokens(), hay_text);
    ASSERT_EQ(got.size(), want.size()) << src << " / " << needle_src;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].first, file.tokens[want[i].first].line);
      EXPECT_EQ(got[i].last, file.tokens[want[i].second].line);
    }
  }
}

TEST(Analyzer, CssDeclOnNonCssFileIsLanguageMismatch) {
  const auto c = parse_case("id: X\nguideline: G\napplies: **/*\npattern: anti\nkind: cssdecl\nmatch: .a :: width :: present\n");
  const auto html = SourceFile::from_text("p.html", LanguageTag::Html, "<div class=\"a\"></div>\n");
  std::vector<Diagnostic> diags;
  const auto f = evaluate_case(c, html, {}, &diags);
  EXPECT_EQ(f.status, FindingStatus::Missing);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].case_id, "X");
  EXPECT_NE(diags[0].message.find("LanguageMismatch"), std::string::npos);
}

TEST(Analyzer, TreeDiagnosticsForBinaryAndOversizedFiles) {
  TempDir dir;
  dir.write("src/ok.kt", "fun a() {}\n");
  dir.write("src/bin.kt", std::string("fun\0b", 5));
  dir.write("src/big.css", std::string(2048, 'a'));
  dir.write("image.png", "not a source file");
  SourceTreeOptions opt;
  opt.max_file_bytes = 1024;
  const auto tree = load_source_tree(dir.path(), opt);
  ASSERT_EQ(tree.files.size(), 1u);
  EXPECT_EQ(tree.files[0].path, "src/ok.kt");
  ASSERT_EQ(tree.diagnostics.size(), 2u);
  EXPECT_EQ(tree.diagnostics[0].path, "src/big.css");
  EXPECT_EQ(tree.diagnostics[1].path, "src/bin.kt");
}

TEST(Analyzer, EmptyTreeAndEmptyCaseSet) {
  TempDir dir;
  dir.write("logo.png", "x");
  EXPECT_THROW(
      {
        try {
          load_source_tree(dir.path());
        } catch (const Error& e) {
          EXPECT_EQ(e.kind(), ErrorKind::EmptyTree);
          throw;
        }
      },
      Error);
  const auto tree = load_source_tree(fixture("req21890/after"));
  try {
    run_validation(tree, {}, SnippetFilter{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCaseSet);
  }
}

TEST(Analyzer, ReportJsonCarriesCounts) {
  const auto tree = load_source_tree(fixture("req21890/before"));
  std::vector<ValidationCase> cases{parse_case_file(fixture("cases/req21890.vcase"))};
  const auto report = run_validation(tree, cases, SnippetFilter{});
  const auto j = to_json(report);
  EXPECT_EQ(j["run_id"], report.run_id);
  ASSERT_TRUE(j.contains("findings"));
  const auto text = render_text(report);
  EXPECT_NE(text.find("Incorrect"), std::string::npos);
}

TEST(Analyzer, PaperStylesheetMatchesOnlyTheDefect) {
  const auto f = SourceFile::from_text(
      "p.css", LanguageTag::Css, ".extActAttributes { display: inline-block; overflow: hidden; width: 70%; }\n");
  EXPECT_EQ(match_pattern(Pattern::css_decl(".extActAttributes :: width :: =70%"), f).size(), 1u);
  EXPECT_TRUE(match_pattern(Pattern::css_decl(".extActAttributes :: width :: =100%"), f).empty());
  EXPECT_TRUE(match_pattern(Pattern::token_seq("nothing here at all"), f).empty());
}

TEST(Analyzer, CaseMatchingNoFilesIsAllNotApplicable) {
  const auto tree = load_source_tree(fixture("req21890/before"));
  const std::vector<ValidationCase> cases{parse_case_file(fixture("cases/req1289.vcase"))};
  const auto report = run_validation(tree, cases, SnippetFilter{});
  const auto counts = report.counts();
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts[0].correct + counts[0].incorrect + counts[0].missing, 0u);
  EXPECT_EQ(counts[0].not_applicable, tree.files.size());
  EXPECT_FALSE(report.has_violations());
}
