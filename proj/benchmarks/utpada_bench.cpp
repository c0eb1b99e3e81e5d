#include <benchmark/benchmark.h>

#include "utpada/analyzer.hpp"
#include "utpada/metrics.hpp"
#include "utpada/snippetbank.hpp"
#include "utpada/store.hpp"
#include "utpada/text.hpp"
#include "utpada/tokenizer.hpp"
#include "utpada/valcase.hpp"

namespace {

using namespace utpada;

std::string fixture(const std::string& rel) { return std::string(UTPADA_FIXTURE_DIR) + "/" + rel; }

std::string big_kotlin(int functions) {
  std::string src;
  for (int i = 0; i < functions; ++i) {
    src += "fun f" + std::to_string(i) + "(a: Int): Int {\n  if (a > 0 && a < 9) {\n    for (x in xs) { call(x, \"t {\") }\n"
           "  }\n  return when (a) {\n    1 -> 2\n    else -> 3\n  }\n}\n";
  }
  return src;
}

void BM_Tokenize(benchmark::State& state) {
  const auto src = strip_comments(big_kotlin(static_cast<int>(state.range(0))), LanguageTag::KotlinLike);
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(src, LanguageTag::KotlinLike));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Tokenize)->Arg(10)->Arg(1000);

void BM_AnalyzeStructure(benchmark::State& state) {
  const auto f = SourceFile::from_text("b.kt", LanguageTag::KotlinLike, big_kotlin(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(analyze_structure(f));
}
BENCHMARK(BM_AnalyzeStructure)->Arg(10)->Arg(1000);

void BM_RunValidation(benchmark::State& state) {
  SourceTree tree;
  for (int i = 0; i < state.range(0); ++i) {
    tree.files.push_back(SourceFile::from_text("src/F" + std::to_string(i) + ".kt", LanguageTag::KotlinLike, big_kotlin(5)));
  }
  std::vector<ValidationCase> cases{parse_case_file(fixture("cases/req1289.vcase")),
                                    parse_case_file(fixture("cases/req21890.vcase"))};
  for (auto _ : state) benchmark::DoNotOptimize(run_validation(tree, cases, SnippetFilter{}));
}
BENCHMARK(BM_RunValidation)->Arg(10)->Arg(200);

void BM_Search(benchmark::State& state) {
  SnippetBank bank;
  const char* words[] = {"grid", "width", "resize", "flex", "focus", "aria", "retry", "cache"};
  for (int i = 0; i < state.range(0); ++i) {
    SnippetDraft d;
    d.title = std::string(words[i % 8]) + " " + words[(i / 8) % 8];
    d.language_tag = "css";
    d.keywords = {words[i % 8], words[(i * 3) % 8]};
    d.body = ".c" + std::to_string(i) + " { width: 1px }";
    bank.curate(bank.add(d).snippet_id, true);
  }
  for (auto _ : state) benchmark::DoNotOptimize(bank.search("width resize", 10));
}
BENCHMARK(BM_Search)->Arg(50)->Arg(5000);

void BM_LogReplay(benchmark::State& state) {
  auto db = MetricDb::in_memory();
  std::vector<MetricDb::PendingEvent> events;
  for (int i = 0; i < state.range(0); ++i) {
    ContributionRecord r;
    r.contribution_id = "C" + std::to_string(i);
    r.participant_id = "dev";
    r.task_id = "T";
    r.assigned_at = r.started_at = r.submitted_at = *parse_timestamp("2024-03-04");
    events.push_back({EventType::Contribution, to_json(r), "2024-03-04T00:00:00Z"});
  }
  db.append_all(events);
  const auto bytes = db.serialize();
  for (auto _ : state) benchmark::DoNotOptimize(MetricDb::replay(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_LogReplay)->Arg(100)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
