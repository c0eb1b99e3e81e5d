#include "utpada/cli.hpp"

#include <cstdlib>
#include <functional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "utpada/analyzer.hpp"
#include "utpada/error.hpp"
#include "utpada/metrics.hpp"
#include "utpada/report.hpp"
#include "utpada/rsi.hpp"
#include "utpada/snippetbank.hpp"
#include "utpada/store.hpp"
#include "utpada/text.hpp"
#include "utpada/valcase.hpp"

namespace utpada::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Raised for Metric DB failures, which map to their own exit code.
struct StoreFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
auto store_op(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string msg = e.what();
    if (!e.subject().empty()) msg += " [" + e.subject() + "]";
    throw StoreFailure(msg);
  }
}

struct Globals {
  std::string db;
  std::string format = "json";
};

struct Context {
  Globals globals;
  std::ostream& out;
  std::ostream& err;

  bool text() const { return globals.format == "text"; }

  // Explicit location from --db or UTPADA_DB, if any.
  std::optional<fs::path> explicit_db() const {
    if (!globals.db.empty()) return fs::path(globals.db);
    if (const char* env = std::getenv("UTPADA_DB"); env && *env) return fs::path(env);
    return std::nullopt;
  }
  fs::path db_path() const { return explicit_db().value_or(fs::path("utpada.db")); }

  MetricDb open_db(OpenMode mode) const {
    return store_op([&] { return MetricDb::open(db_path(), mode); });
  }

  void emit(const json& j, const std::string& as_text) const {
    if (text()) {
      out << as_text;
    } else {
      out << j.dump(2) << "\n";
    }
  }
};

std::optional<Date> date_option(const std::string& value, const char* flag) {
  if (value.empty()) return std::nullopt;
  auto d = parse_date(value);
  if (!d) throw Usage(std::string(flag) + ": expected YYYY-MM-DD, got '" + value + "'");
  return d;
}

SnippetResolver bank_resolver(const std::optional<SnippetBank>& bank) {
  if (!bank) return {};
  return [&bank](std::string_view id) { return bank->contains(id); };
}

json snippet_json(const Snippet& s, bool with_body) {
  json j{{"snippet_id", s.snippet_id},
         {"title", s.title},
         {"language", s.language_tag},
         {"keywords", s.keywords},
         {"guidelines", s.guideline_ids},
         {"status", to_string(s.status)},
         {"role", to_string(s.submitted_by_role)},
         {"created_at", s.created_at}};
  if (with_body) j["body"] = s.body;
  return j;
}

json spans_json(const std::vector<LineSpan>& spans) {
  json a = json::array();
  for (const auto& s : spans) a.push_back({{"first_line", s.first}, {"last_line", s.last}});
  return a;
}

json rsi_json(const std::string& contribution_id, const RsiScore& s) {
  return json{{"contribution_id", contribution_id},
              {"review_points", s.review_points.to_double()},
              {"productivity_points", s.productivity_points.to_double()},
              {"total_100", s.total_100.to_double()},
              {"value_10", s.value_10.to_double()},
              {"rsi", s.rounded().to_decimal(1, 1)},
              {"pass", s.pass}};
}

// ---------------------------------------------------------------------------
// Subcommand handlers.
// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string source, cases, bank, out, org = "default";
  unsigned threads = 1;
};

int cmd_validate(const Context& ctx, const ValidateArgs& a) {
  const auto cases = load_case_set(a.cases);
  const auto bank = SnippetBank::open(a.bank);
  const auto tree = load_source_tree(a.source);
  ValidationOptions opts;
  opts.threads = std::max(1u, a.threads);
  const auto report = run_validation(tree, cases, bank, opts);

  const std::string body = ctx.text() ? render_text(report) : to_json(report).dump(2) + "\n";
  if (a.out.empty()) {
    ctx.out << body;
  } else {
    text::write_file_atomic(a.out, body);
  }
  if (ctx.explicit_db()) {
    auto db = ctx.open_db(OpenMode::ReadWrite);
    store_op([&] { return db.append(EventType::ValidationSummary, validation_summary_event(report, a.org)); });
  }
  return validation_exit_code(report);
}

struct SnippetAddArgs {
  std::string bank, title, language, keywords, guidelines, role = "developer", body;
};

void record_curation(const Context& ctx, const std::string& id, std::string_view action) {
  if (!ctx.explicit_db()) return;
  auto db = ctx.open_db(OpenMode::ReadWrite);
  store_op([&] { return db.append(EventType::Curation, curation_event(id, action)); });
}

int cmd_snippet_add(const Context& ctx, const SnippetAddArgs& a) {
  auto bank = SnippetBank::open(a.bank);
  SnippetDraft d;
  d.title = a.title;
  d.language_tag = a.language;
  d.keywords = text::split_list(a.keywords);
  d.guideline_ids = text::split_list(a.guidelines);
  auto role = parse_contributor_role(a.role);
  if (!role) throw Usage("--role: expected developer, ux, qa or reviewer");
  d.submitted_by_role = *role;
  d.body = text::read_file(a.body);
  const auto s = bank.add(d);
  record_curation(ctx, s.snippet_id, "added");
  ctx.emit(snippet_json(s, false), s.snippet_id + "\n");
  return kExitOk;
}

int cmd_snippet_curate(const Context& ctx, const std::string& bank_dir, const std::string& id, bool approve) {
  auto bank = SnippetBank::open(bank_dir);
  const auto s = bank.curate(id, approve);
  record_curation(ctx, id, approve ? "approved" : "rejected");
  json j = snippet_json(s, false);
  j["decision"] = approve ? "approved" : "rejected";
  ctx.emit(j, id + " " + (approve ? "approved" : "rejected (archived)") + "\n");
  return kExitOk;
}

int cmd_snippet_search(const Context& ctx, const std::string& bank_dir, const std::string& query, std::size_t limit) {
  const auto bank = SnippetBank::open(bank_dir);
  const auto hits = bank.search(query, limit);
  json arr = json::array();
  std::string txt;
  for (const auto& h : hits) {
    const auto s = bank.lookup(h.snippet_id);
    arr.push_back({{"snippet_id", h.snippet_id},
                   {"score", h.score.to_double()},
                   {"matched_keywords", h.matched_keywords},
                   {"title", s.title}});
    txt += h.snippet_id + "\t" + h.score.to_decimal(2) + "\t" + s.title + "\n";
  }
  ctx.emit(json{{"query", query}, {"hits", arr}}, txt.empty() ? "no matches\n" : txt);
  return kExitOk;
}

int cmd_snippet_show(const Context& ctx, const std::string& bank_dir, const std::string& id) {
  const auto bank = SnippetBank::open(bank_dir);
  const auto s = bank.lookup(id);
  ctx.emit(snippet_json(s, true), serialize_snippet(s));
  return kExitOk;
}

int cmd_ingest_checkins(const Context& ctx, const std::string& tsv) {
  auto parsed = parse_checkins(text::read_file(tsv));
  auto db = ctx.open_db(OpenMode::ReadWrite);
  std::vector<MetricDb::PendingEvent> events;
  std::set<std::string> seen;
  for (const auto& r : parsed.records) {
    if (db.contributions().count(r.contribution_id) || !seen.insert(r.contribution_id).second) {
      parsed.diagnostics.push_back(r.contribution_id + ": already recorded, skipped");
      continue;
    }
    events.push_back({EventType::Contribution, to_json(r), {}});
  }
  const auto imported = events.size();
  store_op([&] { return db.append_all(std::move(events)); });

  std::string txt = "imported " + std::to_string(imported) + " contribution(s)\n";
  for (const auto& d : parsed.diagnostics) txt += "skipped: " + d + "\n";
  ctx.emit(json{{"imported", imported}, {"skipped", parsed.diagnostics}}, txt);
  return kExitOk;
}

struct ReviewArgs {
  std::string scorecard, benchmarks, source, sprint_start;
};

int cmd_review_score(const Context& ctx, const ReviewArgs& a) {
  auto card = load_scorecard(a.scorecard);
  auto db = ctx.open_db(OpenMode::ReadWrite);
  if (!db.contributions().count(card.contribution_id)) {
    throw StoreFailure("DanglingReference: scorecard refers to unknown contribution [" + card.contribution_id + "]");
  }
  json evidence = nullptr;
  if (!card.productivity_points) {
    if (a.benchmarks.empty()) {
      throw Error(ErrorKind::MissingBenchmarks, "productivity_points = auto needs --benchmarks <file>");
    }
    const auto bench = load_benchmarks(a.benchmarks);
    std::optional<CodeQualityMetrics> quality;
    if (!a.source.empty()) quality = code_quality(load_source_tree(a.source));
    const auto in = productivity_inputs(db, card.contribution_id, quality ? &*quality : nullptr,
                                        date_option(a.sprint_start, "--sprint-start"));
    card.productivity_points = productivity_points(in, bench);
    auto opt = [](const std::optional<Rational>& r) { return r ? json(r->to_double()) : json(nullptr); };
    evidence = {{"deliverable_throughput", opt(in.deliverable_throughput)},
                {"lines_changed", opt(in.lines_changed)},
                {"nested_block_depth", opt(in.nested_block_depth)},
                {"wacc", opt(in.wacc)},
                {"lead_time_days", opt(in.lead_time_days)}};
  }
  const auto score = compute_rsi(card);
  std::vector<MetricDb::PendingEvent> events;
  events.push_back({EventType::Scorecard, to_json(card), {}});
  events.push_back({EventType::Rsi, rsi_event(card.contribution_id, score), {}});
  store_op([&] { return db.append_all(std::move(events)); });

  json j = rsi_json(card.contribution_id, score);
  if (!evidence.is_null()) j["productivity_evidence"] = evidence;
  ctx.emit(j, card.contribution_id + ": RSI " + score.rounded().to_decimal(1, 1) + " (" +
                  (score.pass ? "pass" : "fail") + "), review " + score.review_points.to_decimal(2) +
                  " + productivity " + score.productivity_points.to_decimal(2) + "\n");
  return kExitOk;
}

int cmd_report_cohort(const Context& ctx, const std::string& bank_dir) {
  std::optional<SnippetBank> bank;
  if (!bank_dir.empty()) bank = SnippetBank::open(bank_dir);
  const auto db = ctx.open_db(OpenMode::ReadOnly);
  const auto report = cohort_report(db, bank_resolver(bank));
  ctx.emit(to_json(report), render_text(report));
  return kExitOk;
}

int cmd_report_participant(const Context& ctx, const std::string& id, const std::string& bank_dir,
                           const std::string& sprint_start) {
  std::optional<SnippetBank> bank;
  if (!bank_dir.empty()) bank = SnippetBank::open(bank_dir);
  const auto db = ctx.open_db(OpenMode::ReadOnly);
  const auto report = participant_report(db, id, bank_resolver(bank), date_option(sprint_start, "--sprint-start"));
  ctx.emit(to_json(report), render_text(report));
  return kExitOk;
}

int cmd_metrics(const Context& ctx, const std::string& source, const std::string& checkins,
                const std::string& sprint_start) {
  json j = json::object();
  std::string txt;
  if (!source.empty()) {
    const auto tree = load_source_tree(source);
    const auto q = code_quality(tree);
    json files = json::array();
    txt += "file\tloc\tdepth\tclasses\tdead\n";
    for (const auto& f : q.files) {
      json fj{{"path", f.path}, {"loc", f.loc}};
      if (!f.structure) {
        fj["note"] = f.note;
        files.push_back(fj);
        continue;
      }
      const auto& s = *f.structure;
      json fns = json::array();
      for (const auto& fn : s.functions) {
        fns.push_back({{"name", fn.name},
                       {"class", fn.class_name},
                       {"first_line", fn.span.first},
                       {"last_line", fn.span.last},
                       {"nested_block_depth", fn.max_depth},
                       {"complexity", fn.complexity}});
      }
      json classes = json::array();
      for (const auto& c : s.classes) {
        classes.push_back({{"name", c.name}, {"methods", c.methods}, {"wmc", c.wmc}, {"loc", c.loc}});
      }
      fj["nested_block_depth"] = s.max_depth;
      fj["functions"] = fns;
      fj["classes"] = classes;
      fj["dead_code"] = spans_json(s.dead_code);
      files.push_back(fj);
      txt += f.path + "\t" + std::to_string(f.loc) + "\t" + std::to_string(s.max_depth) + "\t" +
             std::to_string(s.classes.size()) + "\t" + std::to_string(s.dead_code.size()) + "\n";
    }
    j["files"] = files;
    j["max_nested_block_depth"] = q.max_nested_block_depth;
    j["wacc"] = q.wacc ? json(q.wacc->to_double()) : json(nullptr);
    j["diagnostics"] = json::array();
    for (const auto& d : tree.diagnostics) j["diagnostics"].push_back({{"path", d.path}, {"message", d.message}});
    txt += "max nested block depth " + std::to_string(q.max_nested_block_depth) + ", WACC " +
           (q.wacc ? q.wacc->to_decimal(2) : std::string("n/a")) + "\n";
  }
  if (!checkins.empty()) {
    const auto parsed = parse_checkins(text::read_file(checkins));
    std::map<std::string, std::vector<ContributionRecord>> by_participant;
    for (const auto& r : parsed.records) by_participant[r.participant_id].push_back(r);
    json agile = json::array();
    const auto fixed_start = date_option(sprint_start, "--sprint-start");
    for (const auto& [pid, records] : by_participant) {
      Date start = Date::max();
      for (const auto& r : records) start = std::min(start, r.assigned_at.date());
      const auto m = agile_metrics(records, fixed_start.value_or(start));
      json sprints = json::array();
      txt += "\n" + pid + "\nsprint\tfrom\tto\tDT\tvelocity\tLC\tlead\tcycle\n";
      auto opt = [](const std::optional<Rational>& r) { return r ? json(r->to_double()) : json(nullptr); };
      auto opt_txt = [](const std::optional<Rational>& r) { return r ? r->to_decimal(2) : std::string("-"); };
      for (const auto& s : m.sprints) {
        sprints.push_back({{"sprint", s.sprint},
                           {"first_day", format_date(s.first_day)},
                           {"last_day", format_date(s.last_day)},
                           {"deliverable_throughput", s.deliverable_throughput},
                           {"velocity", s.velocity},
                           {"lines_changed", s.lines_changed},
                           {"lead_time_days", opt(s.lead_time_days)},
                           {"cycle_time_days", opt(s.cycle_time_days)}});
        txt += std::to_string(s.sprint) + "\t" + format_date(s.first_day) + "\t" + format_date(s.last_day) + "\t" +
               std::to_string(s.deliverable_throughput) + "\t" + std::to_string(s.velocity) + "\t" +
               std::to_string(s.lines_changed) + "\t" + opt_txt(s.lead_time_days) + "\t" +
               opt_txt(s.cycle_time_days) + "\n";
      }
      agile.push_back({{"participant_id", pid}, {"sprints", sprints}, {"diagnostics", m.diagnostics}});
    }
    j["agile"] = agile;
    j["skipped_rows"] = parsed.diagnostics;
  }
  ctx.emit(j, txt);
  return kExitOk;
}

int cmd_db_mask(const Context& ctx, const std::string& salt, const std::string& out_path) {
  const auto db = ctx.open_db(OpenMode::ReadOnly);
  const auto masked = store_op([&] { return mask_identities(db, salt); });
  store_op([&] {
    masked.write_copy(out_path);
    return 0;
  });
  ctx.emit(json{{"events", masked.events().size()}, {"out", out_path}},
           "wrote " + std::to_string(masked.events().size()) + " masked event(s) to " + out_path + "\n");
  return kExitOk;
}

int cmd_db_verify(const Context& ctx) {
  const auto db = ctx.open_db(OpenMode::ReadOnly);
  std::map<std::string, std::size_t> by_type;
  for (const auto& e : db.events()) ++by_type[std::string(to_string(e.type))];
  json j{{"path", ctx.db_path().string()},
         {"events", db.events().size()},
         {"last_sequence", db.last_sequence()},
         {"torn_tail_bytes", db.dropped_tail_bytes()},
         {"by_type", by_type}};
  std::string txt = std::to_string(db.events().size()) + " event(s), last seq " +
                    std::to_string(db.last_sequence()) + ", torn tail " +
                    std::to_string(db.dropped_tail_bytes()) + " byte(s)\n";
  ctx.emit(j, txt);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::StoreCorrupt:
    case ErrorKind::StoreLocked:
    case ErrorKind::DanglingReference: return kExitStore;
    default: return kExitExecution;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"utpada: validation cases, snippet bank, productivity metrics and RSI scoring", "utpada"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--db", g.db, "Metric DB log (default: $UTPADA_DB, else ./utpada.db)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  std::function<int(const Context&)> action;

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Run validation cases over a source tree");
  validate->add_option("--source", va.source, "Source tree root")->required();
  validate->add_option("--cases", va.cases, "Directory of .vcase files")->required();
  validate->add_option("--bank", va.bank, "Snippet bank directory")->required();
  validate->add_option("--out", va.out, "Write the report here instead of stdout");
  validate->add_option("--org", va.org, "Organization label for the Metric DB trend rows");
  validate->add_option("--threads", va.threads, "Worker threads");
  validate->callback([&] { action = [&](const Context& c) { return cmd_validate(c, va); }; });

  auto* snippet = app.add_subcommand("snippet", "Manage the code snippet bank");
  snippet->require_subcommand(1);
  std::string bank_dir;
  snippet->add_option("--bank", bank_dir, "Snippet bank directory")->required();

  SnippetAddArgs sa;
  auto* s_add = snippet->add_subcommand("add", "Submit a candidate snippet");
  s_add->add_option("--title", sa.title)->required();
  s_add->add_option("--language", sa.language, "Language tag")->required();
  s_add->add_option("--keywords", sa.keywords, "Comma-separated keywords")->required();
  s_add->add_option("--guidelines", sa.guidelines, "Comma-separated guideline ids");
  s_add->add_option("--role", sa.role, "developer | ux | qa | reviewer");
  s_add->add_option("--body", sa.body, "File holding the snippet body")->required();
  s_add->callback([&] {
    action = [&](const Context& c) {
      sa.bank = bank_dir;
      return cmd_snippet_add(c, sa);
    };
  });

  std::string snippet_id;
  bool approve = false, reject = false;
  auto* s_curate = snippet->add_subcommand("curate", "Approve or reject a candidate");
  s_curate->add_option("id", snippet_id, "Snippet id")->required();
  auto* approve_flag = s_curate->add_flag("--approve", approve);
  auto* reject_flag = s_curate->add_flag("--reject", reject);
  approve_flag->excludes(reject_flag);
  s_curate->callback([&] {
    if (approve == reject) throw CLI::ValidationError("curate", "one of --approve or --reject is required");
    action = [&](const Context& c) { return cmd_snippet_curate(c, bank_dir, snippet_id, approve); };
  });

  std::string query;
  std::size_t limit = 10;
  auto* s_search = snippet->add_subcommand("search", "Keyword search over curated snippets");
  s_search->add_option("query", query, "Query text")->required();
  s_search->add_option("--limit", limit, "Maximum hits");
  s_search->callback([&] { action = [&](const Context& c) { return cmd_snippet_search(c, bank_dir, query, limit); }; });

  auto* s_show = snippet->add_subcommand("show", "Print one snippet");
  s_show->add_option("id", snippet_id, "Snippet id")->required();
  s_show->callback([&] { action = [&](const Context& c) { return cmd_snippet_show(c, bank_dir, snippet_id); }; });

  auto* ingest = app.add_subcommand("ingest", "Import contribution records");
  ingest->require_subcommand(1);
  std::string tsv;
  auto* checkins = ingest->add_subcommand("checkins", "Import a tab-separated check-in export");
  checkins->add_option("tsv", tsv, "Export file")->required();
  checkins->callback([&] { action = [&](const Context& c) { return cmd_ingest_checkins(c, tsv); }; });

  auto* review = app.add_subcommand("review", "Code review scoring");
  review->require_subcommand(1);
  ReviewArgs ra;
  auto* score = review->add_subcommand("score", "Score a contribution and record its RSI");
  score->add_option("--scorecard", ra.scorecard, "Scorecard file")->required();
  score->add_option("--benchmarks", ra.benchmarks, "Productivity targets (for productivity_points = auto)");
  score->add_option("--source", ra.source, "Source tree for depth and WACC evidence");
  score->add_option("--sprint-start", ra.sprint_start, "First sprint date (YYYY-MM-DD)");
  score->callback([&] { action = [&](const Context& c) { return cmd_review_score(c, ra); }; });

  auto* report = app.add_subcommand("report", "Cohort and participant reports");
  report->require_subcommand(1);
  std::string report_bank, participant, report_sprint_start;
  report->add_option("--bank", report_bank, "Snippet bank used to resolve snippet ids");
  auto* cohort = report->add_subcommand("cohort", "Cohort totals, rates and trends");
  cohort->callback([&] { action = [&](const Context& c) { return cmd_report_cohort(c, report_bank); }; });
  auto* part = report->add_subcommand("participant", "One participant's summary and sprint series");
  part->add_option("id", participant, "Participant id")->required();
  part->add_option("--sprint-start", report_sprint_start, "First sprint date (YYYY-MM-DD)");
  part->callback([&] {
    action = [&](const Context& c) { return cmd_report_participant(c, participant, report_bank, report_sprint_start); };
  });

  std::string m_source, m_checkins, m_sprint_start;
  auto* metrics = app.add_subcommand("metrics", "Code quality and agile metrics");
  metrics->add_option("--source", m_source, "Source tree root");
  metrics->add_option("--checkins", m_checkins, "Check-in export for agile metrics");
  metrics->add_option("--sprint-start", m_sprint_start, "First sprint date (YYYY-MM-DD)");
  metrics->callback([&] {
    if (m_source.empty() && m_checkins.empty()) {
      throw CLI::ValidationError("metrics", "give --source and/or --checkins");
    }
    action = [&](const Context& c) { return cmd_metrics(c, m_source, m_checkins, m_sprint_start); };
  });

  auto* dbcmd = app.add_subcommand("db", "Metric DB maintenance");
  dbcmd->require_subcommand(1);
  std::string salt, mask_out;
  auto* mask = dbcmd->add_subcommand("mask", "Write a copy with participant and reviewer ids re-keyed");
  mask->add_option("--salt", salt, "Secret salt for the re-keying hash")->required();
  mask->add_option("--out", mask_out, "New log file")->required();
  mask->callback([&] { action = [&](const Context& c) { return cmd_db_mask(c, salt, mask_out); }; });
  auto* verify = dbcmd->add_subcommand("verify", "Check record checksums and summarize the log");
  verify->callback([&] { action = [&](const Context& c) { return cmd_db_verify(c); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "utpada: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const Context ctx{g, out, err};
  try {
    return action(ctx);
  } catch (const Usage& e) {
    err << "utpada: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StoreFailure& e) {
    err << "utpada: store error: " << e.what() << "\n";
    return kExitStore;
  } catch (const Error& e) {
    err << "utpada: " << e.what();
    if (!e.subject().empty()) err << " [" << e.subject() << "]";
    err << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "utpada: " << e.what() << "\n";
    return kExitExecution;
  }
}

}  // namespace utpada::cli
