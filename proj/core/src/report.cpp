#include "utpada/report.hpp"

#include <sstream>

namespace utpada {

nlohmann::json to_json(const ValidationReport& report) {
  using nlohmann::json;
  std::size_t correct = 0, incorrect = 0, missing = 0, not_applicable = 0;
  json count_rows = json::array();
  for (const auto& c : report.counts()) {
    correct += c.correct;
    incorrect += c.incorrect;
    missing += c.missing;
    not_applicable += c.not_applicable;
    count_rows.push_back({{"case_id", c.case_id},
                          {"guideline_id", c.guideline_id},
                          {"Correct", c.correct},
                          {"Incorrect", c.incorrect},
                          {"Missing", c.missing},
                          {"NotApplicable", c.not_applicable}});
  }
  json findings = json::array();
  for (const auto& f : report.findings) {
    json j{{"case_id", f.case_id}, {"guideline_id", f.guideline_id}, {"path", f.path}, {"status", to_string(f.status)}};
    if (f.location) j["location"] = {{"first_line", f.location->first}, {"last_line", f.location->last}};
    if (!f.recommended_snippet_ids.empty()) j["recommended_snippet_ids"] = f.recommended_snippet_ids;
    findings.push_back(std::move(j));
  }
  json diagnostics = json::array();
  for (const auto& d : report.diagnostics) {
    json j{{"path", d.path}, {"message", d.message}};
    if (!d.case_id.empty()) j["case_id"] = d.case_id;
    diagnostics.push_back(std::move(j));
  }
  return json{{"run_id", report.run_id},
              {"generated_at", report.generated_at},
              {"totals",
               {{"cases_run", report.cases_run},
                {"files_scanned", report.files_scanned},
                {"Correct", correct},
                {"Incorrect", incorrect},
                {"Missing", missing},
                {"NotApplicable", not_applicable}}},
              {"counts", std::move(count_rows)},
              {"findings", std::move(findings)},
              {"diagnostics", std::move(diagnostics)}};
}

std::string render_text(const ValidationReport& report) {
  std::ostringstream os;
  os << "run " << report.run_id << "  cases=" << report.cases_run << "  files=" << report.files_scanned << "\n\n";
  os << "case                 guideline     correct incorrect missing n/a\n";
  for (const auto& c : report.counts()) {
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %-12s %8zu %9zu %7zu %3zu\n", c.case_id.c_str(),
                  c.guideline_id.c_str(), c.correct, c.incorrect, c.missing, c.not_applicable);
    os << line;
  }
  bool header = false;
  for (const auto& f : report.findings) {
    if (f.status != FindingStatus::Incorrect && f.status != FindingStatus::Missing) continue;
    if (!header) {
      os << "\nviolations:\n";
      header = true;
    }
    os << "  " << to_string(f.status) << "  " << f.case_id << "  " << f.path;
    if (f.location) os << ":" << f.location->first;
    if (!f.recommended_snippet_ids.empty()) {
      os << "  -> ";
      for (std::size_t i = 0; i < f.recommended_snippet_ids.size(); ++i) {
        os << (i ? ", " : "") << f.recommended_snippet_ids[i];
      }
    }
    os << "\n";
  }
  if (!report.diagnostics.empty()) {
    os << "\ndiagnostics:\n";
    for (const auto& d : report.diagnostics) {
      os << "  " << (d.path.empty() ? "<tree>" : d.path) << ": " << d.message << "\n";
    }
  }
  return os.str();
}

int validation_exit_code(const ValidationReport& report) { return report.has_violations() ? 1 : 0; }

}  // namespace utpada
