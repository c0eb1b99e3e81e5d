#include "utpada/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "utpada/error.hpp"
#include "utpada/text.hpp"

namespace utpada {
namespace {

using nlohmann::json;

std::string rational_text(const Rational& r) {
  if (r.den() == 1) return std::to_string(r.num());
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

std::uint32_t checksum(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + i])) << (8 * i);
  return v;
}

std::string errno_text() { return std::strerror(errno); }

[[noreturn]] void invalid(std::string_view what) { throw Error(ErrorKind::InvalidRecord, std::string(what)); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) invalid(std::string("event data lacks '") + key + "'");
  return j.at(key);
}

std::string string_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) invalid(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t int_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) invalid(std::string("'") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

Timestamp timestamp_field(const json& j, const char* key) {
  auto t = parse_timestamp(string_field(j, key));
  if (!t) invalid(std::string("'") + key + "' is not an ISO-8601 timestamp");
  return *t;
}

json event_payload(const Event& e) {
  return json{{"seq", e.seq}, {"ts", e.timestamp}, {"type", to_string(e.type)}, {"data", e.data}};
}

}  // namespace

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::ValidationSummary: return "validation";
    case EventType::Contribution: return "contribution";
    case EventType::Scorecard: return "scorecard";
    case EventType::Rsi: return "rsi";
    case EventType::Curation: return "curation";
  }
  return "contribution";
}

std::optional<EventType> parse_event_type(std::string_view s) {
  for (auto t : {EventType::ValidationSummary, EventType::Contribution, EventType::Scorecard, EventType::Rsi,
                 EventType::Curation}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

json to_json(const ContributionRecord& r) {
  return json{{"contribution_id", r.contribution_id},
              {"participant_id", r.participant_id},
              {"task_id", r.task_id},
              {"snippet_ids", r.snippet_ids_used},
              {"loc_added", r.loc_added},
              {"loc_updated", r.loc_updated},
              {"loc_deleted", r.loc_deleted},
              {"commit_count", r.commit_count},
              {"assigned_at", r.assigned_at.text},
              {"started_at", r.started_at.text},
              {"submitted_at", r.submitted_at.text},
              {"approved_at", r.approved_at ? json(r.approved_at->text) : json(nullptr)},
              {"status", to_string(r.status)}};
}

ContributionRecord contribution_from_json(const json& j) {
  ContributionRecord r;
  r.contribution_id = string_field(j, "contribution_id");
  r.participant_id = string_field(j, "participant_id");
  r.task_id = string_field(j, "task_id");
  const auto& ids = field(j, "snippet_ids");
  if (!ids.is_array()) invalid("'snippet_ids' must be an array");
  for (const auto& id : ids) {
    if (!id.is_string()) invalid("'snippet_ids' entries must be strings");
    r.snippet_ids_used.push_back(id.get<std::string>());
  }
  r.loc_added = int_field(j, "loc_added");
  r.loc_updated = int_field(j, "loc_updated");
  r.loc_deleted = int_field(j, "loc_deleted");
  r.commit_count = int_field(j, "commit_count");
  r.assigned_at = timestamp_field(j, "assigned_at");
  r.started_at = timestamp_field(j, "started_at");
  r.submitted_at = timestamp_field(j, "submitted_at");
  if (!field(j, "approved_at").is_null()) r.approved_at = timestamp_field(j, "approved_at");
  auto status = parse_contribution_status(string_field(j, "status"));
  if (!status) invalid("unknown contribution status");
  r.status = *status;
  if (auto why = record_violation(r); !why.empty()) invalid(why);
  return r;
}

json to_json(const Scorecard& card) {
  json scores = json::object();
  for (const auto& [cat, score] : card.category_scores) scores[std::string(category_key(cat))] = score;
  return json{{"contribution_id", card.contribution_id},
              {"reviewer_id", card.reviewer_id},
              {"scores", scores},
              {"productivity_points",
               card.productivity_points ? json(rational_text(*card.productivity_points)) : json(nullptr)},
              {"snippet_use", to_string(card.snippet_use)},
              {"notes", card.notes}};
}

Scorecard scorecard_from_json(const json& j) {
  Scorecard card;
  try {
    card.contribution_id = string_field(j, "contribution_id");
    card.reviewer_id = string_field(j, "reviewer_id");
    const auto& scores = field(j, "scores");
    if (!scores.is_object()) invalid("'scores' must be an object");
    for (const auto& [key, value] : scores.items()) {
      auto cat = parse_category_key(key);
      if (!cat) invalid("unknown review category '" + key + "'");
      if (!value.is_number_integer()) invalid("category scores must be integers");
      card.category_scores[*cat] = value.get<int>();
    }
    const auto& prod = field(j, "productivity_points");
    if (!prod.is_null()) {
      if (!prod.is_string()) invalid("'productivity_points' must be a string");
      auto p = Rational::try_parse(prod.get<std::string>());
      if (!p) invalid("'productivity_points' is not a number");
      card.productivity_points = *p;
    }
    auto use = parse_snippet_use(string_field(j, "snippet_use"));
    if (!use) invalid("unknown snippet_use");
    card.snippet_use = *use;
    if (j.contains("notes") && j.at("notes").is_string()) card.notes = j.at("notes").get<std::string>();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidRecord) throw;
    throw Error(ErrorKind::InvalidScorecard, e.what());
  }
  return card;
}

json rsi_event(const std::string& contribution_id, const RsiScore& s) {
  return json{{"contribution_id", contribution_id},
              {"review_points", rational_text(s.review_points)},
              {"productivity_points", rational_text(s.productivity_points)},
              {"total_100", rational_text(s.total_100)},
              {"value_10", rational_text(s.value_10)},
              {"pass", s.pass}};
}

json validation_summary_event(const ValidationReport& report, const std::string& org) {
  std::size_t correct = 0, incorrect = 0, missing = 0, na = 0;
  for (const auto& c : report.counts()) {
    correct += c.correct;
    incorrect += c.incorrect;
    missing += c.missing;
    na += c.not_applicable;
  }
  return json{{"run_id", report.run_id},
              {"org", org},
              {"generated_at", report.generated_at},
              {"cases_run", report.cases_run},
              {"files_scanned", report.files_scanned},
              {"Correct", correct},
              {"Incorrect", incorrect},
              {"Missing", missing},
              {"NotApplicable", na}};
}

json curation_event(const std::string& snippet_id, std::string_view action) {
  return json{{"snippet_id", snippet_id}, {"action", action}};
}

std::string encode_record(std::string_view payload) {
  std::string out;
  out.reserve(payload.size() + 8);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  put_u32(out, checksum(payload));
  out.append(payload);
  return out;
}

// ---------------------------------------------------------------------------

MetricDb MetricDb::in_memory() { return MetricDb(); }

MetricDb::MetricDb(MetricDb&& o) noexcept
    : events_(std::move(o.events_)),
      contributions_(std::move(o.contributions_)),
      scorecards_(std::move(o.scorecards_)),
      dropped_tail_bytes_(o.dropped_tail_bytes_),
      path_(std::move(o.path_)),
      fd_(std::exchange(o.fd_, -1)),
      lock_fd_(std::exchange(o.lock_fd_, -1)) {}

MetricDb& MetricDb::operator=(MetricDb&& o) noexcept {
  if (this != &o) {
    close_handles();
    events_ = std::move(o.events_);
    contributions_ = std::move(o.contributions_);
    scorecards_ = std::move(o.scorecards_);
    dropped_tail_bytes_ = o.dropped_tail_bytes_;
    path_ = std::move(o.path_);
    fd_ = std::exchange(o.fd_, -1);
    lock_fd_ = std::exchange(o.lock_fd_, -1);
  }
  return *this;
}

MetricDb::~MetricDb() { close_handles(); }

void MetricDb::close_handles() noexcept {
  if (fd_ >= 0) ::close(std::exchange(fd_, -1));
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(std::exchange(lock_fd_, -1));
  }
}

MetricDb MetricDb::open(const std::filesystem::path& path, OpenMode mode) {
  MetricDb db;
  db.path_ = path;
  const auto subject = path.string();
  if (mode == OpenMode::ReadWrite) {
    const auto lock_path = subject + ".lock";
    db.lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (db.lock_fd_ < 0) throw Error(ErrorKind::IoError, "cannot open lock file: " + errno_text(), lock_path);
    if (::flock(db.lock_fd_, LOCK_EX | LOCK_NB) != 0) {
      if (errno == EWOULDBLOCK) {
        throw Error(ErrorKind::StoreLocked, "another process holds the write lock", lock_path);
      }
      throw Error(ErrorKind::IoError, "cannot lock: " + errno_text(), lock_path);
    }
    db.fd_ = ::open(subject.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (db.fd_ < 0) throw Error(ErrorKind::IoError, "cannot open log: " + errno_text(), subject);
  } else if (!std::filesystem::exists(path)) {
    return db;  // an absent log reads as empty
  }

  const auto bytes = text::read_file(path);
  db.load_bytes(bytes, true);
  if (db.dropped_tail_bytes_ > 0 && db.fd_ >= 0) {
    if (::ftruncate(db.fd_, static_cast<off_t>(bytes.size() - db.dropped_tail_bytes_)) != 0) {
      throw Error(ErrorKind::IoError, "cannot drop torn tail: " + errno_text(), subject);
    }
  }
  if (db.fd_ >= 0 && ::lseek(db.fd_, 0, SEEK_END) < 0) {
    throw Error(ErrorKind::IoError, "cannot seek: " + errno_text(), subject);
  }
  return db;
}

MetricDb MetricDb::replay(std::string_view log_bytes) {
  MetricDb db;
  db.load_bytes(log_bytes, true);
  return db;
}

void MetricDb::load_bytes(std::string_view bytes, bool tolerate_tail) {
  const auto subject = path_ ? path_->string() : std::string("<memory>");
  std::size_t at = 0;
  Aggregate state;
  while (at < bytes.size()) {
    const auto remaining = bytes.size() - at;
    if (remaining < 8 || get_u32(bytes, at) > remaining - 8) {
      if (!tolerate_tail) throw Error(ErrorKind::StoreCorrupt, "truncated record", subject);
      dropped_tail_bytes_ = remaining;
      break;
    }
    const auto len = get_u32(bytes, at);
    const auto crc = get_u32(bytes, at + 4);
    const auto payload = bytes.substr(at + 8, len);
    const auto record_no = std::to_string(events_.size() + 1);
    if (checksum(payload) != crc) {
      throw Error(ErrorKind::StoreCorrupt, "checksum mismatch in record " + record_no, subject);
    }
    Event e;
    try {
      const auto j = json::parse(payload);
      e.seq = j.at("seq").get<std::uint64_t>();
      e.timestamp = j.at("ts").get<std::string>();
      auto type = parse_event_type(j.at("type").get<std::string>());
      if (!type) throw std::invalid_argument("unknown event type");
      e.type = *type;
      e.data = j.at("data");
    } catch (const std::exception& ex) {
      throw Error(ErrorKind::StoreCorrupt, "record " + record_no + " is not a valid event: " + ex.what(), subject);
    }
    if (!events_.empty() && e.seq <= events_.back().seq) {
      throw Error(ErrorKind::StoreCorrupt, "sequence numbers do not increase at record " + record_no, subject);
    }
    try {
      validate(e, state);
    } catch (const Error& ex) {
      throw Error(ErrorKind::StoreCorrupt, "record " + record_no + ": " + ex.what(), subject);
    }
    apply(e, state);
    events_.push_back(std::move(e));
    at += 8 + len;
  }
  contributions_ = std::move(state.contributions);
  scorecards_ = std::move(state.scorecards);
}

void MetricDb::validate(const Event& e, const Aggregate& state) const {
  if (e.timestamp.empty()) invalid("event timestamp is empty");
  const auto& d = e.data;
  switch (e.type) {
    case EventType::Contribution: {
      auto r = contribution_from_json(d);
      if (state.contributions.count(r.contribution_id)) {
        invalid("contribution '" + r.contribution_id + "' is already recorded");
      }
      break;
    }
    case EventType::Scorecard: {
      auto card = scorecard_from_json(d);
      if (!state.contributions.count(card.contribution_id)) {
        throw Error(ErrorKind::DanglingReference, "scorecard refers to unknown contribution", card.contribution_id);
      }
      if (!card.productivity_points) {
        throw Error(ErrorKind::InvalidScorecard, "stored scorecards need resolved productivity points",
                    card.contribution_id);
      }
      (void)compute_rsi(card);
      break;
    }
    case EventType::Rsi: {
      const auto id = string_field(d, "contribution_id");
      if (!state.contributions.count(id)) {
        throw Error(ErrorKind::DanglingReference, "RSI score refers to unknown contribution", id);
      }
      for (const char* k : {"review_points", "productivity_points", "total_100", "value_10"}) {
        if (!Rational::try_parse(string_field(d, k))) invalid(std::string("'") + k + "' is not a number");
      }
      break;
    }
    case EventType::ValidationSummary:
      string_field(d, "run_id");
      string_field(d, "org");
      string_field(d, "generated_at");
      for (const char* k : {"Correct", "Incorrect", "Missing", "NotApplicable"}) {
        if (int_field(d, k) < 0) invalid(std::string("'") + k + "' must be non-negative");
      }
      break;
    case EventType::Curation:
      string_field(d, "snippet_id");
      string_field(d, "action");
      break;
  }
}

void MetricDb::apply(const Event& e, Aggregate& state) {
  if (e.type == EventType::Contribution) {
    auto r = contribution_from_json(e.data);
    auto id = r.contribution_id;
    state.contributions.emplace(std::move(id), std::move(r));
  } else if (e.type == EventType::Scorecard) {
    auto card = scorecard_from_json(e.data);
    auto id = card.contribution_id;
    state.scorecards.insert_or_assign(std::move(id), std::move(card));
  }
}

void MetricDb::write_bytes(std::string_view bytes) {
  if (!path_) return;
  const auto subject = path_->string();
  if (fd_ < 0) throw Error(ErrorKind::IoError, "database is open read-only", subject);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto n = ::write(fd_, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::IoError, "write failed: " + errno_text(), subject);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw Error(ErrorKind::IoError, "fsync failed: " + errno_text(), subject);
}

std::uint64_t MetricDb::append(EventType type, json data, std::string timestamp) {
  std::vector<PendingEvent> one;
  one.push_back({type, std::move(data), std::move(timestamp)});
  return append_all(std::move(one)).front();
}

std::vector<std::uint64_t> MetricDb::append_all(std::vector<PendingEvent> pending) {
  if (path_ && fd_ < 0) throw Error(ErrorKind::IoError, "database is open read-only", path_->string());
  Aggregate state{contributions_, scorecards_};
  std::vector<Event> staged;
  staged.reserve(pending.size());
  auto seq = last_sequence();
  std::string bytes;
  for (auto& p : pending) {
    Event e{++seq, p.timestamp.empty() ? text::now_iso8601() : std::move(p.timestamp), p.type, std::move(p.data)};
    validate(e, state);
    apply(e, state);
    bytes += encode_record(event_payload(e).dump());
    staged.push_back(std::move(e));
  }
  write_bytes(bytes);
  std::vector<std::uint64_t> seqs;
  seqs.reserve(staged.size());
  for (auto& e : staged) {
    seqs.push_back(e.seq);
    events_.push_back(std::move(e));
  }
  contributions_ = std::move(state.contributions);
  scorecards_ = std::move(state.scorecards);
  return seqs;
}

std::string MetricDb::serialize() const {
  std::string out;
  for (const auto& e : events_) out += encode_record(event_payload(e).dump());
  return out;
}

void MetricDb::write_copy(const std::filesystem::path& path) const {
  if (std::filesystem::exists(path)) throw Error(ErrorKind::IoError, "refusing to overwrite", path.string());
  text::write_file_atomic(path, serialize());
}

std::string mask_token(std::string_view prefix, std::string_view id, std::string_view salt) {
  std::string keyed(salt);
  keyed += '\x1f';
  keyed += id;
  return std::string(prefix) + text::hex64(text::fnv1a64(keyed)).substr(0, 12);
}

MetricDb mask_identities(const MetricDb& db, std::string_view salt) {
  std::string bytes;
  for (auto e : db.events()) {
    if (e.type == EventType::Contribution) {
      e.data["participant_id"] = mask_token("P-", e.data.at("participant_id").get<std::string>(), salt);
    } else if (e.type == EventType::Scorecard) {
      e.data["reviewer_id"] = mask_token("R-", e.data.at("reviewer_id").get<std::string>(), salt);
    }
    bytes += encode_record(json{{"seq", e.seq}, {"ts", e.timestamp}, {"type", to_string(e.type)}, {"data", e.data}}
                               .dump());
  }
  return MetricDb::replay(bytes);
}

}  // namespace utpada
