#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace utpada {

enum class ErrorKind {
  MalformedCase,
  DuplicateCaseId,
  EmptyCaseSet,
  IoError,
  EmptyTree,
  InvalidDraft,
  DuplicateBody,
  NotFound,
  AlreadyCurated,
  EmptyQuery,
  UnbalancedBraces,
  NoClasses,
  InvalidTimestamps,
  InvalidRecord,
  MissingCategory,
  InvalidScorecard,
  MissingBenchmarks,
  EmptyHistory,
  DanglingReference,
  StoreCorrupt,
  StoreLocked,
  UnknownParticipant,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto exit codes without string matching. `subject`
// names the entity the error is about when there is one: the offending file,
// the existing snippet id of a duplicate body, the unknown participant.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string subject = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorKind kind_;
  std::string subject_;
};

}  // namespace utpada
