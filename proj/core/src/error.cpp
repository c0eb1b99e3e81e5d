#include "utpada/error.hpp"

namespace utpada {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedCase: return "MalformedCase";
    case ErrorKind::DuplicateCaseId: return "DuplicateCaseId";
    case ErrorKind::EmptyCaseSet: return "EmptyCaseSet";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::EmptyTree: return "EmptyTree";
    case ErrorKind::InvalidDraft: return "InvalidDraft";
    case ErrorKind::DuplicateBody: return "DuplicateBody";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::AlreadyCurated: return "AlreadyCurated";
    case ErrorKind::EmptyQuery: return "EmptyQuery";
    case ErrorKind::UnbalancedBraces: return "UnbalancedBraces";
    case ErrorKind::NoClasses: return "NoClasses";
    case ErrorKind::InvalidTimestamps: return "InvalidTimestamps";
    case ErrorKind::InvalidRecord: return "InvalidRecord";
    case ErrorKind::MissingCategory: return "MissingCategory";
    case ErrorKind::InvalidScorecard: return "InvalidScorecard";
    case ErrorKind::MissingBenchmarks: return "MissingBenchmarks";
    case ErrorKind::EmptyHistory: return "EmptyHistory";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::StoreCorrupt: return "StoreCorrupt";
    case ErrorKind::StoreLocked: return "StoreLocked";
    case ErrorKind::UnknownParticipant: return "UnknownParticipant";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string subject)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      subject_(std::move(subject)) {}

}  // namespace utpada
