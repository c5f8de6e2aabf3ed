#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shotintel {

/// Every failure surfaced by the library carries one of these codes.
/// The names are part of the external contract (CLI messages, HTTP bodies).
enum class ErrorCode {
  MalformedManifestLine,
  MissingImage,
  DuplicateId,
  UnsupportedImageFormat,
  IoFailure,
  InconsistentCounts,
  UnknownPromptVersion,
  BackendUnavailable,
  RateLimited,
  EmptyReply,
  ImageTooSmall,
  NoSectionsFound,
  IllegalScoreValue,
  NoOverlap,
  CorpusTooSmall,
  ConfigError,
  CorpusNotParsed,
  BindFailure,
  NotFound,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedManifestLine: return "MalformedManifestLine";
    case ErrorCode::MissingImage: return "MissingImage";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnsupportedImageFormat: return "UnsupportedImageFormat";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InconsistentCounts: return "InconsistentCounts";
    case ErrorCode::UnknownPromptVersion: return "UnknownPromptVersion";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::EmptyReply: return "EmptyReply";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::NoSectionsFound: return "NoSectionsFound";
    case ErrorCode::IllegalScoreValue: return "IllegalScoreValue";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::CorpusNotParsed: return "CorpusNotParsed";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shotintel
