#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tdledger {

// Machine-readable error codes. The HTTP layer maps these onto status codes.
namespace errc {
inline constexpr const char* unknown_label = "unknown_label";
inline constexpr const char* parse_error = "parse_error";
inline constexpr const char* io_error = "io_error";
inline constexpr const char* missing_column = "missing_column";
inline constexpr const char* invalid_mapping = "invalid_mapping";
inline constexpr const char* unknown_ticket = "unknown_ticket";
inline constexpr const char* unknown_field = "unknown_field";
inline constexpr const char* read_only_field = "read_only_field";
inline constexpr const char* version_conflict = "version_conflict";
inline constexpr const char* duplicate_ticket = "duplicate_ticket";
inline constexpr const char* out_of_order = "out_of_order";
inline constexpr const char* validation_failed = "validation_failed";
inline constexpr const char* degenerate_rate = "degenerate_rate";
inline constexpr const char* invalid_argument = "invalid_argument";
inline constexpr const char* unsupported_dimension = "unsupported_dimension";
inline constexpr const char* meeting_too_short = "meeting_too_short";
inline constexpr const char* empty_session = "empty_session";
inline constexpr const char* unknown_session = "unknown_session";
inline constexpr const char* duplicate_response = "duplicate_response";
inline constexpr const char* missing_answer = "missing_answer";
inline constexpr const char* unknown_dataset = "unknown_dataset";
inline constexpr const char* dataset_disabled = "dataset_disabled";
inline constexpr const char* missing_parameter = "missing_parameter";
}  // namespace errc

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        std::vector<std::string> fields = {})
      : std::runtime_error(message),
        code_(std::move(code)),
        fields_(std::move(fields)) {}

  const std::string& code() const noexcept { return code_; }

  // Offending field names, when the error is about specific fields.
  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::string code_;
  std::vector<std::string> fields_;
};

}  // namespace tdledger
