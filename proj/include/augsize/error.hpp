#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace augsize {

// Error taxonomy shared by the whole library. Row/column are 0-based and
// only meaningful for table ingestion errors.
enum class errc {
  missing_file,
  empty_input,
  ragged_row,
  parse_error,
  unknown_label_column,
  empty_partition,
  class_missing,
  too_few_samples,
  domain_error,
  invalid_argument,
  divergence,
  schema_violation,
  inconsistent_kappa,
  missing_field,
  all_classes_excluded,
  io_error,
  numerical_failure,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::missing_file: return "MissingFile";
    case errc::empty_input: return "EmptyInput";
    case errc::ragged_row: return "RaggedRow";
    case errc::parse_error: return "ParseError";
    case errc::unknown_label_column: return "UnknownLabelColumn";
    case errc::empty_partition: return "EmptyPartition";
    case errc::class_missing: return "ClassMissing";
    case errc::too_few_samples: return "TooFewSamples";
    case errc::domain_error: return "DomainError";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::divergence: return "Divergence";
    case errc::schema_violation: return "SchemaViolation";
    case errc::inconsistent_kappa: return "InconsistentKappa";
    case errc::missing_field: return "MissingField";
    case errc::all_classes_excluded: return "AllClassesExcluded";
    case errc::io_error: return "IoError";
    case errc::numerical_failure: return "NumericalFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message, long row = -1, long col = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        row_(row),
        col_(col) {}

  errc code() const noexcept { return code_; }
  long row() const noexcept { return row_; }
  long col() const noexcept { return col_; }

 private:
  errc code_;
  long row_;
  long col_;
};

struct Warning {
  std::string code;
  std::string message;
};

using WarningList = std::vector<Warning>;

inline void warn(WarningList* sink, std::string code, std::string message) {
  if (sink != nullptr) sink->push_back({std::move(code), std::move(message)});
}

}  // namespace augsize
