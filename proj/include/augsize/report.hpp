#pragma once

#include <json.hpp>
#include <string>

namespace augsize {

inline constexpr const char* kToolName = "augsize";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

// Wraps a subcommand payload into the versioned report envelope.
nlohmann::ordered_json make_run_report(const std::string& command,
                                       nlohmann::ordered_json config,
                                       nlohmann::ordered_json payload,
                                       nlohmann::ordered_json warnings,
                                       double duration_seconds = -1.0);

// Rounds every float to 12 significant digits in place so the emitted text
// is stable at a declared precision.
void canonicalize_numbers(nlohmann::ordered_json& j);

// Pretty-printed JSON with fixed key order and a trailing newline; path "-"
// writes to standard output. Identical reports produce identical bytes.
void emit_report(const nlohmann::ordered_json& report, const std::string& path);

nlohmann::ordered_json load_json(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace augsize
