#include "augsize/report.hpp"

#include <fstream>
#include <iostream>

#include "augsize/error.hpp"
#include "augsize/util.hpp"

namespace augsize {

nlohmann::ordered_json make_run_report(const std::string& command,
                                       nlohmann::ordered_json config,
                                       nlohmann::ordered_json payload,
                                       nlohmann::ordered_json warnings,
                                       double duration_seconds) {
  nlohmann::ordered_json report;
  report["schema"] = kReportSchema;
  report["tool"] = kToolName;
  report["version"] = kToolVersion;
  report["command"] = command;
  report["config"] = std::move(config);
  report["payload"] = std::move(payload);
  report["warnings"] = std::move(warnings);
  // Timing is opt-in; the default keeps equal-seed reruns byte-identical.
  if (duration_seconds >= 0)
    report["duration_seconds"] = duration_seconds;
  else
    report["duration_seconds"] = nullptr;
  return report;
}

void canonicalize_numbers(nlohmann::ordered_json& j) {
  if (j.is_number_float()) {
    j = round_sig(j.get<double>(), 12);
  } else if (j.is_object() || j.is_array()) {
    for (auto& item : j) canonicalize_numbers(item);
  }
}

void emit_report(const nlohmann::ordered_json& report, const std::string& path) {
  nlohmann::ordered_json canonical = report;
  canonicalize_numbers(canonical);
  const std::string text = canonical.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_text_file(path, text);
}

nlohmann::ordered_json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw Error(errc::missing_file, "cannot open '" + path + "'");
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::schema_violation,
                "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(errc::io_error, "failed writing '" + path + "'");
}

}  // namespace augsize
