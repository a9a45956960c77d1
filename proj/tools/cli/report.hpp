#pragma once

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>

#include "config.hpp"

namespace obdeg::cli {

inline constexpr const char* kToolVersion = "0.3.0";

// Run or check report: input echo, measured values, pass/fail checks with
// their tolerances, wall time and tool version.
class Report {
 public:
  Report(std::string name, std::string kind, std::uint64_t seed, json input);

  const std::string& name() const { return name_; }
  void measure(const std::string& key, json value) { measured_[key] = std::move(value); }
  // Adds a pass/fail entry; comparison is one of "<=", ">=", "==", "<", ">".
  bool check(const std::string& name, double measured, const std::string& comparison, double tolerance);
  // A boolean property; measured is recorded as 0/1 against an expected 1.
  bool check_flag(const std::string& name, bool value);
  void record_error(const std::exception& e);
  bool passed() const;
  json to_json() const;
  // Writes <dir>/<file_stem>.report.json atomically.
  void write(const std::filesystem::path& dir, const std::string& file_stem) const;

 private:
  std::string name_;
  std::string kind_;
  std::uint64_t seed_;
  json input_;
  json measured_ = json::object();
  json checks_ = json::array();
  json error_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace obdeg::cli
