#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "obdeg/continuation.hpp"
#include "obdeg/degree.hpp"
#include "obdeg/domain.hpp"
#include "obdeg/registry.hpp"

namespace obdeg::cli {

using json = nlohmann::ordered_json;

// Malformed configuration: bad syntax, wrong type, missing or unknown key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a JSON document; syntax errors report line and column.
json parse_config(const std::string& text, const std::string& source);
json load_config(const std::string& path);

// Read-once view of a JSON object. finish() rejects every key that was not read.
class Section {
 public:
  Section(const json& j, std::string path);

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;

  Section child(const std::string& key) const;
  std::optional<Section> optional_child(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) const;
  Vec2 point(const std::string& key) const;
  Vec2 point(const std::string& key, Vec2 fallback) const;
  // Every member must be a number.
  ParameterMap parameters(const std::string& key) const;

  void finish() const;

 private:
  const json& at(const std::string& key) const;
  [[noreturn]] void type_error(const std::string& key, const char* expected) const;

  const json* j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

struct DomainSpec {
  RadiusFunction radius;
  int n_r = 16;
  int n_theta = 32;

  DomainPtr build() const;
  json echo() const;
};

DomainSpec read_domain(const Section& s);
NewtonOptions read_newton(const std::optional<Section>& s);
ContinuationSchedule read_schedule(const std::optional<Section>& s);
EigenOptions read_eigen(const std::optional<Section>& s);

json newton_echo(const NewtonOptions& o);
json schedule_echo(const ContinuationSchedule& s);

}  // namespace obdeg::cli
