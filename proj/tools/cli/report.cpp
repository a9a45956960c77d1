#include "report.hpp"

#include "obdeg/csv.hpp"
#include "obdeg/errors.hpp"

namespace obdeg::cli {

Report::Report(std::string name, std::string kind, std::uint64_t seed, json input)
    : name_(std::move(name)),
      kind_(std::move(kind)),
      seed_(seed),
      input_(std::move(input)),
      start_(std::chrono::steady_clock::now()) {}

bool Report::check(const std::string& name, double measured, const std::string& comparison, double tolerance) {
  bool pass = false;
  if (comparison == "<=") pass = measured <= tolerance;
  else if (comparison == ">=") pass = measured >= tolerance;
  else if (comparison == "==") pass = measured == tolerance;
  else if (comparison == "<") pass = measured < tolerance;
  else if (comparison == ">") pass = measured > tolerance;
  else throw std::invalid_argument("unknown comparison " + comparison);
  checks_.push_back({{"name", name},
                     {"pass", pass},
                     {"measured", measured},
                     {"comparison", comparison},
                     {"tolerance", tolerance}});
  return pass;
}

bool Report::check_flag(const std::string& name, bool value) {
  return check(name, value ? 1.0 : 0.0, "==", 1.0);
}

void Report::record_error(const std::exception& e) {
  error_ = {{"message", e.what()}};
  if (const auto* oe = dynamic_cast<const Error*>(&e)) error_["kind"] = to_string(oe->kind());
}

bool Report::passed() const {
  if (!error_.is_null()) return false;
  for (const json& c : checks_)
    if (!c["pass"].get<bool>()) return false;
  return true;
}

json Report::to_json() const {
  json j;
  j["name"] = name_;
  j["kind"] = kind_;
  j["tool_version"] = kToolVersion;
  j["seed"] = seed_;
  j["input"] = input_;
  j["measured"] = measured_;
  j["checks"] = checks_;
  j["pass"] = passed();
  if (!error_.is_null()) j["error"] = error_;
  j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return j;
}

void Report::write(const std::filesystem::path& dir, const std::string& file_stem) const {
  write_file_atomic(dir / (file_stem + ".report.json"), to_json().dump(2) + "\n");
}

}  // namespace obdeg::cli
