#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace obdeg::cli {

enum ExitStatus : int { kPass = 0, kChecksFailed = 1, kConfigError = 2, kRuntimeError = 3 };

struct RunContext {
  std::string name;  // output stem
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
  std::ostream* log = nullptr;

  std::filesystem::path file(const std::string& suffix) const { return out_dir / (name + suffix); }
};

// A subcommand split in two phases: reading the configuration (which must
// reject unknown keys before anything runs) and running it.
class Command {
 public:
  virtual ~Command() = default;
  virtual json echo() const = 0;
  // Fills report; throws on runtime failure after writing what it has.
  virtual void run(const RunContext& ctx, Report& report) = 0;
};

std::vector<std::string> subcommand_names();
// Reads the subcommand-specific part of root; root.finish() is called by the caller.
std::unique_ptr<Command> read_command(const std::string& subcommand, const Section& root);

}  // namespace obdeg::cli
