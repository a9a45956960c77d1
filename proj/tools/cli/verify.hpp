#pragma once

#include <memory>
#include <string>
#include <vector>

#include "commands.hpp"

namespace obdeg::cli {

// Names of the bundled operator checks, in run order.
std::vector<std::string> verify_check_names();

// Reads {preset, checks}; each check writes <name>-<check>.report.json and the
// command's own report summarizes them.
std::unique_ptr<Command> make_verify_command(const Section& root);

}  // namespace obdeg::cli
