#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "obdeg/calculus.hpp"

namespace obdeg {

// Writes content to path through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form.
std::string format_double(double v);

// Header line plus one row per entry; every row must have columns.size() values.
std::string table_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

// node_index,x,y,value
std::string field_csv(const ScalarField& u);

}  // namespace obdeg
