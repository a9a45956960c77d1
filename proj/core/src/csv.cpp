#include "obdeg/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "obdeg/errors.hpp"

namespace obdeg {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::input, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::input, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::input, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string table_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += columns[j];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw Error(ErrorKind::input, "csv row width does not match the header");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string field_csv(const ScalarField& u) {
  const DiscreteDomain& d = *u.domain();
  std::vector<std::vector<double>> rows;
  rows.reserve(d.node_count());
  for (std::size_t k = 0; k < d.node_count(); ++k) {
    const Vec2 x = d.point(k);
    rows.push_back({static_cast<double>(k), x.x(), x.y(), u.values()[static_cast<Eigen::Index>(k)]});
  }
  return table_csv({"node_index", "x", "y", "value"}, rows);
}

}  // namespace obdeg
