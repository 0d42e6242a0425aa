#include "hcl/hcd_csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "hcl/errors.hpp"

namespace hcl {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::int64_t parse_count(std::string_view field, std::size_t line_no, std::string_view name) {
  std::int64_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last)
    raise(ErrorKind::MalformedInput,
          fmt::format("line {}: {} = '{}' is not an integer count", line_no, name, field));
  return value;
}

}  // namespace

HistoricalData read_hcd_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<RawRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = trim(view);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "study_id" || fields[1] != "y" || fields[2] != "n")
        raise(ErrorKind::MalformedInput,
              fmt::format("line {}: expected header 'study_id,y,n'", line_no));
      have_header = true;
      continue;
    }
    if (fields.size() != 3)
      raise(ErrorKind::MalformedInput,
            fmt::format("line {}: expected 3 fields, got {}", line_no, fields.size()));
    rows.push_back({std::string(fields[0]), parse_count(fields[1], line_no, "y"),
                    parse_count(fields[2], line_no, "n")});
  }
  if (!have_header) raise(ErrorKind::MalformedInput, "missing header 'study_id,y,n'");
  return validate_hcd(rows);
}

HistoricalData read_hcd_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  return read_hcd_csv(in);
}

void write_hcd_csv(std::ostream& out, const HistoricalData& hcd) {
  out << "study_id,y,n\n";
  for (const auto& s : hcd.studies()) out << fmt::format("{},{},{}\n", s.id, s.y, s.n);
}

}  // namespace hcl
