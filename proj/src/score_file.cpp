#include "softsrocc/score_file.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "softsrocc/errors.hpp"

namespace softsrocc {

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) parse_fail(line_no, "not a number: '" + text + "'");
  if (!std::isfinite(v)) parse_fail(line_no, "non-finite value: '" + text + "'");
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

ScoreFile read_score_file(std::istream& in) {
  ScoreFile file;
  std::string line;
  if (!std::getline(in, line)) parse_fail(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScoreFileHeader) {
    parse_fail(1, "expected header '" + std::string(kScoreFileHeader) + "'");
  }
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) parse_fail(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) parse_fail(line_no, "empty sample_id");
    if (!seen.insert(fields[0]).second) parse_fail(line_no, "duplicate sample_id '" + fields[0] + "'");
    file.ids.push_back(fields[0]);
    file.mos.push_back(parse_double(fields[1], line_no));
    file.pred.push_back(parse_double(fields[2], line_no));
  }
  return file;
}

ScoreFile read_score_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  }
  return read_score_file(in);
}

void write_score_file(std::ostream& out, const ScoreFile& file) {
  out << kScoreFileHeader << '\n';
  for (std::size_t i = 0; i < file.size(); ++i) {
    if (file.ids[i].find(',') != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "sample_id contains a comma: " + file.ids[i]);
    }
    out << file.ids[i] << ',' << format_double(file.mos[i]) << ','
        << format_double(file.pred[i]) << '\n';
  }
}

}  // namespace softsrocc
