#pragma once

// `sample_id,mos,pred` CSV score files and the small text helpers shared by
// the other line-oriented formats.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace softsrocc {

struct ScoreFile {
  std::vector<std::string> ids;
  std::vector<double> mos;
  std::vector<double> pred;

  std::size_t size() const noexcept { return ids.size(); }
};

inline constexpr std::string_view kScoreFileHeader = "sample_id,mos,pred";

/// Parses a score file. Errors are ParseError with the 1-based line number.
ScoreFile read_score_file(std::istream& in);
ScoreFile read_score_file(const std::filesystem::path& path);

void write_score_file(std::ostream& out, const ScoreFile& file);

/// 17-significant-digit rendering; parses back to the identical double.
std::string format_double(double v);

/// Strict finite double parse; ParseError mentions `line_no`.
double parse_double(const std::string& text, std::size_t line_no);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace softsrocc
