#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace gradphi {

/// Provenance lines written at the top of every artifact.
struct ArtifactHeader {
  std::string kind;                 ///< e.g. "sigma", "trajectory"
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Round-trip formatting of a double (%.17g).
std::string format_double(double v);

/// Comment-prefixed header followed by one column row; values are written in
/// the order given, doubles with format_double.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const ArtifactHeader& header, std::vector<std::string> columns);

  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(const char* v) { return cell(std::string(v)); }
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(unsigned long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(unsigned v) { return cell(static_cast<unsigned long long>(v)); }
  CsvWriter& cell(unsigned long v) { return cell(static_cast<unsigned long long>(v)); }
  CsvWriter& cell(long v) { return cell(static_cast<long long>(v)); }
  /// Ends the row; throws FormatError when the cell count is off.
  void end_row();

  std::size_t rows() const noexcept { return rows_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t pending_ = 0;
  std::size_t rows_ = 0;
};

void write_header(std::ostream& out, const ArtifactHeader& header);

}  // namespace gradphi
