#include "gradphi/csv.hpp"

#include <cstdio>
#include <ostream>

#include "gradphi/errors.hpp"

namespace gradphi {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const ArtifactHeader& header) {
  out << "# gradphi " << header.kind << '\n';
  out << "# config_hash=" << (header.config_hash.empty() ? "-" : header.config_hash)
      << " seed=" << header.seed << '\n';
  for (const auto& [k, v] : header.extra) out << "# " << k << '=' << v << '\n';
}

CsvWriter::CsvWriter(std::ostream& out, const ArtifactHeader& header,
                     std::vector<std::string> columns)
    : out_(out), columns_(columns.size()) {
  if (columns.empty()) throw FormatError("CSV needs at least one column");
  write_header(out_, header);
  for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (v.find_first_of(",\n") != std::string::npos) {
    throw FormatError("CSV cell contains a separator: '" + v + "'");
  }
  out_ << (pending_ ? "," : "") << v;
  ++pending_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }
CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }
CsvWriter& CsvWriter::cell(unsigned long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (pending_ != columns_) {
    throw FormatError("CSV row has " + std::to_string(pending_) + " cells, expected " +
                      std::to_string(columns_));
  }
  out_ << '\n';
  pending_ = 0;
  ++rows_;
}

}  // namespace gradphi
