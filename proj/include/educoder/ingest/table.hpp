#pragma once
// Raw tabular input shared by the CSV and XLSX readers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace educoder::ingest {

enum class FileFormat { csv, xlsx };

[[nodiscard]] FileFormat file_format_from_string(std::string_view s);
/// Guesses from a file name extension; defaults to csv.
[[nodiscard]] FileFormat file_format_from_filename(std::string_view filename);

struct TableRow {
  std::size_t source_row = 0;  // 1-based; the header is row 1
  std::vector<std::string> cells;
};

struct Table {
  std::vector<std::string> header;
  std::vector<TableRow> rows;
};

/// RFC-4180 reader: comma delimiter, double-quote quoting with "" escapes,
/// CRLF or LF record ends, optional UTF-8 byte-order mark. Throws
/// Error(malformedFile) naming the first bad row.
[[nodiscard]] Table read_csv(std::string_view bytes);

/// First worksheet of an XLSX workbook. Throws Error(malformedFile).
[[nodiscard]] Table read_xlsx(std::string_view bytes);

[[nodiscard]] Table read_table(std::string_view bytes, FileFormat format);

/// Quotes a field when it contains a comma, quote, CR or LF.
[[nodiscard]] std::string csv_escape(std::string_view field);
void append_csv_record(std::string& out, const std::vector<std::string>& fields);

}  // namespace educoder::ingest
