#include <algorithm>

#include "educoder/core/error.hpp"
#include "educoder/core/slug.hpp"
#include "educoder/ingest/table.hpp"

namespace educoder::ingest {

FileFormat file_format_from_string(std::string_view s) {
  const std::string lower = core::to_lower_ascii(s);
  if (lower == "csv") return FileFormat::csv;
  if (lower == "xlsx") return FileFormat::xlsx;
  throw Error(errc::validation, "format must be csv or xlsx", "format");
}

FileFormat file_format_from_filename(std::string_view filename) {
  const std::string lower = core::to_lower_ascii(filename);
  return lower.ends_with(".xlsx") ? FileFormat::xlsx : FileFormat::csv;
}

namespace {

std::vector<std::vector<std::string>> parse_records(std::string_view in) {
  if (in.starts_with("\xEF\xBB\xBF")) in.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  std::size_t i = 0;
  const std::size_t n = in.size();
  bool at_record_start = true;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    at_record_start = true;
  };

  while (i < n) {
    at_record_start = false;
    const std::size_t row = records.size() + 1;
    if (in[i] == '"') {
      ++i;
      for (;;) {
        if (i >= n) throw Error(errc::malformed_file, "unterminated quoted field", {}, row);
        if (in[i] == '"') {
          if (i + 1 < n && in[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field.push_back(in[i++]);
      }
      if (i < n && in[i] != ',' && in[i] != '\n' && in[i] != '\r') {
        throw Error(errc::malformed_file, "unexpected character after closing quote", {}, row);
      }
    } else {
      while (i < n && in[i] != ',' && in[i] != '\n' && in[i] != '\r') {
        if (in[i] == '"') throw Error(errc::malformed_file, "quote inside unquoted field", {}, row);
        field.push_back(in[i++]);
      }
    }
    if (i >= n) break;
    if (in[i] == ',') {
      record.push_back(std::move(field));
      field.clear();
      ++i;
      if (i >= n) break;  // trailing comma at EOF: one more empty field
      continue;
    }
    if (in[i] == '\r') ++i;
    if (i < n && in[i] == '\n') ++i;
    end_record();
  }
  if (!at_record_start) end_record();
  return records;
}

}  // namespace

Table read_csv(std::string_view bytes) {
  auto records = parse_records(bytes);
  Table table;
  if (records.empty()) throw Error(errc::malformed_file, "file has no header row", {}, 1);
  table.header = std::move(records.front());
  for (auto& h : table.header) h = core::trim(h);
  const std::size_t width = table.header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& cells = records[r];
    if (cells.size() > width) {
      const bool extra_blank = std::all_of(cells.begin() + static_cast<std::ptrdiff_t>(width), cells.end(),
                                           [](const std::string& c) { return core::trim(c).empty(); });
      if (!extra_blank) {
        throw Error(errc::malformed_file,
                    "row has " + std::to_string(cells.size()) + " fields, header has " + std::to_string(width), {},
                    r + 1);
      }
      cells.resize(width);
    }
    cells.resize(width);
    table.rows.push_back({r + 1, std::move(cells)});
  }
  return table;
}

Table read_table(std::string_view bytes, FileFormat format) {
  return format == FileFormat::csv ? read_csv(bytes) : read_xlsx(bytes);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void append_csv_record(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out += "\r\n";
}

}  // namespace educoder::ingest
