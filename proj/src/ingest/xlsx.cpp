#include <expat.h>

#include <functional>
#include <map>
#include <optional>

#include "educoder/core/error.hpp"
#include "educoder/core/slug.hpp"
#include "educoder/ingest/table.hpp"
#include "educoder/ingest/zip.hpp"

namespace educoder::ingest {

namespace {

using Attributes = std::map<std::string, std::string>;

std::string_view local_name(std::string_view qname) {
  const auto colon = qname.rfind(':');
  return colon == std::string_view::npos ? qname : qname.substr(colon + 1);
}

/// Minimal SAX driver over expat. Element and attribute names are reduced to
/// their local part so prefixed SpreadsheetML parses the same.
class SaxParser {
 public:
  std::function<void(std::string_view, const Attributes&)> on_start;
  std::function<void(std::string_view)> on_end;
  std::function<void(std::string_view)> on_text;

  void parse(const std::string& xml, const std::string& part) {
    XML_Parser p = XML_ParserCreate("UTF-8");
    XML_SetUserData(p, this);
    XML_SetElementHandler(p, &SaxParser::start_cb, &SaxParser::end_cb);
    XML_SetCharacterDataHandler(p, &SaxParser::text_cb);
    const auto status = XML_Parse(p, xml.data(), static_cast<int>(xml.size()), 1);
    std::string err;
    if (status != XML_STATUS_OK) {
      err = std::string(XML_ErrorString(XML_GetErrorCode(p))) + " at line " +
            std::to_string(XML_GetCurrentLineNumber(p));
    }
    XML_ParserFree(p);
    if (!err.empty()) throw Error(errc::malformed_file, "xlsx: " + part + ": " + err);
  }

 private:
  static void start_cb(void* self, const XML_Char* name, const XML_Char** attrs) {
    auto* s = static_cast<SaxParser*>(self);
    if (!s->on_start) return;
    Attributes a;
    for (int i = 0; attrs[i] != nullptr; i += 2) a[std::string(local_name(attrs[i]))] = attrs[i + 1];
    s->on_start(local_name(name), a);
  }
  static void end_cb(void* self, const XML_Char* name) {
    auto* s = static_cast<SaxParser*>(self);
    if (s->on_end) s->on_end(local_name(name));
  }
  static void text_cb(void* self, const XML_Char* text, int len) {
    auto* s = static_cast<SaxParser*>(self);
    if (s->on_text) s->on_text(std::string_view(text, static_cast<std::size_t>(len)));
  }
};

std::vector<std::string> read_shared_strings(const ZipArchive& zip) {
  std::vector<std::string> out;
  if (!zip.contains("xl/sharedStrings.xml")) return out;
  SaxParser sax;
  std::string current;
  bool in_si = false;
  bool in_t = false;
  int phonetic_depth = 0;
  sax.on_start = [&](std::string_view name, const Attributes&) {
    if (name == "si") {
      in_si = true;
      current.clear();
    } else if (name == "rPh") {
      ++phonetic_depth;
    } else if (name == "t" && in_si && phonetic_depth == 0) {
      in_t = true;
    }
  };
  sax.on_end = [&](std::string_view name) {
    if (name == "si") {
      out.push_back(current);
      in_si = false;
    } else if (name == "rPh") {
      --phonetic_depth;
    } else if (name == "t") {
      in_t = false;
    }
  };
  sax.on_text = [&](std::string_view text) {
    if (in_t) current.append(text);
  };
  sax.parse(zip.read("xl/sharedStrings.xml"), "sharedStrings.xml");
  return out;
}

std::string first_sheet_path(const ZipArchive& zip) {
  std::optional<std::string> rel_id;
  if (zip.contains("xl/workbook.xml")) {
    SaxParser sax;
    sax.on_start = [&](std::string_view name, const Attributes& a) {
      if (name == "sheet" && !rel_id) {
        auto it = a.find("id");
        if (it != a.end()) rel_id = it->second;
      }
    };
    sax.parse(zip.read("xl/workbook.xml"), "workbook.xml");
  }
  if (rel_id && zip.contains("xl/_rels/workbook.xml.rels")) {
    std::optional<std::string> target;
    SaxParser sax;
    sax.on_start = [&](std::string_view name, const Attributes& a) {
      if (name != "Relationship") return;
      auto id = a.find("Id");
      auto tgt = a.find("Target");
      if (id != a.end() && tgt != a.end() && id->second == *rel_id) target = tgt->second;
    };
    sax.parse(zip.read("xl/_rels/workbook.xml.rels"), "workbook.xml.rels");
    if (target) {
      std::string path = *target;
      if (path.starts_with("/")) return path.substr(1);
      return "xl/" + path;
    }
  }
  if (zip.contains("xl/worksheets/sheet1.xml")) return "xl/worksheets/sheet1.xml";
  throw Error(errc::malformed_file, "xlsx: workbook has no worksheet");
}

/// "BC12" -> 0-based column index of "BC".
std::optional<std::size_t> column_of(std::string_view ref) {
  std::size_t col = 0;
  std::size_t letters = 0;
  for (char c : ref) {
    if (c >= 'A' && c <= 'Z') {
      col = col * 26 + static_cast<std::size_t>(c - 'A' + 1);
      ++letters;
    } else {
      break;
    }
  }
  if (letters == 0) return std::nullopt;
  return col - 1;
}

}  // namespace

Table read_xlsx(std::string_view bytes) {
  const ZipArchive zip(bytes);
  const auto shared = read_shared_strings(zip);
  const std::string sheet_path = first_sheet_path(zip);

  struct RawRow {
    std::size_t index = 0;
    std::vector<std::string> cells;
  };
  std::vector<RawRow> rows;

  SaxParser sax;
  std::string cell_type;
  std::size_t cell_col = 0;
  std::string value;
  bool capture = false;
  bool in_cell = false;
  bool in_inline = false;

  auto put = [&](std::size_t col, std::string v) {
    auto& cells = rows.back().cells;
    if (cells.size() <= col) cells.resize(col + 1);
    cells[col] = std::move(v);
  };

  sax.on_start = [&](std::string_view name, const Attributes& a) {
    if (name == "row") {
      RawRow r;
      auto it = a.find("r");
      r.index = it != a.end() ? std::stoul(it->second) : (rows.empty() ? 1 : rows.back().index + 1);
      rows.push_back(std::move(r));
    } else if (name == "c" && !rows.empty()) {
      in_cell = true;
      value.clear();
      auto t = a.find("t");
      cell_type = t != a.end() ? t->second : "n";
      auto r = a.find("r");
      std::optional<std::size_t> col = r != a.end() ? column_of(r->second) : std::nullopt;
      cell_col = col ? *col : rows.back().cells.size();
    } else if (in_cell && name == "v") {
      capture = true;
    } else if (in_cell && name == "is") {
      in_inline = true;
    } else if (in_inline && name == "t") {
      capture = true;
    }
  };
  sax.on_end = [&](std::string_view name) {
    if (name == "v" || name == "t") {
      capture = false;
    } else if (name == "is") {
      in_inline = false;
    } else if (name == "c" && in_cell) {
      in_cell = false;
      std::string v;
      if (cell_type == "s") {
        std::size_t idx = 0;
        try {
          idx = std::stoul(value);
        } catch (const std::exception&) {
          throw Error(errc::malformed_file, "xlsx: bad shared string index", {}, rows.back().index);
        }
        if (idx >= shared.size()) {
          throw Error(errc::malformed_file, "xlsx: shared string index out of range", {}, rows.back().index);
        }
        v = shared[idx];
      } else if (cell_type == "b") {
        v = value == "1" ? "true" : "false";
      } else {
        v = value;
      }
      put(cell_col, std::move(v));
    }
  };
  sax.on_text = [&](std::string_view text) {
    if (capture) value.append(text);
  };
  sax.parse(zip.read(sheet_path), sheet_path);

  Table table;
  if (rows.empty()) throw Error(errc::malformed_file, "xlsx: first worksheet is empty", {}, 1);
  table.header = rows.front().cells;
  while (!table.header.empty() && core::trim(table.header.back()).empty()) table.header.pop_back();
  for (auto& h : table.header) h = core::trim(h);
  const std::size_t width = table.header.size();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto& cells = rows[i].cells;
    for (std::size_t c = width; c < cells.size(); ++c) {
      if (!core::trim(cells[c]).empty()) {
        throw Error(errc::malformed_file, "xlsx: value outside header columns", {}, rows[i].index);
      }
    }
    cells.resize(width);
    table.rows.push_back({rows[i].index, std::move(cells)});
  }
  return table;
}

}  // namespace educoder::ingest
