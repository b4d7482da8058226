#include "educoder/ingest/codebook.hpp"

#include <set>

#include "educoder/core/error.hpp"
#include "educoder/core/slug.hpp"

namespace educoder::ingest {

namespace {

std::optional<std::size_t> find_header(const std::vector<std::string>& header, std::initializer_list<std::string_view> names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string key = core::to_lower_ascii(core::trim(header[i]));
    for (auto n : names) {
      if (key == n) return i;
    }
  }
  return std::nullopt;
}

std::vector<std::string> split_lines(const std::string& cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    auto end = cell.find('\n', start);
    if (end == std::string::npos) end = cell.size();
    std::string item = core::trim(std::string_view(cell).substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back('\n');
    out += items[i];
  }
  return out;
}

}  // namespace

core::Codebook codebook_from_table(const Table& table) {
  const auto& h = table.header;
  const auto code_col = find_header(h, {"code"});
  const auto def_col = find_header(h, {"definition"});
  if (!code_col) throw Error(errc::missing_code_column, "codebook needs a \"code\" column", "code", 1);
  if (!def_col) throw Error(errc::missing_definition_column, "codebook needs a \"definition\" column", "definition", 1);
  const auto cat_col = find_header(h, {"category"});
  const auto ex_col = find_header(h, {"example", "examples"});
  const auto nex_col = find_header(h, {"non_example", "non_examples"});
  const auto kind_col = find_header(h, {"value_kind"});

  core::Codebook book;
  std::set<std::string> slugs;
  std::set<std::string> names_lower;
  for (const auto& row : table.rows) {
    bool blank = true;
    for (const auto& c : row.cells) blank = blank && core::trim(c).empty();
    if (blank) continue;

    core::CodeDefinition def;
    def.name = core::trim(row.cells[*code_col]);
    if (def.name.empty()) throw Error(errc::validation, "row has an empty code name", "code", row.source_row);
    def.definition = core::trim(row.cells[*def_col]);
    if (def.definition.empty()) {
      throw Error(errc::validation, "code \"" + def.name + "\" has an empty definition", "definition", row.source_row);
    }
    if (!names_lower.insert(core::to_lower_ascii(def.name)).second) {
      throw Error(errc::duplicate_code_name, "duplicate code name \"" + def.name + "\"", "code", row.source_row);
    }
    if (cat_col) {
      std::string cat = core::trim(row.cells[*cat_col]);
      if (!cat.empty()) def.category = std::move(cat);
    }
    if (ex_col) def.examples = split_lines(row.cells[*ex_col]);
    if (nex_col) def.non_examples = split_lines(row.cells[*nex_col]);
    if (kind_col) {
      const std::string kind = core::to_lower_ascii(core::trim(row.cells[*kind_col]));
      if (!kind.empty()) {
        try {
          def.value_kind = core::value_kind_from_string(kind);
        } catch (const Error& e) {
          throw Error(e.code(), e.what(), "value_kind", row.source_row);
        }
      }
    }
    def.code_id = core::make_code_slug(def.name, slugs);
    slugs.insert(def.code_id);
    book.codes.push_back(std::move(def));
  }
  if (book.codes.empty()) throw Error(errc::empty_codebook, "codebook has no codes", {}, 1);
  return book;
}

core::Codebook parse_codebook(std::string_view bytes, FileFormat format) {
  return codebook_from_table(read_table(bytes, format));
}

std::string write_codebook_csv(const core::Codebook& codebook) {
  std::string out;
  append_csv_record(out, {"code", "definition", "category", "examples", "non_examples", "value_kind"});
  for (const auto& c : codebook.codes) {
    append_csv_record(out, {c.name, c.definition, c.category.value_or(""), join_lines(c.examples),
                            join_lines(c.non_examples), c.value_kind == core::ValueKind::binary ? "binary" : "free_text"});
  }
  return out;
}

}  // namespace educoder::ingest
