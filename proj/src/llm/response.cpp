#include "educoder/llm/response.hpp"

#include <algorithm>
#include <map>

#include "educoder/codec/json_codec.hpp"
#include "educoder/core/error.hpp"

namespace educoder::llm {

namespace {

/// Index one past the bracket matching raw[open], honouring JSON strings.
std::optional<std::size_t> matching_close(std::string_view raw, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) return i + 1;
      if (depth < 0) return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> find_json_array(std::string_view raw) {
  for (std::size_t open = raw.find('['); open != std::string_view::npos; open = raw.find('[', open + 1)) {
    const auto close = matching_close(raw, open);
    if (!close) continue;
    const auto candidate = raw.substr(open, *close - open);
    const auto j = codec::Json::parse(candidate.begin(), candidate.end(), nullptr, false);
    if (j.is_discarded() || !j.is_array()) continue;
    const bool usable = j.empty() || std::any_of(j.begin(), j.end(), [](const auto& e) { return e.is_object(); });
    if (usable) return std::pair{open, *close};
  }
  return std::nullopt;
}

ParsedResponse parse_llm_response(std::string_view raw, const LlmRunConfig& config) {
  const auto span = find_json_array(raw);
  if (!span) throw Error(errc::no_json_array_found, "response contains no JSON array of annotations");
  const auto text = raw.substr(span->first, span->second - span->first);
  const auto array = codec::Json::parse(text.begin(), text.end());

  ParsedResponse out;
  const std::string annotator = llm_annotator_id(config);
  std::map<std::pair<core::LineNumber, std::string>, core::AnnotationCell> by_key;

  for (std::size_t i = 0; i < array.size(); ++i) {
    const auto& e = array[i];
    const std::string where = "element " + std::to_string(i) + ": ";
    if (!e.is_object()) {
      out.warnings.push_back(where + "not an object, skipped");
      continue;
    }
    auto line_it = e.find("line");
    auto code_it = e.find("code");
    auto present_it = e.find("present");
    if (line_it == e.end() || !line_it->is_number_integer()) {
      out.warnings.push_back(where + "\"line\" missing or not an integer, skipped");
      continue;
    }
    if (code_it == e.end() || !code_it->is_string()) {
      out.warnings.push_back(where + "\"code\" missing or not a string, skipped");
      continue;
    }
    if (present_it == e.end() || !present_it->is_boolean()) {
      out.warnings.push_back(where + "\"present\" missing or not a boolean, skipped");
      continue;
    }
    const auto line_value = line_it->get<long long>();
    const auto code = code_it->get<std::string>();
    if (line_value < config.line_range.start || line_value > config.line_range.end) {
      out.warnings.push_back(where + "line " + std::to_string(line_value) + " outside requested range, skipped");
      continue;
    }
    if (std::find(config.features.begin(), config.features.end(), code) == config.features.end()) {
      out.warnings.push_back(where + "code \"" + code + "\" was not requested, skipped");
      continue;
    }
    core::AnnotationCell cell;
    cell.annotator = annotator;
    cell.line = static_cast<core::LineNumber>(line_value);
    cell.code_id = code;
    cell.value = present_it->get<bool>();
    if (auto r = e.find("rationale"); r != e.end() && r->is_string()) cell.rationale = r->get<std::string>();
    auto [it, inserted] = by_key.insert_or_assign({cell.line, cell.code_id}, std::move(cell));
    if (!inserted) {
      out.warnings.push_back(where + "duplicate entry for line " + std::to_string(line_value) + ", code \"" + code +
                             "\"; keeping the last one");
    }
  }
  for (auto& [key, cell] : by_key) out.cells.push_back(std::move(cell));
  return out;
}

}  // namespace educoder::llm
