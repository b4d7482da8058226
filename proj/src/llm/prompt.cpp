#include "educoder/llm/prompt.hpp"

#include <algorithm>

#include "educoder/core/error.hpp"

namespace educoder::llm {

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string render_codebook(const LlmRunConfig& config, const core::Codebook& codebook) {
  std::vector<std::string> blocks;
  for (const auto& id : config.features) {
    const auto* c = codebook.find(id);
    if (c == nullptr) continue;
    std::string b = "[" + c->code_id + "] " + c->name + "\nDefinition: " + c->definition;
    if (!c->examples.empty()) {
      b += "\nExamples:";
      for (const auto& e : c->examples) b += "\n- " + e;
    }
    if (!c->non_examples.empty()) {
      b += "\nNon-examples:";
      for (const auto& e : c->non_examples) b += "\n- " + e;
    }
    blocks.push_back(std::move(b));
  }
  return join(blocks, "\n\n");
}

bool is_text_material(const core::Attachment& a) {
  return a.kind == core::AttachmentKind::instructions || a.media_type.starts_with("text/");
}

std::string render_instructions(const LlmRunConfig& config, std::span<const core::Attachment> materials) {
  if (!config.include_context_materials) return "(none)";
  std::vector<std::string> blocks;
  for (const auto& m : materials) {
    if (is_text_material(m)) {
      blocks.push_back("## " + m.title + "\n" + m.bytes);
    } else if (m.kind == core::AttachmentKind::image) {
      blocks.push_back("[image not shown: " + m.title + "]");
    } else {
      blocks.push_back("[attachment not shown: " + m.title + "]");
    }
  }
  return blocks.empty() ? "(none)" : join(blocks, "\n\n");
}

}  // namespace

std::string output_contract(const LlmRunConfig& config) {
  return "\nRespond with a JSON array and nothing else. Each element must be an object of the form\n"
         "{\"line\": <line number>, \"code\": \"<code id>\", \"present\": <true or false>, \"rationale\": \"<one "
         "sentence>\"}\n"
         "Include exactly one element for every transcript line shown and every code id in: " +
         join(config.features, ", ") + ".\n";
}

BuiltPrompt build_prompt(const LlmRunConfig& config, const core::Codebook& codebook, const core::Transcript& transcript,
                         std::span<const core::Attachment> materials) {
  const core::LineNumber first = std::max(config.line_range.start, 1);
  const core::LineNumber last = std::min(config.line_range.end, transcript.line_count());
  if (first > last) {
    throw Error(errc::empty_line_range_selection, "line range selects no transcript line", "lineRange");
  }

  std::vector<std::string> lines;
  for (core::LineNumber l = first; l <= last; ++l) {
    const auto& u = transcript.at_line(l);
    lines.push_back("L" + std::to_string(l) + " " + u.speaker + ": " + u.text);
  }

  BuiltPrompt out;
  const std::string tmpl = config.prompt_template.empty() ? std::string(kDefaultPromptTemplate) : config.prompt_template;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string::npos) {
      out.text.append(tmpl, pos);
      break;
    }
    out.text.append(tmpl, pos, open - pos);
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) {
      out.text.append(tmpl, open);
      break;
    }
    const std::string name = tmpl.substr(open + 2, close - open - 2);
    if (name == "codebook") {
      out.text += render_codebook(config, codebook);
    } else if (name == "transcript") {
      out.text += join(lines, "\n");
    } else if (name == "features") {
      out.text += join(config.features, ", ");
    } else if (name == "instructions") {
      out.text += render_instructions(config, materials);
    } else {
      out.text.append(tmpl, open, close + 2 - open);
      out.warnings.push_back("unknown placeholder {{" + name + "}} left as-is");
    }
    pos = close + 2;
  }
  out.text += output_contract(config);
  return out;
}

}  // namespace educoder::llm
