#include "cotscope/prompts.hpp"

#include <cctype>

namespace cotscope {

namespace {

std::string join_context(const ReasoningSample& s) {
  std::string out;
  for (std::size_t i = 0; i < s.context_statements.size(); ++i) {
    if (i) out += ' ';
    out += s.context_statements[i];
  }
  return out;
}

std::string render_options(const ReasoningSample& s) {
  if (s.options.empty()) return {};
  std::string out = "Options:";
  for (const auto& o : s.options) out += " (" + o.label + ") " + o.text;
  return out + "\n";
}

std::string render(const std::string& tmpl, const ReasoningSample& s, const std::string& hint_line) {
  return substitute(tmpl, {{"context", join_context(s)},
                           {"question", s.question},
                           {"options", render_options(s)},
                           {"hint", hint_line}});
}

}  // namespace

PromptTemplates PromptTemplates::from_json(const nlohmann::json& j) {
  PromptTemplates t;
  t.cot = j.value("cot", t.cot);
  t.no_cot = j.value("no_cot", t.no_cot);
  t.hint = j.value("hint", t.hint);
  return t;
}

nlohmann::json PromptTemplates::to_json() const { return {{"cot", cot}, {"no_cot", no_cot}, {"hint", hint}}; }

std::string substitute(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const auto key = tmpl.substr(i + 1, close - i - 1);
        bool replaced = false;
        for (const auto& [k, v] : values) {
          if (k == key) {
            out += v;
            replaced = true;
            break;
          }
        }
        if (replaced) {
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string statement_body(std::string_view statement) {
  while (!statement.empty() && std::isspace(static_cast<unsigned char>(statement.back()))) statement.remove_suffix(1);
  if (!statement.empty() && (statement.back() == '.' || statement.back() == '?' || statement.back() == '!')) {
    statement.remove_suffix(1);
  }
  while (!statement.empty() && std::isspace(static_cast<unsigned char>(statement.front()))) statement.remove_prefix(1);
  return std::string(statement);
}

std::string render_hint(const PromptTemplates& t, std::string_view statement) {
  return substitute(t.hint, {{"statement", statement_body(statement)}});
}

std::string render_cot_prompt(const PromptTemplates& t, const ReasoningSample& s) { return render(t.cot, s, ""); }

std::string render_no_cot_prompt(const PromptTemplates& t, const ReasoningSample& s) { return render(t.no_cot, s, ""); }

std::string render_hint_prompt(const PromptTemplates& t, const ReasoningSample& s, std::size_t statement_index) {
  return render(t.cot, s, render_hint(t, s.context_statements.at(statement_index)) + "\n");
}

}  // namespace cotscope
