#pragma once

#include <json.hpp>
#include <string>
#include <string_view>

#include "cotscope/corpus.hpp"

namespace cotscope {

/// Prompt templates with placeholder substitution. Placeholders:
///   {context}   statements joined by single spaces
///   {question}  the question text
///   {options}   "Options: (A) ... (B) ...\n" or empty
///   {hint}      rendered hint line followed by a newline, or empty
///   {statement} (hint template only) the statement, trailing terminator dropped
/// Unknown placeholders are left as-is.
struct PromptTemplates {
  std::string cot =
      "Context: {context}\n{hint}Question: {question}\n{options}"
      "Let's think step by step, then finish with \"the answer is X\".\n";
  std::string no_cot =
      "Context: {context}\nQuestion: {question}\n{options}"
      "Reply only with \"the answer is X\".\n";
  std::string hint = "Hint: you may need the fact that {statement}.";

  static PromptTemplates from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

std::string substitute(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values);

std::string render_cot_prompt(const PromptTemplates& t, const ReasoningSample& s);
std::string render_no_cot_prompt(const PromptTemplates& t, const ReasoningSample& s);
/// CoT prompt with one context statement inserted through the hint template.
std::string render_hint_prompt(const PromptTemplates& t, const ReasoningSample& s, std::size_t statement_index);
std::string render_hint(const PromptTemplates& t, std::string_view statement);

/// Drops one trailing '.', '?' or '!' (and surrounding whitespace).
std::string statement_body(std::string_view statement);

}  // namespace cotscope
