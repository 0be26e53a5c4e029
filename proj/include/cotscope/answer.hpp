#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cotscope/corpus.hpp"
#include "cotscope/tokens.hpp"

namespace cotscope {

enum class TaskKind { true_false, multiple_choice, free_form };

/// multiple_choice when the sample has options, true_false when the gold
/// answer is true/false/unknown, free_form otherwise.
TaskKind task_kind(const ReasoningSample& sample);

/// Canonical form of an answer string: true/false/unknown for true_false,
/// an upper-case option label for multiple_choice, and lowercased text with
/// currency signs, digit-group commas and trailing punctuation removed for
/// free_form. nullopt when the string is not a valid answer of that kind.
std::optional<std::string> normalize_answer(std::string_view raw, TaskKind kind);

struct ExtractedAnswer {
  std::optional<std::string> value;  // normalized, nullopt on failure
  std::string raw;                   // matched answer text
  std::optional<IndexRange> chars;   // where `raw` sits in the generation

  bool ok() const noexcept { return value.has_value(); }
};

/// Finds the last "the answer is X" / "Answer: X" occurrence (case-insensitive)
/// and normalizes X. Never throws; failure is reported through `value`.
ExtractedAnswer extract_answer(std::string_view generation, TaskKind kind);

}  // namespace cotscope
