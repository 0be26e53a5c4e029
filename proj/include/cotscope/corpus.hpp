#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotscope/backend.hpp"
#include "cotscope/tokens.hpp"

namespace cotscope {

struct AnswerOption {
  std::string label;  // "A", "B", ...
  std::string text;

  friend bool operator==(const AnswerOption&, const AnswerOption&) = default;
};

/// One dataset row.
struct ReasoningSample {
  std::string id;
  std::vector<std::string> context_statements;
  std::string question;
  std::vector<AnswerOption> options;
  std::string gold_answer;  // normalized
  std::optional<std::string> gold_rationale;

  /// "S1", "S2", ... in context order.
  static std::string statement_id(std::size_t index);
  /// Index of a statement id, or nullopt when it does not name a statement.
  std::optional<std::size_t> statement_index(std::string_view id) const;

  friend bool operator==(const ReasoningSample&, const ReasoningSample&) = default;
};

/// A generated CoT with its extracted answer and provenance.
struct ReasoningTrace {
  std::string sample_id;
  std::string prompt;
  TokenSequence cot;
  std::string cot_text;
  std::string answer_text;            // raw matched answer string
  std::optional<std::string> answer;  // normalized; nullopt on extraction failure
  std::optional<IndexRange> answer_chars;  // character range of answer_text in cot_text
  GenerationParams params;

  /// Token range inside `cot` that covers answer_chars.
  std::optional<IndexRange> answer_tokens() const;
};

struct CorpusLoadError {
  std::size_t line = 0;
  std::string message;
};

struct CorpusLoadResult {
  std::vector<ReasoningSample> samples;
  std::vector<CorpusLoadError> errors;
};

/// Line-delimited JSON, one record per line:
///   {"id": str, "context": [str...] | str, "question": str,
///    "options": [{"label": str, "text": str}...] (optional),
///    "answer": str, "rationale": str (optional)}
/// A string context is split with segment_context. Blank lines are skipped.
/// Malformed records are reported with their line number and left out.
CorpusLoadResult parse_corpus(std::istream& in);
CorpusLoadResult load_corpus(const std::filesystem::path& path);

/// Throws SchemaError for the first malformed record.
std::vector<ReasoningSample> load_corpus_strict(const std::filesystem::path& path);

ReasoningSample sample_from_json(const nlohmann::json& j);
nlohmann::json sample_to_json(const ReasoningSample& s);
void write_corpus(std::ostream& out, const std::vector<ReasoningSample>& samples);
void save_corpus(const std::filesystem::path& path, const std::vector<ReasoningSample>& samples);

/// Splits free text at '.', '?' and '!' followed by whitespace or end of
/// text, except after a guarded abbreviation. Returns trimmed statements.
std::vector<std::string> segment_context(std::string_view raw_context);

/// Default abbreviation guard list used by segment_context.
const std::vector<std::string>& abbreviation_guards();

}  // namespace cotscope
