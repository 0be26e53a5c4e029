#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cotscope/backend.hpp"

namespace cotscope {

/// Pattern semantics shared by generation and scoring rules:
///   "*"   matches any text, including the empty string
///   ""    matches only the empty (all-whitespace) text
///   other matches when the text contains it as a substring
bool pattern_matches(std::string_view pattern, std::string_view text);

/// prompt-pattern -> continuation, probability
struct ScriptedContinuation {
  std::string pattern;
  std::string continuation;
  double prob = 1.0;
};

/// Probability assigned to a continuation token. A rule applies when its
/// context pattern matches the scoring prefix and its optional token/position
/// constraints hold; the first applicable rule wins.
struct ScriptedScoreRule {
  std::string context = "*";
  std::optional<std::string> token;
  std::optional<std::size_t> position;
  double prob = 1.0;
};

enum class DrawMode {
  weighted,  // sample candidates by prob^(1/T)
  cycle,     // sample s takes candidate (seed + s) mod n
};

struct ScriptedTable {
  std::vector<ScriptedContinuation> continuations;
  std::vector<ScriptedScoreRule> scores;
  double default_prob = 1.0;
  std::size_t context_length = 4096;
  DrawMode draw = DrawMode::weighted;

  static ScriptedTable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Deterministic prompt -> text backend with a settable conditional table. It
/// has no embedding space. Token ids are hashes of the words; scoring looks at
/// token surface strings only, so it accepts sequences tokenized elsewhere.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(ScriptedTable table);

  static ScriptedBackend load(const std::filesystem::path& path);

  std::string_view name() const override { return "scripted"; }
  Capabilities capabilities() const override { return {Capability::score, Capability::generate}; }
  std::size_t context_length() const override { return table_.context_length; }
  TokenSequence tokenize(std::string_view text) const override;

  const ScriptedTable& table() const noexcept { return table_; }

  /// Probability the table assigns to `token_text` at `position` after `prefix_text`.
  double token_probability(std::string_view prefix_text, std::string_view token_text, std::size_t position) const;

 protected:
  TokenSequence do_score(const TokenSequence& prefix, const TokenSequence& continuation) const override;
  std::vector<Generation> do_generate(const TokenSequence& prompt, const GenerationParams& params) const override;

 private:
  ScriptedTable table_;
};

}  // namespace cotscope
