#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cotscope {

using TokenId = std::int32_t;

/// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
  bool empty() const noexcept { return size() == 0; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }

  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Tokens with their surface strings and, optionally, per-token natural-log
/// probabilities conditioned on everything that precedes them.
struct TokenSequence {
  std::vector<TokenId> tokens;
  std::vector<std::string> texts;
  std::optional<std::vector<double>> logprobs;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  /// Concatenation of the token surface strings.
  std::string text() const;

  TokenSequence slice(IndexRange range) const;

  /// Throws std::invalid_argument when lengths disagree or a logprob is positive.
  void validate() const;

  /// Character range of each token inside text().
  std::vector<IndexRange> char_offsets() const;
};

TokenSequence concat(const TokenSequence& a, const TokenSequence& b);

/// Splits text into word tokens. Each piece carries its leading whitespace so
/// the pieces concatenate back to the input; trailing whitespace is attached to
/// the last piece.
std::vector<std::string> split_whitespace(std::string_view text);

/// Lookup key for a surface string: trimmed, lowercased, surrounding
/// punctuation removed.
std::string normalize_word(std::string_view surface);

/// Stable 31-bit id for a word, used by backends without a closed vocabulary.
TokenId hashed_token_id(std::string_view word);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Words are matched through normalize_word. `unk` (if given) must be one of
  /// the words and absorbs out-of-vocabulary input.
  explicit Vocabulary(std::vector<std::string> words, std::optional<std::string> unk = std::nullopt);

  std::size_t size() const noexcept { return words_.size(); }
  const std::string& word(TokenId id) const;
  bool contains(TokenId id) const noexcept { return id >= 0 && static_cast<std::size_t>(id) < words_.size(); }
  std::optional<TokenId> find(std::string_view surface) const;
  std::optional<TokenId> unk() const noexcept { return unk_; }

  /// Whitespace tokenization against this vocabulary. Unknown words map to the
  /// unk id or raise UnknownTokenError.
  TokenSequence tokenize(std::string_view text) const;

  const std::vector<std::string>& words() const noexcept { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
  std::optional<TokenId> unk_;
};

}  // namespace cotscope
