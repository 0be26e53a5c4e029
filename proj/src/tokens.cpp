#include "cotscope/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "cotscope/error.hpp"

namespace cotscope {

std::string TokenSequence::text() const {
  std::string out;
  for (const auto& t : texts) out += t;
  return out;
}

TokenSequence TokenSequence::slice(IndexRange range) const {
  if (range.end > size() || range.begin > range.end) {
    throw std::out_of_range("token slice out of range");
  }
  TokenSequence out;
  const auto b = static_cast<std::ptrdiff_t>(range.begin);
  const auto e = static_cast<std::ptrdiff_t>(range.end);
  out.tokens.assign(tokens.begin() + b, tokens.begin() + e);
  out.texts.assign(texts.begin() + b, texts.begin() + e);
  if (logprobs) out.logprobs.emplace(logprobs->begin() + b, logprobs->begin() + e);
  return out;
}

void TokenSequence::validate() const {
  if (texts.size() != tokens.size()) {
    throw std::invalid_argument("token/text length mismatch");
  }
  if (logprobs) {
    if (logprobs->size() != tokens.size()) throw std::invalid_argument("token/logprob length mismatch");
    for (double lp : *logprobs) {
      if (!(lp <= 0.0)) throw std::invalid_argument("logprob must be <= 0");
    }
  }
}

std::vector<IndexRange> TokenSequence::char_offsets() const {
  std::vector<IndexRange> out;
  out.reserve(texts.size());
  std::size_t pos = 0;
  for (const auto& t : texts) {
    out.push_back({pos, pos + t.size()});
    pos += t.size();
  }
  return out;
}

TokenSequence concat(const TokenSequence& a, const TokenSequence& b) {
  TokenSequence out = a;
  out.tokens.insert(out.tokens.end(), b.tokens.begin(), b.tokens.end());
  out.texts.insert(out.texts.end(), b.texts.begin(), b.texts.end());
  if (a.logprobs && b.logprobs) {
    out.logprobs->insert(out.logprobs->end(), b.logprobs->begin(), b.logprobs->end());
  } else {
    out.logprobs.reset();
  }
  return out;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> pieces;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    std::size_t start = i;
    while (i < n && is_space(text[i])) ++i;
    if (i == n) {
      // trailing whitespace
      if (!pieces.empty()) pieces.back().append(text.substr(start));
      break;
    }
    while (i < n && !is_space(text[i])) ++i;
    pieces.emplace_back(text.substr(start, i - start));
  }
  return pieces;
}

std::string normalize_word(std::string_view surface) {
  auto s = trim(surface);
  auto core = s;
  while (!core.empty() && std::ispunct(static_cast<unsigned char>(core.front()))) core.remove_prefix(1);
  while (!core.empty() && std::ispunct(static_cast<unsigned char>(core.back()))) core.remove_suffix(1);
  if (core.empty()) core = s;
  std::string out(core);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

TokenId hashed_token_id(std::string_view word) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : word) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<TokenId>(h & 0x7fffffffULL);
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::optional<std::string> unk)
    : words_(std::move(words)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto key = normalize_word(words_[i]);
    if (!index_.emplace(key, static_cast<TokenId>(i)).second) {
      throw std::invalid_argument("duplicate vocabulary entry: " + words_[i]);
    }
  }
  if (unk) {
    auto id = find(*unk);
    if (!id) throw std::invalid_argument("unk word not in vocabulary: " + *unk);
    unk_ = *id;
  }
}

const std::string& Vocabulary::word(TokenId id) const {
  if (!contains(id)) throw UnknownTokenError("unknown token id " + std::to_string(id));
  return words_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view surface) const {
  auto it = index_.find(normalize_word(surface));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenSequence Vocabulary::tokenize(std::string_view text) const {
  TokenSequence out;
  for (auto& piece : split_whitespace(text)) {
    auto id = find(piece);
    if (!id) id = unk_;
    if (!id) throw UnknownTokenError("word not in vocabulary: " + std::string(trim(piece)));
    out.tokens.push_back(*id);
    out.texts.push_back(std::move(piece));
  }
  return out;
}

}  // namespace cotscope
