#include "cotscope/answer.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace cotscope {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view strip_punct(std::string_view s) {
  while (!s.empty() && (is_punct(s.front()) || is_space(s.front()))) s.remove_prefix(1);
  while (!s.empty() && (is_punct(s.back()) || is_space(s.back()))) s.remove_suffix(1);
  return s;
}

// First whitespace-delimited word of s, as [begin, end) offsets into s.
std::pair<std::size_t, std::size_t> first_word(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = b;
  while (e < s.size() && !is_space(s[e])) ++e;
  return {b, e};
}

// Extent of a free-form answer: up to the first sentence end or newline.
std::size_t free_form_end(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') return i;
    if ((s[i] == '.' || s[i] == '!' || s[i] == '?') && (i + 1 == s.size() || is_space(s[i + 1]))) return i;
  }
  return s.size();
}

}  // namespace

TaskKind task_kind(const ReasoningSample& sample) {
  if (!sample.options.empty()) return TaskKind::multiple_choice;
  if (normalize_answer(sample.gold_answer, TaskKind::true_false)) return TaskKind::true_false;
  return TaskKind::free_form;
}

std::optional<std::string> normalize_answer(std::string_view raw, TaskKind kind) {
  switch (kind) {
    case TaskKind::true_false: {
      const auto w = lower(strip_punct(raw));
      if (w == "true" || w == "false" || w == "unknown") return w;
      return std::nullopt;
    }
    case TaskKind::multiple_choice: {
      const auto w = strip_punct(raw);
      if (w.size() == 1 && std::isalpha(static_cast<unsigned char>(w[0]))) {
        return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(w[0]))));
      }
      return std::nullopt;
    }
    case TaskKind::free_form: {
      std::string out;
      const auto t = trim(raw);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const char c = t[i];
        if (c == '$') continue;
        const bool digit_group = c == ',' && i > 0 && i + 1 < t.size() &&
                                 std::isdigit(static_cast<unsigned char>(t[i - 1])) &&
                                 std::isdigit(static_cast<unsigned char>(t[i + 1]));
        if (digit_group) continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
      while (!out.empty() && (is_punct(out.back()) || is_space(out.back()))) out.pop_back();
      std::size_t lead = 0;
      while (lead < out.size() && is_space(out[lead])) ++lead;
      out.erase(0, lead);
      if (out.empty()) return std::nullopt;
      return out;
    }
  }
  return std::nullopt;
}

ExtractedAnswer extract_answer(std::string_view generation, TaskKind kind) {
  static const std::regex marker(R"((the answer is|answer\s*:)[ \t]*)", std::regex::icase);

  ExtractedAnswer out;
  std::optional<std::size_t> value_start;
  const std::string text(generation);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), marker); it != std::sregex_iterator(); ++it) {
    value_start = static_cast<std::size_t>(it->position(0) + it->length(0));
  }
  if (!value_start) return out;

  const std::string_view rest = std::string_view(text).substr(*value_start);
  std::size_t b = 0;
  std::size_t e = 0;
  if (kind == TaskKind::free_form) {
    e = free_form_end(rest);
    while (b < e && is_space(rest[b])) ++b;
    while (e > b && is_space(rest[e - 1])) --e;
  } else {
    std::tie(b, e) = first_word(rest);
    // Trim trailing sentence punctuation but keep a closing paren of "(B)".
    while (e > b && is_punct(rest[e - 1]) && rest[e - 1] != ')') --e;
  }
  out.raw = std::string(rest.substr(b, e - b));
  out.chars = IndexRange{*value_start + b, *value_start + e};
  out.value = normalize_answer(out.raw, kind);
  return out;
}

}  // namespace cotscope
