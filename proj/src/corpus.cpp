#include "cotscope/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "cotscope/answer.hpp"
#include "cotscope/error.hpp"

namespace cotscope {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

const nlohmann::json& required(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw std::invalid_argument(std::string("missing field '") + field + "'");
  return j.at(field);
}

std::string required_string(const nlohmann::json& j, const char* field) {
  const auto& v = required(j, field);
  if (!v.is_string()) throw std::invalid_argument(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string ReasoningSample::statement_id(std::size_t index) { return "S" + std::to_string(index + 1); }

std::optional<std::size_t> ReasoningSample::statement_index(std::string_view id) const {
  for (std::size_t i = 0; i < context_statements.size(); ++i) {
    if (statement_id(i) == id) return i;
  }
  return std::nullopt;
}

std::optional<IndexRange> ReasoningTrace::answer_tokens() const {
  if (!answer_chars || answer_chars->empty()) return std::nullopt;
  const auto offsets = cot.char_offsets();
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i].begin < answer_chars->end && offsets[i].end > answer_chars->begin) {
      if (!first) first = i;
      last = i;
    }
  }
  if (!first) return std::nullopt;
  return IndexRange{*first, last + 1};
}

ReasoningSample sample_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("record must be an object");
  ReasoningSample s;
  s.id = required_string(j, "id");
  if (s.id.empty()) throw std::invalid_argument("field 'id' must be non-empty");
  const auto& ctx = required(j, "context");
  if (ctx.is_string()) {
    s.context_statements = segment_context(ctx.get<std::string>());
  } else if (ctx.is_array()) {
    for (const auto& st : ctx) {
      if (!st.is_string()) throw std::invalid_argument("field 'context' must hold strings");
      s.context_statements.push_back(st.get<std::string>());
    }
  } else {
    throw std::invalid_argument("field 'context' must be a string or an array of strings");
  }
  s.question = required_string(j, "question");
  if (j.contains("options") && !j.at("options").is_null()) {
    for (const auto& o : j.at("options")) {
      auto label = required_string(o, "label");
      std::transform(label.begin(), label.end(), label.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      s.options.push_back({std::move(label), required_string(o, "text")});
    }
  }
  const auto raw_answer = required_string(j, "answer");
  if (j.contains("rationale") && !j.at("rationale").is_null()) s.gold_rationale = required_string(j, "rationale");

  TaskKind kind = TaskKind::free_form;
  if (!s.options.empty()) {
    kind = TaskKind::multiple_choice;
  } else if (normalize_answer(raw_answer, TaskKind::true_false)) {
    kind = TaskKind::true_false;
  }
  auto norm = normalize_answer(raw_answer, kind);
  if (!norm) throw std::invalid_argument("field 'answer' is not a valid answer: '" + raw_answer + "'");
  s.gold_answer = *norm;
  if (!s.options.empty()) {
    const bool listed = std::any_of(s.options.begin(), s.options.end(), [&](const AnswerOption& o) {
      return normalize_answer(o.label, TaskKind::multiple_choice) == s.gold_answer;
    });
    if (!listed) throw std::invalid_argument("field 'answer' does not match any option label");
  }
  return s;
}

nlohmann::json sample_to_json(const ReasoningSample& s) {
  nlohmann::json j;
  j["id"] = s.id;
  j["context"] = s.context_statements;
  j["question"] = s.question;
  if (!s.options.empty()) {
    auto opts = nlohmann::json::array();
    for (const auto& o : s.options) opts.push_back({{"label", o.label}, {"text", o.text}});
    j["options"] = std::move(opts);
  }
  j["answer"] = s.gold_answer;
  if (s.gold_rationale) j["rationale"] = *s.gold_rationale;
  return j;
}

CorpusLoadResult parse_corpus(std::istream& in) {
  CorpusLoadResult result;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto sample = sample_from_json(nlohmann::json::parse(line));
      if (!seen.insert(sample.id).second) throw std::invalid_argument("duplicate id '" + sample.id + "'");
      result.samples.push_back(std::move(sample));
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({lineno, e.what()});
    } catch (const std::invalid_argument& e) {
      result.errors.push_back({lineno, e.what()});
    }
  }
  return result;
}

CorpusLoadResult load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path.string());
  return parse_corpus(in);
}

std::vector<ReasoningSample> load_corpus_strict(const std::filesystem::path& path) {
  auto r = load_corpus(path);
  if (!r.errors.empty()) throw SchemaError(r.errors.front().line, r.errors.front().message);
  return std::move(r.samples);
}

void write_corpus(std::ostream& out, const std::vector<ReasoningSample>& samples) {
  for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
}

void save_corpus(const std::filesystem::path& path, const std::vector<ReasoningSample>& samples) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus " + path.string());
  write_corpus(out, samples);
}

const std::vector<std::string>& abbreviation_guards() {
  static const std::vector<std::string> guards{"Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "St.", "Jr.", "Sr.",
                                               "vs.", "etc.", "e.g.", "i.e.", "No.", "Fig.", "approx."};
  return guards;
}

std::vector<std::string> segment_context(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto piece = trim(raw.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end;
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (i + 1 < raw.size() && !is_space(raw[i + 1])) continue;
    if (c == '.') {
      // word ending at i (inclusive)
      std::size_t w = i;
      while (w > 0 && !is_space(raw[w - 1])) --w;
      const auto word = raw.substr(w, i + 1 - w);
      const auto& guards = abbreviation_guards();
      if (std::find(guards.begin(), guards.end(), word) != guards.end()) continue;
    }
    emit(i + 1);
  }
  emit(raw.size());
  return out;
}

}  // namespace cotscope
