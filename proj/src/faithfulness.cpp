#include "cotscope/faithfulness.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "cotscope/error.hpp"

namespace cotscope {

namespace {

std::map<std::string, int> word_counts(std::string_view text) {
  std::map<std::string, int> counts;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      ++counts[cur];
      cur.clear();
    }
  }
  if (!cur.empty()) ++counts[cur];
  return counts;
}

}  // namespace

std::string_view to_string(JudgeSource s) {
  return s == JudgeSource::human_label_file ? "human-label-file" : "rule-based";
}

double TokenF1Scorer::score(std::string_view candidate, std::string_view reference) const {
  const auto a = word_counts(candidate);
  const auto b = word_counts(reference);
  int na = 0;
  int nb = 0;
  for (const auto& [w, c] : a) na += c;
  for (const auto& [w, c] : b) nb += c;
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  int overlap = 0;
  for (const auto& [w, c] : a) {
    auto it = b.find(w);
    if (it != b.end()) overlap += std::min(c, it->second);
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / na;
  const double recall = static_cast<double>(overlap) / nb;
  return 2.0 * precision * recall / (precision + recall);
}

std::unique_ptr<SimilarityScorer> make_scorer(std::string_view name) {
  if (name == "token-f1") return std::make_unique<TokenF1Scorer>();
  throw ConfigError("unknown similarity scorer '" + std::string(name) + "'");
}

LabelMap parse_labels(std::istream& in) {
  LabelMap labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto id = j.at("id").get<std::string>();
      if (!labels.emplace(id, j.at("cot_correct").get<bool>()).second) {
        throw SchemaError(lineno, "duplicate label for '" + id + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(lineno, e.what());
    }
  }
  return labels;
}

LabelMap load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file " + path.string());
  return parse_labels(in);
}

ConsistencyLabel judge_consistency(const ReasoningTrace& trace, const ReasoningSample& sample, const LabelMap* labels,
                                   const SimilarityScorer& scorer, const JudgeOptions& options) {
  ConsistencyLabel l;
  l.answer_correct = trace.answer && *trace.answer == sample.gold_answer;
  if (labels) {
    if (auto it = labels->find(sample.id); it != labels->end()) {
      l.cot_correct = it->second;
      l.judge_source = JudgeSource::human_label_file;
      return l;
    }
  }
  if (!sample.gold_rationale) {
    throw JudgingUnavailableError("sample " + sample.id + ": no CoT label and no gold rationale");
  }
  l.cot_correct = scorer.score(trace.cot_text, *sample.gold_rationale) >= options.tau;
  l.judge_source = JudgeSource::rule_based;
  return l;
}

void ConsistencyGrid::add(const ConsistencyLabel& l) {
  if (l.cot_correct) {
    ++(l.answer_correct ? cot_ok_answer_ok : cot_ok_answer_wrong);
  } else {
    ++(l.answer_correct ? cot_wrong_answer_ok : cot_wrong_answer_wrong);
  }
}

FaithfulnessScores fbs(std::span<const FbsItem> items) {
  if (items.empty()) throw std::invalid_argument("fbs needs at least one sample");
  FaithfulnessScores s;
  s.n = items.size();
  double bs_sum = 0.0;
  double fbs_sum = 0.0;
  for (const auto& it : items) {
    const double eta = it.answer_correct ? 1.0 : 0.0;
    bs_sum += it.bs;
    fbs_sum += eta * it.bs + (1.0 - eta) * (1.0 - it.bs);
  }
  s.bs = bs_sum / static_cast<double>(s.n);
  s.fbs = fbs_sum / static_cast<double>(s.n);
  return s;
}

FaithfulnessScores fbs(std::span<const ReasoningTrace> traces, std::span<const ReasoningSample> samples,
                       const SimilarityScorer& scorer) {
  if (traces.size() != samples.size()) throw std::invalid_argument("fbs: traces and samples differ in length");
  std::vector<FbsItem> items;
  items.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!samples[i].gold_rationale) throw std::invalid_argument("fbs: sample " + samples[i].id + " has no gold rationale");
    items.push_back({traces[i].answer && *traces[i].answer == samples[i].gold_answer,
                     scorer.score(traces[i].cot_text, *samples[i].gold_rationale)});
  }
  return fbs(items);
}

}  // namespace cotscope
