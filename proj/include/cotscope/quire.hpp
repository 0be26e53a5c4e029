#pragma once

#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cotscope/answer.hpp"
#include "cotscope/attribution.hpp"
#include "cotscope/backend.hpp"
#include "cotscope/corpus.hpp"
#include "cotscope/prompts.hpp"

namespace cotscope {

struct QuireConfig {
  int sc_samples = 3;
  int recall_k = 3;
  double vote_temperature = 1.0;
  GenerationParams generation;  // num_samples is set per step
  bool aae_recall = true;       // false: ablation "-AAE Recall", vote over the raw SC paths
  bool ig_vote = true;          // false: ablation "-IG Vote", uniform weights
  bool raw_with_cot = true;     // raw SC step uses the CoT template
  int attribution_steps = 20;
  PromptTemplates prompts;

  void validate() const;
  static QuireConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Wraps a backend generation as a trace with its extracted answer.
ReasoningTrace make_trace(const ReasoningSample& sample, const std::string& prompt, const Generation& g);

/// Generates `params.num_samples` traces for one prompt.
std::vector<ReasoningTrace> sample_traces(const Backend& backend, const ReasoningSample& sample,
                                          const std::string& prompt, const GenerationParams& params);

/// Most frequent extracted answer; ties go to the answer sampled first.
/// `first_index` receives the first trace carrying the winner.
std::optional<std::string> majority_answer(std::span<const ReasoningTrace> traces, std::size_t* first_index = nullptr);

struct RawAnswer {
  std::vector<ReasoningTrace> traces;
  std::optional<std::string> answer;
  std::optional<std::size_t> trace_index;  // attribution target
};

RawAnswer raw_answer(const Backend& backend, const ReasoningSample& sample, const QuireConfig& cfg);

struct RecallResult {
  std::vector<std::string> statement_ids;  // top-k, best first
  std::vector<StatementScore> ranking;
  bool skipped = false;
  std::string note;
};

/// Top-k statements by AAE against the raw answer. k is clamped to the number
/// of statements. A backend without gradients yields skipped = true.
RecallResult aae_recall(const Backend& backend, const ReasoningSample& sample, const ReasoningTrace& raw, int k,
                        const QuireConfig& cfg);

struct EnhancedPath {
  std::string hint_id;
  std::string prompt;
  std::optional<ReasoningTrace> trace;  // nullopt when generation failed
  std::string error;
};

/// One prompt per hint, one CoT per prompt.
std::vector<EnhancedPath> enhanced_generate(const Backend& backend, const ReasoningSample& sample,
                                            const std::vector<std::string>& hint_ids, const QuireConfig& cfg);

struct VoteBallot {
  std::string answer;
  double weight = 0.0;
  std::size_t path_id = 0;
  double ig = 0.0;
};

struct VoteResult {
  std::string answer;
  std::vector<VoteBallot> ballots;
  std::size_t winner_path = 0;  // highest-weight ballot for the winning answer
};

/// softmax(values / temperature), max-shifted.
std::vector<double> softmax_weights(std::span<const double> values, double temperature);

/// Winner = answer with the largest summed weight; exact ties go to the answer
/// whose first ballot comes first. Throws PipelineError on empty input.
VoteResult weighted_vote(std::span<const std::string> answers, std::span<const double> igs, double temperature,
                         bool uniform = false);

/// Scores every trace with an extractable answer by information gain against
/// the plain CoT prompt and votes with softmax weights.
VoteResult ig_vote(const Backend& backend, const ReasoningSample& sample, std::span<const ReasoningTrace> traces,
                   const QuireConfig& cfg);

struct QuireOutcome {
  std::string sample_id;
  RawAnswer raw;
  RecallResult recall;
  std::vector<EnhancedPath> enhanced;
  std::vector<ReasoningTrace> paths;  // the traces that were voted on
  std::optional<VoteResult> vote;
  std::optional<std::string> final_answer;
  std::optional<std::size_t> representative;  // index into paths for rationale scoring
  std::vector<std::string> notes;
};

QuireOutcome run_quire(const Backend& backend, const ReasoningSample& sample, const QuireConfig& cfg);

/// Plain self-consistency baseline: the raw SC paths with an unweighted vote.
QuireOutcome run_self_consistency(const Backend& backend, const ReasoningSample& sample, const QuireConfig& cfg);

nlohmann::json audit_record(const QuireOutcome& outcome);

}  // namespace cotscope
