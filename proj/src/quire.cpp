#include "cotscope/quire.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cotscope/error.hpp"
#include "cotscope/info_metrics.hpp"

namespace cotscope {

void QuireConfig::validate() const {
  if (sc_samples < 1) throw ConfigError("quire: sc_samples must be >= 1");
  if (recall_k < 1) throw ConfigError("quire: recall_k must be >= 1");
  if (!(vote_temperature > 0.0)) throw ConfigError("quire: vote_temperature must be positive");
  if (attribution_steps < 1) throw ConfigError("quire: attribution_steps must be >= 1");
  generation.validate();
}

QuireConfig QuireConfig::from_json(const nlohmann::json& j) {
  QuireConfig c;
  c.sc_samples = j.value("sc_samples", c.sc_samples);
  c.recall_k = j.value("recall_k", c.recall_k);
  c.vote_temperature = j.value("vote_temperature", c.vote_temperature);
  c.aae_recall = j.value("aae_recall", c.aae_recall);
  c.ig_vote = j.value("ig_vote", c.ig_vote);
  c.raw_with_cot = j.value("raw_with_cot", c.raw_with_cot);
  c.attribution_steps = j.value("attribution_steps", c.attribution_steps);
  c.validate();
  return c;
}

nlohmann::json QuireConfig::to_json() const {
  return {{"sc_samples", sc_samples},   {"recall_k", recall_k},
          {"vote_temperature", vote_temperature}, {"aae_recall", aae_recall},
          {"ig_vote", ig_vote},         {"raw_with_cot", raw_with_cot},
          {"attribution_steps", attribution_steps}};
}

ReasoningTrace make_trace(const ReasoningSample& sample, const std::string& prompt, const Generation& g) {
  ReasoningTrace t;
  t.sample_id = sample.id;
  t.prompt = prompt;
  t.cot = g.tokens;
  t.cot_text = g.text;
  t.params = g.params;
  const auto ans = extract_answer(g.text, task_kind(sample));
  t.answer_text = ans.raw;
  t.answer = ans.value;
  t.answer_chars = ans.chars;
  return t;
}

std::vector<ReasoningTrace> sample_traces(const Backend& backend, const ReasoningSample& sample,
                                          const std::string& prompt, const GenerationParams& params) {
  std::vector<ReasoningTrace> out;
  for (const auto& g : backend.generate(backend.tokenize(prompt), params)) out.push_back(make_trace(sample, prompt, g));
  return out;
}

std::optional<std::string> majority_answer(std::span<const ReasoningTrace> traces, std::size_t* first_index) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<int, std::size_t>> tally;  // count, first index
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!traces[i].answer) continue;
    auto [it, fresh] = tally.try_emplace(*traces[i].answer, 0, i);
    if (fresh) order.push_back(*traces[i].answer);
    ++it->second.first;
  }
  if (order.empty()) return std::nullopt;
  const std::string* best = &order.front();
  for (const auto& a : order) {
    if (tally[a].first > tally[*best].first) best = &a;
  }
  if (first_index) *first_index = tally[*best].second;
  return *best;
}

RawAnswer raw_answer(const Backend& backend, const ReasoningSample& sample, const QuireConfig& cfg) {
  GenerationParams p = cfg.generation;
  p.num_samples = cfg.sc_samples;
  const auto prompt = cfg.raw_with_cot ? render_cot_prompt(cfg.prompts, sample) : render_no_cot_prompt(cfg.prompts, sample);
  RawAnswer r;
  r.traces = sample_traces(backend, sample, prompt, p);
  std::size_t idx = 0;
  r.answer = majority_answer(r.traces, &idx);
  if (r.answer) r.trace_index = idx;
  return r;
}

RecallResult aae_recall(const Backend& backend, const ReasoningSample& sample, const ReasoningTrace& raw, int k,
                        const QuireConfig& cfg) {
  if (k < 1) throw std::invalid_argument("aae_recall: k must be >= 1");
  RecallResult r;
  if (!backend.supports(Capability::gradient) || !backend.supports(Capability::embeddings)) {
    r.skipped = true;
    r.note = "backend has no gradient capability; recall skipped";
    return r;
  }
  const std::size_t n = sample.context_statements.size();
  std::size_t kk = static_cast<std::size_t>(k);
  if (kk > n) {
    r.note = "recall_k " + std::to_string(k) + " clamped to " + std::to_string(n) + " statements";
    kk = n;
  }
  r.ranking = rank_statements(backend, sample, raw, AttributionOptions{cfg.attribution_steps});
  for (std::size_t i = 0; i < kk; ++i) r.statement_ids.push_back(r.ranking[i].statement_id);
  return r;
}

std::vector<EnhancedPath> enhanced_generate(const Backend& backend, const ReasoningSample& sample,
                                            const std::vector<std::string>& hint_ids, const QuireConfig& cfg) {
  std::vector<EnhancedPath> out;
  for (std::size_t i = 0; i < hint_ids.size(); ++i) {
    EnhancedPath path;
    path.hint_id = hint_ids[i];
    const auto idx = sample.statement_index(hint_ids[i]);
    if (!idx) throw std::invalid_argument("enhanced_generate: unknown statement id " + hint_ids[i]);
    path.prompt = render_hint_prompt(cfg.prompts, sample, *idx);
    GenerationParams p = cfg.generation;
    p.num_samples = 1;
    p.seed = cfg.generation.seed + 1 + i;
    try {
      auto traces = sample_traces(backend, sample, path.prompt, p);
      path.trace = std::move(traces.front());
    } catch (const Error& e) {
      path.error = e.what();
    }
    out.push_back(std::move(path));
  }
  return out;
}

std::vector<double> softmax_weights(std::span<const double> values, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
  if (values.empty()) return {};
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> w(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    w[i] = std::exp((values[i] - top) / temperature);
    sum += w[i];
  }
  for (auto& x : w) x /= sum;
  return w;
}

VoteResult weighted_vote(std::span<const std::string> answers, std::span<const double> igs, double temperature,
                         bool uniform) {
  if (answers.size() != igs.size()) throw std::invalid_argument("weighted_vote: answers and igs differ in length");
  if (answers.empty()) throw PipelineError("no extractable answers to vote on");
  std::vector<double> w;
  if (uniform) {
    w.assign(answers.size(), 1.0 / static_cast<double>(answers.size()));
  } else {
    w = softmax_weights(igs, temperature);
  }
  VoteResult r;
  std::vector<std::string> order;
  std::map<std::string, double> total;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    r.ballots.push_back({answers[i], w[i], i, igs[i]});
    if (total.emplace(answers[i], 0.0).second) order.push_back(answers[i]);
  }
  // Sum in ballot order so equal weight multisets give bit-identical totals.
  for (const auto& b : r.ballots) total[b.answer] += b.weight;
  const std::string* best = &order.front();
  for (const auto& a : order) {
    if (total[a] > total[*best]) best = &a;
  }
  r.answer = *best;
  double top = -1.0;
  for (const auto& b : r.ballots) {
    if (b.answer == r.answer && b.weight > top) {
      top = b.weight;
      r.winner_path = b.path_id;
    }
  }
  return r;
}

VoteResult ig_vote(const Backend& backend, const ReasoningSample& sample, std::span<const ReasoningTrace> traces,
                   const QuireConfig& cfg) {
  const auto question = backend.tokenize(render_cot_prompt(cfg.prompts, sample));
  std::vector<std::string> answers;
  std::vector<double> igs;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!traces[i].answer || traces[i].cot.empty()) continue;
    answers.push_back(*traces[i].answer);
    igs.push_back(cfg.ig_vote ? information_gain(backend, question, traces[i].cot).ig : 0.0);
    ids.push_back(i);
  }
  auto r = weighted_vote(answers, igs, cfg.vote_temperature, !cfg.ig_vote);
  for (auto& b : r.ballots) b.path_id = ids[b.path_id];
  r.winner_path = ids[r.winner_path];
  return r;
}

namespace {

void finish_vote(const Backend& backend, const ReasoningSample& sample, const QuireConfig& cfg, QuireOutcome& out) {
  const bool any = std::any_of(out.paths.begin(), out.paths.end(), [](const ReasoningTrace& t) { return t.answer.has_value(); });
  if (!any) {
    out.notes.push_back("no extractable answers on any path");
    if (!out.paths.empty()) out.representative = 0;
    return;
  }
  out.vote = ig_vote(backend, sample, out.paths, cfg);
  out.final_answer = out.vote->answer;
  out.representative = out.vote->winner_path;
}

}  // namespace

QuireOutcome run_quire(const Backend& backend, const ReasoningSample& sample, const QuireConfig& cfg) {
  cfg.validate();
  QuireOutcome out;
  out.sample_id = sample.id;
  out.raw = raw_answer(backend, sample, cfg);

  bool use_hints = cfg.aae_recall;
  if (use_hints && !out.raw.answer) {
    out.notes.push_back("raw answer unavailable; falling back to plain SC paths");
    use_hints = false;
  }
  if (use_hints) {
    out.recall = aae_recall(backend, sample, out.raw.traces[*out.raw.trace_index], cfg.recall_k, cfg);
    if (!out.recall.note.empty()) out.notes.push_back(out.recall.note);
    if (out.recall.skipped || out.recall.statement_ids.empty()) use_hints = false;
  } else if (!cfg.aae_recall) {
    out.recall.skipped = true;
    out.recall.note = "AAE recall disabled";
  }

  if (use_hints) {
    out.enhanced = enhanced_generate(backend, sample, out.recall.statement_ids, cfg);
    for (const auto& p : out.enhanced) {
      if (p.trace) {
        out.paths.push_back(*p.trace);
      } else {
        out.notes.push_back("path " + p.hint_id + " dropped: " + p.error);
      }
    }
    if (out.paths.empty()) {
      out.notes.push_back("every enhanced path failed; falling back to plain SC paths");
      out.paths = out.raw.traces;
    }
  } else {
    out.paths = out.raw.traces;
  }
  finish_vote(backend, sample, cfg, out);
  return out;
}

QuireOutcome run_self_consistency(const Backend& backend, const ReasoningSample& sample, const QuireConfig& cfg) {
  QuireConfig sc = cfg;
  sc.aae_recall = false;
  sc.ig_vote = false;
  sc.validate();
  QuireOutcome out;
  out.sample_id = sample.id;
  out.raw = raw_answer(backend, sample, sc);
  out.recall.skipped = true;
  out.recall.note = "plain self-consistency";
  out.paths = out.raw.traces;
  finish_vote(backend, sample, sc, out);
  return out;
}

nlohmann::json audit_record(const QuireOutcome& o) {
  auto trace_json = [](const ReasoningTrace& t) {
    nlohmann::json j{{"cot", t.cot_text}, {"answer_text", t.answer_text}};
    j["answer"] = t.answer ? nlohmann::json(*t.answer) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json j;
  j["sample_id"] = o.sample_id;
  j["raw_traces"] = nlohmann::json::array();
  for (const auto& t : o.raw.traces) j["raw_traces"].push_back(trace_json(t));
  j["raw_answer"] = o.raw.answer ? nlohmann::json(*o.raw.answer) : nlohmann::json(nullptr);
  j["recalled"] = o.recall.statement_ids;
  j["recall_skipped"] = o.recall.skipped;
  j["paths"] = nlohmann::json::array();
  for (std::size_t i = 0; i < o.paths.size(); ++i) {
    auto p = trace_json(o.paths[i]);
    p["prompt"] = o.paths[i].prompt;
    if (o.vote) {
      for (const auto& b : o.vote->ballots) {
        if (b.path_id == i) {
          p["ig"] = b.ig;
          p["weight"] = b.weight;
        }
      }
    }
    j["paths"].push_back(std::move(p));
  }
  j["final_answer"] = o.final_answer ? nlohmann::json(*o.final_answer) : nlohmann::json(nullptr);
  j["notes"] = o.notes;
  return j;
}

}  // namespace cotscope
