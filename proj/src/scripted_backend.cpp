#include "cotscope/scripted_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cotscope/error.hpp"

namespace cotscope {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void check_prob(double p, const std::string& where) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("scripted table: probability in " + where + " must lie in (0, 1]");
}

}  // namespace

bool pattern_matches(std::string_view pattern, std::string_view text) {
  if (pattern == "*") return true;
  if (pattern.empty()) return trim(text).empty();
  return text.find(pattern) != std::string_view::npos;
}

ScriptedTable ScriptedTable::from_json(const nlohmann::json& j) {
  ScriptedTable t;
  if (j.contains("continuations")) {
    for (const auto& e : j.at("continuations")) {
      ScriptedContinuation c;
      c.pattern = e.at("pattern").get<std::string>();
      c.continuation = e.at("continuation").get<std::string>();
      c.prob = e.value("prob", 1.0);
      check_prob(c.prob, "continuation '" + c.pattern + "'");
      t.continuations.push_back(std::move(c));
    }
  }
  if (j.contains("scores")) {
    for (const auto& e : j.at("scores")) {
      ScriptedScoreRule r;
      r.context = e.value("context", std::string("*"));
      if (e.contains("token")) r.token = e.at("token").get<std::string>();
      if (e.contains("position")) r.position = e.at("position").get<std::size_t>();
      r.prob = e.at("prob").get<double>();
      check_prob(r.prob, "score rule '" + r.context + "'");
      t.scores.push_back(std::move(r));
    }
  }
  t.default_prob = j.value("default_prob", 1.0);
  check_prob(t.default_prob, "default_prob");
  t.context_length = j.value("context_length", std::size_t{4096});
  const auto draw = j.value("draw", std::string("weighted"));
  if (draw == "weighted") {
    t.draw = DrawMode::weighted;
  } else if (draw == "cycle") {
    t.draw = DrawMode::cycle;
  } else {
    throw ConfigError("scripted table: unknown draw mode '" + draw + "'");
  }
  return t;
}

nlohmann::json ScriptedTable::to_json() const {
  nlohmann::json j;
  j["continuations"] = nlohmann::json::array();
  for (const auto& c : continuations) {
    j["continuations"].push_back({{"pattern", c.pattern}, {"continuation", c.continuation}, {"prob", c.prob}});
  }
  j["scores"] = nlohmann::json::array();
  for (const auto& r : scores) {
    nlohmann::json e{{"context", r.context}, {"prob", r.prob}};
    if (r.token) e["token"] = *r.token;
    if (r.position) e["position"] = *r.position;
    j["scores"].push_back(std::move(e));
  }
  j["default_prob"] = default_prob;
  j["context_length"] = context_length;
  j["draw"] = draw == DrawMode::cycle ? "cycle" : "weighted";
  return j;
}

ScriptedBackend::ScriptedBackend(ScriptedTable table) : table_(std::move(table)) {}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendUnavailableError("cannot open scripted table " + path.string());
  return ScriptedBackend(ScriptedTable::from_json(nlohmann::json::parse(in)));
}

TokenSequence ScriptedBackend::tokenize(std::string_view text) const {
  TokenSequence out;
  for (auto& piece : split_whitespace(text)) {
    out.tokens.push_back(hashed_token_id(trim(piece)));
    out.texts.push_back(std::move(piece));
  }
  return out;
}

double ScriptedBackend::token_probability(std::string_view prefix_text, std::string_view token_text,
                                          std::size_t position) const {
  const auto tok = trim(token_text);
  for (const auto& rule : table_.scores) {
    if (rule.token && trim(*rule.token) != tok) continue;
    if (rule.position && *rule.position != position) continue;
    if (!pattern_matches(rule.context, prefix_text)) continue;
    return rule.prob;
  }
  return table_.default_prob;
}

TokenSequence ScriptedBackend::do_score(const TokenSequence& prefix, const TokenSequence& continuation) const {
  const std::string prefix_text = prefix.text();
  TokenSequence out = continuation;
  std::vector<double> lps;
  lps.reserve(continuation.size());
  for (std::size_t i = 0; i < continuation.size(); ++i) {
    lps.push_back(std::log(token_probability(prefix_text, continuation.texts[i], i)));
  }
  out.logprobs = std::move(lps);
  return out;
}

std::vector<Generation> ScriptedBackend::do_generate(const TokenSequence& prompt, const GenerationParams& params) const {
  const std::string text = prompt.text();
  std::vector<const ScriptedContinuation*> group;
  for (const auto& c : table_.continuations) {
    if (group.empty()) {
      if (pattern_matches(c.pattern, text)) group.push_back(&c);
    } else if (c.pattern == group.front()->pattern) {
      group.push_back(&c);
    }
  }
  if (group.empty()) throw BackendUnavailableError("scripted backend: no continuation matches the prompt");

  std::vector<Generation> out;
  for (int s = 0; s < params.num_samples; ++s) {
    std::size_t pick = 0;
    if (params.temperature == 0.0) {
      for (std::size_t i = 1; i < group.size(); ++i) {
        if (group[i]->prob > group[pick]->prob) pick = i;
      }
    } else if (table_.draw == DrawMode::cycle) {
      pick = static_cast<std::size_t>((params.seed + static_cast<std::uint64_t>(s)) % group.size());
    } else {
      std::vector<double> w;
      w.reserve(group.size());
      for (const auto* c : group) w.push_back(std::pow(c->prob, 1.0 / params.temperature));
      auto rng = sample_rng(params.seed, s);
      std::discrete_distribution<std::size_t> draw(w.begin(), w.end());
      pick = draw(rng);
    }
    TokenSequence toks = tokenize(group[pick]->continuation);
    const auto room = std::min<std::size_t>(static_cast<std::size_t>(params.max_new_tokens),
                                            context_length() - prompt.size());
    if (toks.size() > room) toks = toks.slice({0, room});
    Generation g;
    g.params = params;
    g.sample_index = s;
    g.tokens = toks.empty() ? toks : do_score(prompt, toks);
    if (g.tokens.empty()) g.tokens.logprobs.emplace();
    g.text = g.tokens.text();
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace cotscope
