#include "cotscope/config.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cotscope/backend_factory.hpp"
#include "cotscope/error.hpp"

namespace cotscope {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  try {
    c.experiment = j.value("experiment", c.experiment);
    if (!j.contains("backend")) throw ConfigError("config: 'backend' is required");
    c.backend = j.at("backend");
    if (!j.contains("corpus")) throw ConfigError("config: 'corpus' is required");
    c.corpus = j.at("corpus").get<std::string>();
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (c.workers == 0) throw ConfigError("config: workers must be >= 1");

    c.generation.seed = c.seed;
    if (j.contains("generation")) {
      const auto& g = j.at("generation");
      c.generation.temperature = g.value("temperature", c.generation.temperature);
      c.generation.max_new_tokens = g.value("max_new_tokens", c.generation.max_new_tokens);
      c.generation.seed = g.value("seed", c.generation.seed);
    }
    c.generation.num_samples = 1;
    c.generation.validate();

    if (j.contains("attribution")) c.attribution_steps = j.at("attribution").value("steps", c.attribution_steps);
    if (c.attribution_steps < 1) throw ConfigError("config: attribution.steps must be >= 1");
    if (j.contains("flow")) c.n_bins = j.at("flow").value("n_bins", c.n_bins);
    if (c.n_bins < 2) throw ConfigError("config: flow.n_bins must be >= 2");

    if (j.contains("difficulty")) {
      const auto& d = j.at("difficulty");
      c.difficulty_k = d.value("k", c.difficulty_k);
      c.difficulty_temperature = d.value("temperature", c.difficulty_temperature);
      if (d.contains("thresholds")) {
        auto t = d.at("thresholds").get<std::vector<double>>();
        if (t.size() != 4) throw ConfigError("config: difficulty.thresholds needs 4 lower bounds");
        std::copy(t.begin(), t.end(), c.thresholds.lower_bounds.begin());
      }
    }
    if (c.difficulty_k < 1) throw ConfigError("config: difficulty.k must be >= 1");
    c.thresholds.validate();

    if (j.contains("faithfulness")) {
      const auto& f = j.at("faithfulness");
      c.scorer = f.value("scorer", c.scorer);
      c.tau = f.value("tau", c.tau);
      if (f.contains("labels") && !f.at("labels").is_null()) c.labels = f.at("labels").get<std::string>();
    }
    if (j.contains("recall")) c.recall_k = j.at("recall").value("k", c.recall_k);
    if (c.recall_k == 0) throw ConfigError("config: recall.k must be >= 1");
    if (j.contains("quire")) c.quire = QuireConfig::from_json(j.at("quire"));
    if (j.contains("prompts")) c.prompts = PromptTemplates::from_json(j.at("prompts"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["backend"] = backend;
  j["corpus"] = corpus.string();
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  j["workers"] = workers;
  j["generation"] = {{"temperature", generation.temperature},
                     {"max_new_tokens", generation.max_new_tokens},
                     {"seed", generation.seed}};
  j["attribution"] = {{"steps", attribution_steps}};
  j["flow"] = {{"n_bins", n_bins}};
  j["difficulty"] = {{"k", difficulty_k},
                     {"temperature", difficulty_temperature},
                     {"thresholds", std::vector<double>(thresholds.lower_bounds.begin(), thresholds.lower_bounds.end())}};
  j["faithfulness"] = {{"scorer", scorer}, {"tau", tau}};
  j["faithfulness"]["labels"] = labels ? nlohmann::json(labels->string()) : nlohmann::json(nullptr);
  j["recall"] = {{"k", recall_k}};
  j["quire"] = quire.to_json();
  j["prompts"] = prompts.to_json();
  return j;
}

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

QuireConfig RunConfig::quire_config() const {
  QuireConfig q = quire;
  q.generation = generation;
  q.prompts = prompts;
  q.attribution_steps = attribution_steps;
  return q;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_fingerprint(const RunConfig& cfg) {
  auto echo = cfg.to_json();
  // Workers and output location do not affect results.
  echo.erase("workers");
  echo.erase("output_dir");
  std::string material = echo.dump();
  material += '\0' + read_file(cfg.resolve(cfg.corpus));
  if (cfg.labels) material += '\0' + read_file(cfg.resolve(*cfg.labels));
  for (const auto& f : backend_files(cfg.backend, cfg.base_dir)) material += '\0' + read_file(f);
  return fnv1a_hex(material);
}

}  // namespace cotscope
