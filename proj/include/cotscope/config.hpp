#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "cotscope/backend.hpp"
#include "cotscope/difficulty.hpp"
#include "cotscope/prompts.hpp"
#include "cotscope/quire.hpp"

namespace cotscope {

/// Everything a run depends on. Serialized in full into every output
/// directory; its fingerprint also covers the bytes of the corpus, the label
/// file and any backend files it references.
///
/// Config file (JSON), all keys but "backend" and "corpus" optional:
///   {
///     "experiment": "name", "backend": {...}, "corpus": "path.jsonl",
///     "output_dir": "results", "seed": 0, "workers": 1,
///     "generation": {"temperature": 0, "max_new_tokens": 256, "seed": 0},
///     "attribution": {"steps": 20},
///     "flow": {"n_bins": 20},
///     "difficulty": {"k": 10, "temperature": 0.7, "thresholds": [0.8, 0.6, 0.4, 0.1]},
///     "faithfulness": {"scorer": "token-f1", "tau": 0.7, "labels": "labels.jsonl"},
///     "recall": {"k": 3},
///     "quire": {"sc_samples": 3, "recall_k": 3, "vote_temperature": 1.0,
///               "aae_recall": true, "ig_vote": true, "raw_with_cot": true},
///     "prompts": {"cot": "...", "no_cot": "...", "hint": "..."}
///   }
/// Relative paths resolve against the config file's directory.
struct RunConfig {
  std::string experiment = "run";
  nlohmann::json backend;
  std::filesystem::path corpus;
  std::filesystem::path output_dir = "results";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  GenerationParams generation;
  int attribution_steps = 20;
  std::size_t n_bins = 20;
  int difficulty_k = 10;
  double difficulty_temperature = 0.7;
  LevelThresholds thresholds;
  std::string scorer = "token-f1";
  double tau = 0.7;
  std::optional<std::filesystem::path> labels;
  std::size_t recall_k = 3;
  QuireConfig quire;
  PromptTemplates prompts;
  std::filesystem::path base_dir;

  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// Canonical echo of the resolved configuration (paths as given).
  nlohmann::json to_json() const;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  QuireConfig quire_config() const;  // with generation and prompts folded in
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

/// Hash of the canonical config echo plus the bytes of every input file.
std::string config_fingerprint(const RunConfig& cfg);

}  // namespace cotscope
