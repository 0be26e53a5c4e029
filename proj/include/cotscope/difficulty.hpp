#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cotscope/backend.hpp"
#include "cotscope/corpus.hpp"
#include "cotscope/prompts.hpp"

namespace cotscope {

/// Lower bounds of levels 1..4; anything below the last bound is level 5.
/// Defaults: [0.8, 1] -> 1, [0.6, 0.8) -> 2, [0.4, 0.6) -> 3, [0.1, 0.4) -> 4, [0, 0.1) -> 5.
struct LevelThresholds {
  std::array<double, 4> lower_bounds{0.8, 0.6, 0.4, 0.1};

  void validate() const;  // strictly decreasing, inside [0, 1]
};

struct DifficultyRecord {
  std::string sample_id;
  double pass_at_1 = 0.0;
  int level = 0;
  int num_samples = 10;
  int extraction_failures = 0;
};

int bin_level(double pass_at_1, const LevelThresholds& thresholds = {});

struct PassAtOneResult {
  double pass_at_1 = 0.0;
  int correct = 0;
  int extraction_failures = 0;
};

/// Samples k no-CoT answers and returns the fraction matching gold.
/// Extraction failures count as incorrect.
PassAtOneResult estimate_pass_at_1(const Backend& backend, const ReasoningSample& sample, int k,
                                   const GenerationParams& params, const PromptTemplates& prompts = {});

/// Averages pass@1 over several backends before binning.
DifficultyRecord estimate_difficulty(std::span<const Backend* const> backends, const ReasoningSample& sample, int k,
                                     const GenerationParams& params, const PromptTemplates& prompts = {},
                                     const LevelThresholds& thresholds = {});

struct LevelObservation {
  int level = 0;
  bool correct_with_cot = false;
  bool correct_without_cot = false;
};

struct LevelRow {
  int level = 0;
  std::size_t count = 0;
  double accuracy_cot = 0.0;
  double accuracy_no_cot = 0.0;
};

struct LevelReport {
  std::vector<LevelRow> rows;             // only levels that occur
  std::array<std::size_t, 5> histogram{};  // counts for levels 1..5
  std::size_t total = 0;
};

LevelReport level_accuracy_report(std::span<const LevelObservation> observations);

}  // namespace cotscope
