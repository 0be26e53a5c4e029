#include "cotscope/difficulty.hpp"

#include <stdexcept>

#include "cotscope/answer.hpp"

namespace cotscope {

void LevelThresholds::validate() const {
  double prev = 1.0 + 1e-12;
  for (double b : lower_bounds) {
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("level thresholds must lie in [0, 1]");
    if (!(b < prev)) throw std::invalid_argument("level thresholds must be strictly decreasing");
    prev = b;
  }
}

int bin_level(double pass_at_1, const LevelThresholds& thresholds) {
  if (!(pass_at_1 >= 0.0 && pass_at_1 <= 1.0)) throw std::invalid_argument("pass@1 must lie in [0, 1]");
  for (std::size_t i = 0; i < thresholds.lower_bounds.size(); ++i) {
    if (pass_at_1 >= thresholds.lower_bounds[i]) return static_cast<int>(i) + 1;
  }
  return 5;
}

PassAtOneResult estimate_pass_at_1(const Backend& backend, const ReasoningSample& sample, int k,
                                   const GenerationParams& params, const PromptTemplates& prompts) {
  if (k <= 0) throw std::invalid_argument("pass@1 needs k >= 1");
  GenerationParams p = params;
  p.num_samples = k;
  const auto prompt = backend.tokenize(render_no_cot_prompt(prompts, sample));
  const auto gens = backend.generate(prompt, p);
  const auto kind = task_kind(sample);
  PassAtOneResult r;
  for (const auto& g : gens) {
    const auto ans = extract_answer(g.text, kind);
    if (!ans.ok()) {
      ++r.extraction_failures;
    } else if (*ans.value == sample.gold_answer) {
      ++r.correct;
    }
  }
  r.pass_at_1 = static_cast<double>(r.correct) / static_cast<double>(gens.size());
  return r;
}

DifficultyRecord estimate_difficulty(std::span<const Backend* const> backends, const ReasoningSample& sample, int k,
                                     const GenerationParams& params, const PromptTemplates& prompts,
                                     const LevelThresholds& thresholds) {
  if (backends.empty()) throw std::invalid_argument("difficulty needs at least one backend");
  DifficultyRecord rec;
  rec.sample_id = sample.id;
  rec.num_samples = k;
  double sum = 0.0;
  for (const Backend* b : backends) {
    const auto r = estimate_pass_at_1(*b, sample, k, params, prompts);
    sum += r.pass_at_1;
    rec.extraction_failures += r.extraction_failures;
  }
  rec.pass_at_1 = sum / static_cast<double>(backends.size());
  rec.level = bin_level(rec.pass_at_1, thresholds);
  return rec;
}

LevelReport level_accuracy_report(std::span<const LevelObservation> observations) {
  LevelReport rep;
  std::array<std::size_t, 5> cot{};
  std::array<std::size_t, 5> no_cot{};
  for (const auto& o : observations) {
    if (o.level < 1 || o.level > 5) throw std::invalid_argument("difficulty level must be 1..5");
    const auto i = static_cast<std::size_t>(o.level - 1);
    ++rep.histogram[i];
    cot[i] += o.correct_with_cot ? 1 : 0;
    no_cot[i] += o.correct_without_cot ? 1 : 0;
  }
  rep.total = observations.size();
  for (std::size_t i = 0; i < 5; ++i) {
    if (rep.histogram[i] == 0) continue;
    const auto n = static_cast<double>(rep.histogram[i]);
    rep.rows.push_back({static_cast<int>(i) + 1, rep.histogram[i], static_cast<double>(cot[i]) / n,
                        static_cast<double>(no_cot[i]) / n});
  }
  return rep;
}

}  // namespace cotscope
