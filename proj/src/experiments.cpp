#include "cotscope/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "cotscope/answer.hpp"
#include "cotscope/attribution.hpp"
#include "cotscope/backend_factory.hpp"
#include "cotscope/corpus.hpp"
#include "cotscope/difficulty.hpp"
#include "cotscope/error.hpp"
#include "cotscope/faithfulness.hpp"
#include "cotscope/flow.hpp"
#include "cotscope/info_metrics.hpp"
#include "cotscope/quire.hpp"
#include "cotscope/text_format.hpp"

namespace cotscope {

std::string_view to_string(Analysis a) {
  switch (a) {
    case Analysis::difficulty: return "difficulty";
    case Analysis::ig: return "ig";
    case Analysis::flow: return "flow";
    case Analysis::mif: return "mif";
    case Analysis::faith_grid: return "faith-grid";
    case Analysis::recall_analysis: return "recall-analysis";
  }
  return "unknown";
}

std::optional<Analysis> parse_analysis(std::string_view name) {
  for (auto a : {Analysis::difficulty, Analysis::ig, Analysis::flow, Analysis::mif, Analysis::faith_grid,
                 Analysis::recall_analysis}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

namespace {

struct RunContext {
  const RunConfig& cfg;
  std::string fingerprint;
  std::vector<ReasoningSample> samples;
  std::unique_ptr<Backend> backend;
  std::optional<LabelMap> labels;
  std::unique_ptr<SimilarityScorer> scorer;
  std::unique_ptr<ResultStore> store;
};

std::unique_ptr<RunContext> start(const RunConfig& cfg, const std::string& command,
                                  std::initializer_list<Capability> needs) {
  auto ctx = std::make_unique<RunContext>(RunContext{cfg, {}, {}, nullptr, std::nullopt, nullptr, nullptr});
  const auto corpus_path = cfg.resolve(cfg.corpus);
  if (!std::filesystem::exists(corpus_path)) throw ConfigError("corpus not found: " + corpus_path.string());
  ctx->samples = load_corpus_strict(corpus_path);
  if (ctx->samples.empty()) throw ConfigError("corpus is empty: " + corpus_path.string());
  ctx->backend = make_backend(cfg.backend, cfg.base_dir);
  for (auto c : needs) {
    if (!ctx->backend->supports(c)) {
      throw CapabilityError(command + " needs a backend with the '" + std::string(to_string(c)) +
                            "' capability; backend '" + std::string(ctx->backend->name()) +
                            "' lacks it (use an analytic or composite backend)");
    }
  }
  if (cfg.labels) ctx->labels = load_labels(cfg.resolve(*cfg.labels));
  ctx->scorer = make_scorer(cfg.scorer);
  ctx->fingerprint = config_fingerprint(cfg);
  nlohmann::json echo{{"command", command}, {"fingerprint", ctx->fingerprint}, {"config", cfg.to_json()}};
  ctx->store = std::make_unique<ResultStore>(cfg.resolve(cfg.output_dir) / command, ctx->fingerprint, echo.dump(2) + "\n");
  return ctx;
}

template <typename R>
struct SampleResult {
  std::optional<R> value;
  std::string error;
};

// Runs fn(backend, sample) for every sample on a bounded pool. Each worker owns
// an independent backend session; results land at the sample's index.
template <typename R, typename Fn>
std::vector<SampleResult<R>> map_samples(RunContext& ctx, Fn fn) {
  const std::size_t n = ctx.samples.size();
  std::vector<SampleResult<R>> out(n);
  std::atomic<std::size_t> next{0};
  auto work = [&](const Backend& backend) {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i].value = fn(backend, ctx.samples[i]);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  const std::size_t workers = std::min(ctx.cfg.workers, n);
  if (workers <= 1) {
    work(*ctx.backend);
  } else {
    std::vector<std::unique_ptr<Backend>> sessions;
    sessions.push_back(std::move(ctx.backend));
    for (std::size_t w = 1; w < workers; ++w) sessions.push_back(make_backend(ctx.cfg.backend, ctx.cfg.base_dir));
    {
      std::vector<std::jthread> threads;
      for (auto& s : sessions) threads.emplace_back([&work, &s] { work(*s); });
    }
    ctx.backend = std::move(sessions.front());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!out[i].value) ctx.store->add_error(ctx.samples[i].id, out[i].error);
  }
  return out;
}

RunReport finish(RunContext& ctx) {
  ctx.store->flush();
  RunReport r;
  r.dir = ctx.store->dir();
  r.fingerprint = ctx.fingerprint;
  r.samples = ctx.samples.size();
  r.errors = ctx.store->error_count();
  for (const auto& rec : ctx.store->records()) {
    if (rec.sample_id.empty()) r.aggregates.push_back(rec);
  }
  return r;
}

ReasoningTrace cot_trace(const Backend& backend, const ReasoningSample& s, const RunConfig& cfg) {
  return sample_traces(backend, s, render_cot_prompt(cfg.prompts, s), cfg.generation).front();
}

ReasoningTrace no_cot_trace(const Backend& backend, const ReasoningSample& s, const RunConfig& cfg) {
  return sample_traces(backend, s, render_no_cot_prompt(cfg.prompts, s), cfg.generation).front();
}

bool correct(const ReasoningTrace& t, const ReasoningSample& s) { return t.answer && *t.answer == s.gold_answer; }

std::string b01(bool b) { return b ? "1" : "0"; }

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// ---------------------------------------------------------------- effectiveness

struct EffectivenessOut {
  ReasoningTrace cot;
  ReasoningTrace no_cot;
};

// ------------------------------------------------------------------------ flow

struct FlowOut {
  std::optional<std::string> skipped;
  std::vector<double> token_aae;
  FlowCurve curve;
  std::optional<MifResult> mif;
  std::string matrix_tsv;
};

FlowOut flow_sample(const Backend& backend, const ReasoningSample& s, const RunConfig& cfg, bool keep_matrix) {
  FlowOut out;
  const auto trace = cot_trace(backend, s, cfg);
  if (!trace.answer_tokens()) {
    out.skipped = "answer extraction failed";
    return out;
  }
  const auto attr = attribute_trace(backend, s, trace, AttributionOptions{cfg.attribution_steps});
  if (attr.cot_rows.size() < 2) {
    out.skipped = "CoT shorter than 2 tokens before the answer";
    return out;
  }
  const IndexRange answer_cols{0, attr.matrix.cols()};
  out.token_aae = token_aae(attr.matrix, attr.cot_rows, answer_cols);
  out.curve = build_flow_curve(attr.matrix, attr.cot_rows, answer_cols, cfg.n_bins);
  out.mif = mif(out.curve);
  if (keep_matrix) {
    std::ostringstream ss;
    write_attribution_matrix(ss, attr.matrix);
    out.matrix_tsv = ss.str();
  }
  return out;
}

// ------------------------------------------------------------- recall analysis

struct RecallOut {
  ConsistencyLabel label;
  std::vector<std::string> missing;
  std::vector<std::string> aae_top;
  std::vector<std::string> random_top;
  bool aae_hit = false;
  bool random_hit = false;
};

std::vector<std::string> missing_statements(const ReasoningSample& s, const std::string& cot_text) {
  std::vector<std::string> out;
  if (!s.gold_rationale) return out;
  const auto cot = lower(cot_text);
  for (const auto& st : segment_context(*s.gold_rationale)) {
    const auto it = std::find(s.context_statements.begin(), s.context_statements.end(), st);
    if (it == s.context_statements.end()) continue;
    if (cot.find(lower(statement_body(st))) == std::string::npos) {
      out.push_back(ReasoningSample::statement_id(static_cast<std::size_t>(it - s.context_statements.begin())));
    }
  }
  return out;
}

std::vector<std::string> random_ranking(const ReasoningSample& s, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < s.context_statements.size(); ++i) ids.push_back(ReasoningSample::statement_id(i));
  std::uint64_t mix = seed;
  for (unsigned char c : s.id) mix = (mix ^ c) * 1099511628211ULL;
  std::mt19937_64 rng(mix);
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng() % i)]);
  return ids;
}

// ----------------------------------------------------------------------- quire

struct MethodOut {
  std::optional<std::string> answer;
  bool correct = false;
  std::optional<double> bs;
};

struct QuireOut {
  std::vector<MethodOut> methods;
  std::string audit;
};

const std::vector<std::string>& quire_methods() {
  static const std::vector<std::string> m{"sc", "quire", "quire-aae_recall", "quire-ig_vote"};
  return m;
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? " " : "") + ids[i];
  return out;
}

}  // namespace

RunReport run_effectiveness(const RunConfig& cfg) {
  auto ctx = start(cfg, "effectiveness", {Capability::generate});
  auto results = map_samples<EffectivenessOut>(*ctx, [&](const Backend& b, const ReasoningSample& s) {
    return EffectivenessOut{cot_trace(b, s, cfg), no_cot_trace(b, s, cfg)};
  });
  auto& store = *ctx->store;
  CsvTable per_sample{{"sample_id", "answer_cot", "correct_cot", "answer_no_cot", "correct_no_cot"}, {}};
  std::vector<double> acc_cot;
  std::vector<double> acc_no_cot;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].value) continue;
    const auto& s = ctx->samples[i];
    const auto& r = *results[i].value;
    const bool c1 = correct(r.cot, s);
    const bool c0 = correct(r.no_cot, s);
    store.add("correct", c1, s.id, "cot");
    store.add("correct", c0, s.id, "no_cot");
    acc_cot.push_back(c1);
    acc_no_cot.push_back(c0);
    per_sample.rows.push_back({s.id, r.cot.answer.value_or(""), b01(c1), r.no_cot.answer.value_or(""), b01(c0)});
  }
  const double a1 = mean(acc_cot);
  const double a0 = mean(acc_no_cot);
  store.add("accuracy", a1, "", "cot");
  store.add("accuracy", a0, "", "no_cot");
  store.add("effectiveness_score", a1 - a0, "", "average");
  store.add_table("per_sample", std::move(per_sample));
  store.add_table("figure1", CsvTable{{"dataset", "accuracy_cot", "accuracy_no_cot", "score"},
                                     {{cfg.experiment, format_double(a1), format_double(a0), format_double(a1 - a0)}}});
  return finish(*ctx);
}

RunReport run_analysis(const RunConfig& cfg, Analysis which) {
  const std::string name(to_string(which));
  std::initializer_list<Capability> gen_only{Capability::generate};
  std::initializer_list<Capability> gen_score{Capability::generate, Capability::score};
  std::initializer_list<Capability> gen_grad{Capability::generate, Capability::gradient, Capability::embeddings};
  const bool needs_grad = which == Analysis::flow || which == Analysis::mif || which == Analysis::recall_analysis;
  auto ctx = start(cfg, name, needs_grad ? gen_grad : which == Analysis::ig ? gen_score : gen_only);
  auto& store = *ctx->store;
  const auto* labels = ctx->labels ? &*ctx->labels : nullptr;
  const JudgeOptions judge{cfg.tau};

  if (which == Analysis::faith_grid || which == Analysis::recall_analysis) {
    for (const auto& s : ctx->samples) {
      const bool labelled = labels && labels->count(s.id);
      if (!labelled && !s.gold_rationale) {
        throw JudgingUnavailableError(name + " needs a CoT label file entry or a gold rationale for every sample; '" +
                                      s.id + "' has neither");
      }
    }
  }

  switch (which) {
    case Analysis::difficulty: {
      struct Out {
        DifficultyRecord rec;
        bool cot_ok;
        bool no_cot_ok;
      };
      GenerationParams sampling = cfg.generation;
      sampling.temperature = cfg.difficulty_temperature;
      auto results = map_samples<Out>(*ctx, [&](const Backend& b, const ReasoningSample& s) {
        const Backend* one[] = {&b};
        return Out{estimate_difficulty(one, s, cfg.difficulty_k, sampling, cfg.prompts, cfg.thresholds),
                   correct(cot_trace(b, s, cfg), s), correct(no_cot_trace(b, s, cfg), s)};
      });
      CsvTable per_sample{{"sample_id", "pass_at_1", "level", "extraction_failures"}, {}};
      std::vector<LevelObservation> obs;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].value) continue;
        const auto& r = *results[i].value;
        const auto& id = ctx->samples[i].id;
        store.add("pass_at_1", r.rec.pass_at_1, id, "no_cot");
        store.add("level", r.rec.level, id, "no_cot");
        per_sample.rows.push_back({id, format_double(r.rec.pass_at_1), std::to_string(r.rec.level),
                                   std::to_string(r.rec.extraction_failures)});
        obs.push_back({r.rec.level, r.cot_ok, r.no_cot_ok});
      }
      const auto rep = level_accuracy_report(obs);
      CsvTable fig2{{"level", "count", "accuracy_cot", "accuracy_no_cot"}, {}};
      for (const auto& row : rep.rows) {
        const auto lvl = "level" + std::to_string(row.level);
        store.add("accuracy", row.accuracy_cot, "", lvl + "_cot");
        store.add("accuracy", row.accuracy_no_cot, "", lvl + "_no_cot");
        fig2.rows.push_back({std::to_string(row.level), std::to_string(row.count), format_double(row.accuracy_cot),
                             format_double(row.accuracy_no_cot)});
      }
      CsvTable fig3{{"dataset", "level", "count"}, {}};
      for (std::size_t l = 0; l < 5; ++l) {
        store.add("count", static_cast<double>(rep.histogram[l]), "", "level" + std::to_string(l + 1));
        fig3.rows.push_back({cfg.experiment, std::to_string(l + 1), std::to_string(rep.histogram[l])});
      }
      store.add_table("difficulty", std::move(per_sample));
      store.add_table("figure2", std::move(fig2));
      store.add_table("figure3", std::move(fig3));
      break;
    }

    case Analysis::ig: {
      struct Out {
        InfoGainResult ig;
        std::string setting;
      };
      auto results = map_samples<Out>(*ctx, [&](const Backend& b, const ReasoningSample& s) {
        const auto trace = cot_trace(b, s, cfg);
        if (trace.cot.empty()) throw PipelineError("empty CoT");
        Out o{information_gain(b, b.tokenize(trace.prompt), trace.cot), "unjudged"};
        try {
          o.setting = judge_consistency(trace, s, labels, *ctx->scorer, judge).unfaithful() ? "unfaithful" : "faithful";
        } catch (const JudgingUnavailableError&) {
        }
        return o;
      });
      std::map<std::string, CsvTable> dist;
      for (const char* setting : {"faithful", "unfaithful", "average"}) dist[setting] = CsvTable{{"sample_id", "ig"}, {}};
      std::map<std::string, std::vector<double>> values;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].value) continue;
        const auto& r = *results[i].value;
        const auto& id = ctx->samples[i].id;
        store.add("ig", r.ig.ig, id, r.setting);
        store.add("h_unconditional", r.ig.h_unconditional, id, r.setting);
        store.add("h_conditional", r.ig.h_conditional, id, r.setting);
        for (const auto& setting : {r.setting, std::string("average")}) {
          if (!dist.count(setting)) continue;
          dist[setting].rows.push_back({id, format_double(r.ig.ig)});
          values[setting].push_back(r.ig.ig);
        }
      }
      for (auto& [setting, table] : dist) {
        store.add("ig_mean", mean(values[setting]), "", setting);
        store.add("count", static_cast<double>(values[setting].size()), "", setting);
        store.add_table("ig_" + setting, std::move(table));
      }
      break;
    }

    case Analysis::flow:
    case Analysis::mif: {
      const bool is_flow = which == Analysis::flow;
      auto results = map_samples<FlowOut>(
          *ctx, [&](const Backend& b, const ReasoningSample& s) { return flow_sample(b, s, cfg, is_flow); });
      CsvTable curves{{"sample_id", "bin", "step", "aae"}, {}};
      CsvTable mifs{{"sample_id", "mif", "n_bins", "degenerate"}, {}};
      CsvTable skipped{{"sample_id", "reason"}, {}};
      std::vector<double> bin_sum(cfg.n_bins, 0.0);
      std::size_t full_curves = 0;
      std::vector<double> all_mif;
      std::vector<double> all_aae;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].value) continue;
        const auto& r = *results[i].value;
        const auto& id = ctx->samples[i].id;
        if (r.skipped) {
          skipped.rows.push_back({id, *r.skipped});
          continue;
        }
        if (is_flow) {
          const double m = mean(r.token_aae);
          store.add("cot_aae_mean", m, id, "average");
          all_aae.push_back(m);
          for (std::size_t bi = 0; bi < r.curve.aae_values.size(); ++bi) {
            curves.rows.push_back({id, std::to_string(bi), format_double(r.curve.step_positions[bi]),
                                   format_double(r.curve.aae_values[bi])});
          }
          if (r.curve.aae_values.size() == cfg.n_bins) {
            ++full_curves;
            for (std::size_t bi = 0; bi < cfg.n_bins; ++bi) bin_sum[bi] += r.curve.aae_values[bi];
          }
          store.add_file("attribution/" + id + ".tsv", r.matrix_tsv);
        } else {
          store.add("mif", r.mif->mif, id, "average");
          all_mif.push_back(r.mif->mif);
          mifs.rows.push_back({id, format_double(r.mif->mif), std::to_string(r.mif->n_bins), b01(r.mif->degenerate)});
        }
      }
      if (is_flow) {
        CsvTable fig5{{"step", "aae", "n"}, {}};
        for (std::size_t bi = 0; bi < cfg.n_bins && full_curves > 0; ++bi) {
          const double step = 100.0 * (static_cast<double>(bi) + 0.5) / static_cast<double>(cfg.n_bins);
          fig5.rows.push_back({format_double(step), format_double(bin_sum[bi] / static_cast<double>(full_curves)),
                               std::to_string(full_curves)});
        }
        store.add("cot_aae_mean", mean(all_aae), "", "average");
        store.add_table("curves", std::move(curves));
        store.add_table("figure5", std::move(fig5));
      } else {
        store.add("mif_mean", mean(all_mif), "", "average");
        store.add_table("mif", std::move(mifs));
      }
      store.add_table("skipped", std::move(skipped));
      break;
    }

    case Analysis::faith_grid: {
      struct Out {
        ConsistencyLabel label;
        std::optional<double> bs;
      };
      auto results = map_samples<Out>(*ctx, [&](const Backend& b, const ReasoningSample& s) {
        const auto trace = cot_trace(b, s, cfg);
        Out o{judge_consistency(trace, s, labels, *ctx->scorer, judge), std::nullopt};
        if (s.gold_rationale) o.bs = ctx->scorer->score(trace.cot_text, *s.gold_rationale);
        return o;
      });
      ConsistencyGrid grid;
      std::vector<FbsItem> items;
      CsvTable per{{"sample_id", "cot_correct", "answer_correct", "judge_source", "unfaithful", "bs"}, {}};
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].value) continue;
        const auto& r = *results[i].value;
        const auto& id = ctx->samples[i].id;
        const std::string src(to_string(r.label.judge_source));
        grid.add(r.label);
        store.add("cot_correct", r.label.cot_correct, id, src);
        store.add("answer_correct", r.label.answer_correct, id, src);
        if (r.bs) {
          store.add("bs", *r.bs, id, r.label.unfaithful() ? "unfaithful" : "faithful");
          items.push_back({r.label.answer_correct, *r.bs});
        }
        per.rows.push_back({id, b01(r.label.cot_correct), b01(r.label.answer_correct), src, b01(r.label.unfaithful()),
                            r.bs ? format_double(*r.bs) : ""});
      }
      store.add("count", static_cast<double>(grid.cot_ok_answer_ok), "", "cot_correct/answer_correct");
      store.add("count", static_cast<double>(grid.cot_ok_answer_wrong), "", "cot_correct/answer_wrong");
      store.add("count", static_cast<double>(grid.cot_wrong_answer_ok), "", "cot_wrong/answer_correct");
      store.add("count", static_cast<double>(grid.cot_wrong_answer_wrong), "", "cot_wrong/answer_wrong");
      if (grid.total() > 0) {
        store.add("unfaithful_rate", static_cast<double>(grid.unfaithful()) / static_cast<double>(grid.total()), "",
                  "average");
      }
      if (!items.empty()) {
        const auto scores = fbs(items);
        store.add("bs", scores.bs, "", "average");
        store.add("fbs", scores.fbs, "", "average");
      }
      store.add_table("labels", std::move(per));
      store.add_table("table1", CsvTable{{"cot", "answer", "count"},
                                         {{"correct", "correct", std::to_string(grid.cot_ok_answer_ok)},
                                          {"correct", "wrong", std::to_string(grid.cot_ok_answer_wrong)},
                                          {"wrong", "correct", std::to_string(grid.cot_wrong_answer_ok)},
                                          {"wrong", "wrong", std::to_string(grid.cot_wrong_answer_wrong)}}});
      break;
    }

    case Analysis::recall_analysis: {
      const std::size_t k = cfg.recall_k;
      auto results = map_samples<RecallOut>(*ctx, [&](const Backend& b, const ReasoningSample& s) {
        const auto trace = cot_trace(b, s, cfg);
        RecallOut o;
        o.label = judge_consistency(trace, s, labels, *ctx->scorer, judge);
        o.missing = missing_statements(s, trace.cot_text);
        if (o.missing.empty()) return o;
        const std::set<std::string> targets(o.missing.begin(), o.missing.end());
        const auto ranked = rank_statements(b, s, trace, AttributionOptions{cfg.attribution_steps});
        o.aae_hit = top_k_hit(ranked, targets, k);
        for (std::size_t j = 0; j < std::min(k, ranked.size()); ++j) o.aae_top.push_back(ranked[j].statement_id);
        auto rnd = random_ranking(s, cfg.seed);
        rnd.resize(std::min(k, rnd.size()));
        o.random_top = rnd;
        o.random_hit = std::any_of(rnd.begin(), rnd.end(), [&](const std::string& id) { return targets.count(id) > 0; });
        return o;
      });
      struct Tally {
        std::size_t n = 0;
        std::size_t hits = 0;
      };
      std::map<std::string, Tally> tally{{"unfaithful", {}}, {"average", {}}, {"random", {}}};
      CsvTable per{{"sample_id", "unfaithful", "missing", "aae_top_k", "random_top_k", "aae_hit", "random_hit"}, {}};
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].value) continue;
        const auto& r = *results[i].value;
        const auto& id = ctx->samples[i].id;
        const bool unf = r.label.unfaithful();
        per.rows.push_back({id, b01(unf), join_ids(r.missing), join_ids(r.aae_top), join_ids(r.random_top),
                            r.missing.empty() ? "" : b01(r.aae_hit), r.missing.empty() ? "" : b01(r.random_hit)});
        if (r.missing.empty()) continue;
        store.add("hit", r.aae_hit, id, "aae");
        store.add("hit", r.random_hit, id, "random");
        auto bump = [&](const char* setting, bool hit) {
          ++tally[setting].n;
          tally[setting].hits += hit ? 1 : 0;
        };
        bump("average", r.aae_hit);
        if (unf) {
          bump("unfaithful", r.aae_hit);
          bump("random", r.random_hit);
        }
      }
      CsvTable summary{{"setting", "n", "hits", "hit_rate"}, {}};
      for (const char* setting : {"unfaithful", "average", "random"}) {
        const auto& t = tally[setting];
        const double rate = t.n ? static_cast<double>(t.hits) / static_cast<double>(t.n) : 0.0;
        store.add("hit_rate", rate, "", setting);
        store.add("count", static_cast<double>(t.n), "", setting);
        summary.rows.push_back({setting, std::to_string(t.n), std::to_string(t.hits), format_double(rate)});
      }
      store.add_table("recall", std::move(summary));
      store.add_table("per_sample", std::move(per));
      break;
    }
  }
  return finish(*ctx);
}

RunReport run_quire_experiment(const RunConfig& cfg) {
  auto ctx = start(cfg, "quire", {Capability::generate});
  const auto base = cfg.quire_config();
  if (base.ig_vote && !ctx->backend->supports(Capability::score)) {
    throw CapabilityError("quire with IG vote needs a backend with the 'score' capability");
  }
  auto results = map_samples<QuireOut>(*ctx, [&](const Backend& b, const ReasoningSample& s) {
    QuireOut o;
    auto no_recall = base;
    no_recall.aae_recall = false;
    auto no_ig = base;
    no_ig.ig_vote = false;
    std::vector<QuireOutcome> outcomes;
    outcomes.push_back(run_self_consistency(b, s, base));
    outcomes.push_back(run_quire(b, s, base));
    outcomes.push_back(run_quire(b, s, no_recall));
    outcomes.push_back(run_quire(b, s, no_ig));
    for (const auto& out : outcomes) {
      MethodOut m;
      m.answer = out.final_answer;
      m.correct = out.final_answer && *out.final_answer == s.gold_answer;
      if (s.gold_rationale && out.representative) {
        m.bs = ctx->scorer->score(out.paths[*out.representative].cot_text, *s.gold_rationale);
      }
      o.methods.push_back(std::move(m));
    }
    o.audit = audit_record(outcomes[1]).dump();
    return o;
  });

  auto& store = *ctx->store;
  const auto& methods = quire_methods();
  std::vector<std::vector<double>> acc(methods.size());
  std::vector<std::vector<FbsItem>> items(methods.size());
  CsvTable per{{"sample_id", "gold"}, {}};
  for (const auto& m : methods) per.header.push_back(m);
  std::string audit;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].value) continue;
    const auto& r = *results[i].value;
    const auto& s = ctx->samples[i];
    std::vector<std::string> row{s.id, s.gold_answer};
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const auto& mo = r.methods[m];
      store.add("correct", mo.correct, s.id, methods[m]);
      acc[m].push_back(mo.correct);
      if (mo.bs) {
        store.add("bs", *mo.bs, s.id, methods[m]);
        items[m].push_back({mo.correct, *mo.bs});
      }
      row.push_back(mo.answer.value_or(""));
    }
    per.rows.push_back(std::move(row));
    audit += r.audit + "\n";
  }
  CsvTable table2{{"method", "acc", "bs", "fbs"}, {}};
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const double a = mean(acc[m]);
    store.add("acc", a, "", methods[m]);
    std::string bs_cell;
    std::string fbs_cell;
    if (!items[m].empty()) {
      const auto sc = fbs(items[m]);
      store.add("bs", sc.bs, "", methods[m]);
      store.add("fbs", sc.fbs, "", methods[m]);
      bs_cell = format_double(sc.bs);
      fbs_cell = format_double(sc.fbs);
    }
    table2.rows.push_back({methods[m], format_double(a), bs_cell, fbs_cell});
  }
  store.add_table("table2", std::move(table2));
  store.add_table("per_sample", std::move(per));
  store.add_file("audit.jsonl", std::move(audit));
  return finish(*ctx);
}

RunReport run_report(const RunConfig& cfg) {
  const auto root = cfg.resolve(cfg.output_dir);
  const auto fingerprint = config_fingerprint(cfg);
  std::vector<std::filesystem::path> dirs;
  if (std::filesystem::exists(root)) {
    for (const auto& e : std::filesystem::directory_iterator(root)) {
      if (e.is_directory() && e.path().filename() != "report" && std::filesystem::exists(e.path() / "metrics.csv")) {
        dirs.push_back(e.path());
      }
    }
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw ConfigError("no results under " + root.string() + "; run an analysis first");

  nlohmann::json echo{{"command", "report"}, {"fingerprint", fingerprint}, {"config", cfg.to_json()}};
  ResultStore store(root / "report", fingerprint, echo.dump(2) + "\n");
  CsvTable summary{{"source", "metric", "setting", "value", "source_fingerprint"}, {}};
  for (const auto& d : dirs) {
    std::ifstream in(d / "metrics.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto table = parse_csv(ss.str());
    for (const auto& row : table.rows) {
      if (row.size() < 5 || !row[2].empty()) continue;
      summary.rows.push_back({d.filename().string(), row[0], row[3], row[1], row[4]});
      store.add(d.filename().string() + "/" + row[0], parse_double(row[1]), "", row[3]);
    }
  }
  store.add_table("summary", std::move(summary));
  store.flush();
  RunReport r;
  r.dir = store.dir();
  r.fingerprint = fingerprint;
  r.aggregates = store.records();
  return r;
}

}  // namespace cotscope
