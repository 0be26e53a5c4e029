#include "cotscope/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "cotscope/corpus.hpp"
#include "cotscope/error.hpp"
#include "cotscope/experiments.hpp"
#include "cotscope/synthetic.hpp"
#include "cotscope/text_format.hpp"

namespace cotscope {

namespace {

void print_report(std::ostream& out, const std::string& command, const RunReport& r) {
  out << command << ": " << r.samples << " samples, " << r.errors << " errors -> " << r.dir.string() << "\n";
  out << "fingerprint " << r.fingerprint << "\n";
  for (const auto& rec : r.aggregates) {
    out << "  " << rec.metric;
    if (!rec.setting.empty()) out << " [" << rec.setting << "]";
    out << " = " << format_double(rec.value) << "\n";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cotscope: chain-of-thought information and attribution analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::size_t workers = 0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"effectiveness", "accuracy with and without CoT"},
      {"difficulty", "pass@1 difficulty levels and per-level accuracy"},
      {"ig", "information gain of CoT, split by faithfulness"},
      {"flow", "attribution flow from CoT steps into the answer"},
      {"mif", "monotonicity of the information flow"},
      {"faith-grid", "CoT/answer correctness grid, BS and FBS"},
      {"recall-analysis", "top-k recall of missing statements (AAE vs random)"},
      {"quire", "QUIRE vs self-consistency and ablations"},
      {"report", "collect aggregate metrics of previous runs"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output_dir, "override output_dir");
    sub->add_option("-w,--workers", workers, "override worker count")->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }

  SyntheticConfig syn;
  std::string syn_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic rule-base QA corpus (JSONL)");
  synth->add_option("--seed", syn.seed, "generator seed");
  synth->add_option("--n", syn.n, "number of samples")->check(CLI::PositiveNumber);
  synth->add_option("--depth", syn.depth, "proof depth")->check(CLI::PositiveNumber);
  synth->add_option("--distractors", syn.distractors, "distractor statements per sample");
  synth->add_option("-o,--output", syn_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      save_corpus(syn_out, generate_synthetic_logic(syn));
      out << "wrote " << syn.n << " samples to " << syn_out << "\n";
      return 0;
    }
    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    auto cfg = RunConfig::load(config_path);
    if (!output_dir.empty()) cfg.output_dir = std::filesystem::absolute(output_dir);
    if (workers > 0) cfg.workers = workers;

    RunReport report;
    if (command == "effectiveness") {
      report = run_effectiveness(cfg);
    } else if (command == "quire") {
      report = run_quire_experiment(cfg);
    } else if (command == "report") {
      report = run_report(cfg);
    } else {
      report = run_analysis(cfg, *parse_analysis(command));
    }
    print_report(out, command, report);
    return report.errors > 0 ? 1 : 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cotscope
