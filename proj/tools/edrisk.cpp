#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edrisk/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<long long> seed;
  std::vector<int> windows;
  std::string out_dir;
  std::string tie_break;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline config file");
  cmd->add_option("--seed", flags.seed, "override synth.seed and split.seed");
  cmd->add_option("--window", flags.windows, "prediction window in days (repeatable)")
      ->check(CLI::IsMember({3, 7, 14}));
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--tie-break", flags.tie_break, "ARC rule tie policy")
      ->check(CLI::IsMember({"lexicographic", "confidence"}));
}

edrisk::PipelineConfig resolve_config(const CommonFlags& flags) {
  edrisk::PipelineConfig config = flags.config_path.empty()
                                      ? edrisk::default_pipeline_config()
                                      : edrisk::load_config(flags.config_path);
  if (flags.seed) {
    if (config.synth) config.synth->seed = static_cast<std::uint64_t>(*flags.seed);
    config.train.split_seed = static_cast<std::uint64_t>(*flags.seed);
  }
  if (!flags.windows.empty()) config.windows = flags.windows;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (!flags.tie_break.empty())
    config.train.tie_break = flags.tie_break == "confidence" ? edrisk::TieBreak::confidence
                                                             : edrisk::TieBreak::lexicographic;
  edrisk::validate_config(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ED-discharge readmission risk pipeline"};
  app.require_subcommand(1);

  CommonFlags synth_flags, ingest_flags, train_flags, eval_flags;
  std::string ingest_input;
  std::string eval_bundle_root;
  std::string explain_bundle;
  int explain_k = 10;
  std::string predict_bundle, predict_visits, predict_timelines, predict_out;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic cohort");
  add_common(synth, synth_flags);

  CLI::App* ingest = app.add_subcommand("ingest", "parse visits, apply exclusions");
  add_common(ingest, ingest_flags);
  ingest->add_option("--input", ingest_input, "visit table (overrides input.path)");

  CLI::App* train = app.add_subcommand("train", "run the full pipeline");
  add_common(train, train_flags);

  CLI::App* evaluate = app.add_subcommand("evaluate", "re-evaluate saved bundles");
  add_common(evaluate, eval_flags);
  evaluate->add_option("--bundle-root", eval_bundle_root,
                       "pipeline output directory holding models/ (default: --out)");

  CLI::App* explain = app.add_subcommand("explain", "inspect a window bundle");
  explain->add_option("--bundle", explain_bundle, "window bundle directory")->required();
  explain->add_option("-k,--top", explain_k, "entries per section");

  CLI::App* predict = app.add_subcommand("predict", "score ED visits with saved bundles");
  predict->add_option("--bundle", predict_bundle, "bundle or pipeline output directory")
      ->required();
  predict->add_option("--visits", predict_visits, "visits to score")->required();
  predict->add_option("--timelines", predict_timelines, "history visits for context")->required();
  predict->add_option("--out", predict_out, "scores output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      edrisk::PipelineConfig config = resolve_config(synth_flags);
      edrisk::run_synth(config, std::cerr);
    } else if (ingest->parsed()) {
      if (!ingest_input.empty()) {
        edrisk::PipelineConfig config = ingest_flags.config_path.empty()
                                            ? edrisk::PipelineConfig{}
                                            : edrisk::load_config(ingest_flags.config_path);
        config.input_path = ingest_input;
        config.synth.reset();
        if (!ingest_flags.out_dir.empty()) config.out_dir = ingest_flags.out_dir;
        edrisk::run_ingest(config, std::cerr);
      } else {
        edrisk::run_ingest(resolve_config(ingest_flags), std::cerr);
      }
    } else if (train->parsed()) {
      edrisk::run_pipeline(resolve_config(train_flags), std::cerr);
    } else if (evaluate->parsed()) {
      edrisk::PipelineConfig config = resolve_config(eval_flags);
      const std::string root = eval_bundle_root.empty() ? config.out_dir : eval_bundle_root;
      edrisk::run_evaluate(config, root, std::cerr);
    } else if (explain->parsed()) {
      edrisk::run_explain(explain_bundle, explain_k, std::cout);
    } else if (predict->parsed()) {
      edrisk::run_predict(predict_bundle, predict_visits, predict_timelines, predict_out,
                          std::cerr);
    }
  } catch (const edrisk::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const edrisk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
