#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "lexmap/pipeline.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool reset = false;
  bool no_overwrite = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, GlobalFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline configuration file (JSON)")
      ->required();
  cmd->add_option("--seed", flags.seed, "override the embedding and split seeds");
  cmd->add_option("--threads", flags.threads, "override every threads setting");
  cmd->add_flag("--reset", flags.reset, "drop the manifest and recompute from scratch");
  cmd->add_flag("--no-overwrite", flags.no_overwrite,
                "refuse to overwrite stale stage outputs");
  cmd->add_flag("--quiet", flags.quiet, "suppress progress output");
}

lexmap::RunOptions to_options(const GlobalFlags& flags) {
  lexmap::RunOptions opts;
  opts.seed = flags.seed;
  opts.threads = flags.threads;
  opts.reset = flags.reset;
  opts.no_overwrite = flags.no_overwrite;
  opts.quiet = flags.quiet;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lexmap: bilingual lexicon induction from monolingual embeddings\n"
      "Trains word embeddings for two corpora, builds a seed dictionary,\n"
      "fits an orthogonal map and evaluates translation retrieval."};
  app.require_subcommand(1);

  GlobalFlags flags;
  std::optional<lexmap::Stage> single_stage;
  std::string stop_after;

  for (lexmap::Stage s : lexmap::kStageOrder) {
    auto* cmd = app.add_subcommand(lexmap::stage_name(s),
                                   "run the '" + lexmap::stage_name(s) + "' stage");
    add_common(cmd, flags);
    cmd->callback([s, &single_stage] { single_stage = s; });
  }
  auto* run_all_cmd = app.add_subcommand("run-all", "run every stage in order");
  add_common(run_all_cmd, flags);
  run_all_cmd->add_option("--stage", stop_after, "stop after this stage");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = lexmap::PipelineConfig::load(flags.config_path);
    const auto opts = to_options(flags);
    if (single_stage) {
      lexmap::run_stage(*single_stage, config, opts);
    } else {
      std::optional<lexmap::Stage> up_to;
      if (!stop_after.empty()) up_to = lexmap::parse_stage(stop_after);
      lexmap::run_all(config, opts, up_to);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
