#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexmap/common.hpp"
#include "lexmap/corpus.hpp"
#include "lexmap/dictionary.hpp"
#include "lexmap/retrieval.hpp"
#include "lexmap/sgns.hpp"
#include "lexmap/translate.hpp"

namespace lexmap {

enum class Stage { Preprocess, TrainEmbeddings, BuildDict, Split, Map, Evaluate };

inline constexpr std::array<Stage, 6> kStageOrder{Stage::Preprocess, Stage::TrainEmbeddings,
                                                  Stage::BuildDict,  Stage::Split,
                                                  Stage::Map,        Stage::Evaluate};

Stage parse_stage(const std::string& name);
std::string stage_name(Stage stage);

struct BackendConfig {
  std::string kind = "static";          // static | http
  std::filesystem::path table;          // static-table TSV
  std::string endpoint;                 // http backend URL
  std::string api_key_env = "LEXMAP_API_KEY";
  std::string lang;                     // defaults to language_pair
  int parallelism = 4;
  int retries = 3;
  int backoff_ms = 500;
  std::uint64_t daily_limit = 1'000'000;
  std::uint64_t monthly_limit = 10'000'000;
};

struct PipelineConfig {
  std::string language_pair = "src-tgt";
  std::filesystem::path source_corpus;
  std::filesystem::path target_corpus;
  std::filesystem::path work_dir;
  std::filesystem::path cache_dir;  // defaults to work_dir/cache
  TokenRules rules;
  SgnsConfig sgns;
  SplitSpec split;
  bool normalize = true;
  std::vector<RetrievalConfig> retrieval{{RetrievalMode::Nn}, {RetrievalMode::Csls}};
  std::size_t top_n = 10;
  int threads = 1;  // tokenization and retrieval; sgns has its own
  BackendConfig backend;

  // Relative paths are resolved against the config file's directory.
  // Unknown keys are rejected.
  static PipelineConfig load(const std::filesystem::path& path);
  void validate() const;
};

class ManifestError : public Error {
public:
  using Error::Error;
};

struct StageRecord {
  std::map<std::string, std::string> input_digests;
  std::string config_digest;
  std::vector<std::string> outputs;  // work_dir-relative
  std::map<std::string, std::string> output_digests;
  std::string completed_at;  // ISO-8601 UTC
};

struct PipelineManifest {
  int format_version = 1;
  std::map<std::string, StageRecord> stages;

  // Missing file yields an empty manifest; an unreadable one throws
  // ManifestError telling the user to --reset.
  static PipelineManifest load_or_create(const std::filesystem::path& path);
  void save_atomic(const std::filesystem::path& path) const;
};

struct RunOptions {
  bool no_overwrite = false;
  bool reset = false;  // drop the manifest before running
  std::optional<std::uint64_t> seed;  // overrides sgns.seed and split.seed
  std::optional<int> threads;         // overrides every threads setting
  bool quiet = false;
};

struct StageOutcome {
  Stage stage = Stage::Preprocess;
  bool skipped = false;
  std::vector<std::filesystem::path> outputs;
};

StageOutcome run_stage(Stage stage, const PipelineConfig& config, const RunOptions& opts = {});

// Runs the stages in order (optionally stopping after up_to), reusing cached
// stages. Equivalent to running them individually.
std::vector<StageOutcome> run_all(const PipelineConfig& config, const RunOptions& opts = {},
                                  std::optional<Stage> up_to = std::nullopt);

}  // namespace lexmap
