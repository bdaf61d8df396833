#include "lexmap/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexmap/digest.hpp"
#include "lexmap/embedding.hpp"
#include "lexmap/evaluation.hpp"
#include "lexmap/mapping.hpp"

namespace lexmap {

namespace {

using nlohmann::json;

// Stage output files, relative to work_dir.
constexpr const char* kSrcTok = "src.tok.txt";
constexpr const char* kTgtTok = "tgt.tok.txt";
constexpr const char* kSrcVocab = "src.vocab.tsv";
constexpr const char* kTgtVocab = "tgt.vocab.tsv";
constexpr const char* kSrcEmb = "src.emb.txt";
constexpr const char* kTgtEmb = "tgt.emb.txt";
constexpr const char* kDict = "dict.tsv";
constexpr const char* kTrain = "train.tsv";
constexpr const char* kTest = "test.tsv";
constexpr const char* kMapping = "mapping.txt";
constexpr const char* kMappedEmb = "src.mapped.emb.txt";
constexpr const char* kReportJson = "report.json";
constexpr const char* kReportText = "report.txt";

std::optional<Stage> producing_stage(const std::string& file) {
  if (file == kSrcTok || file == kTgtTok || file == kSrcVocab || file == kTgtVocab) {
    return Stage::Preprocess;
  }
  if (file == kSrcEmb || file == kTgtEmb) return Stage::TrainEmbeddings;
  if (file == kDict) return Stage::BuildDict;
  if (file == kTrain || file == kTest) return Stage::Split;
  if (file == kMapping || file == kMappedEmb) return Stage::Map;
  return std::nullopt;
}

std::string iso_utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + tmp.string());
    os << content;
    if (!os.flush()) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// One pipeline run per output directory.
class DirLock {
public:
  explicit DirLock(const std::filesystem::path& dir) {
    const auto lock_path = dir / ".lock";
    fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open lock file: " + lock_path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw Error("another pipeline run holds the lock on " + dir.string());
    }
  }
  ~DirLock() {
    if (fd_ >= 0) ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

private:
  int fd_ = -1;
};

void require_known_keys(const json& obj, std::initializer_list<const char*> known,
                        const std::string& section) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end()) {
      throw Error("config: unknown key '" + key + "' in " + section);
    }
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return path;
  return base / path;
}

json retrieval_json(const RetrievalConfig& rc) {
  return json{{"mode", mode_name(rc.mode)},
              {"k", rc.k},
              {"beta", rc.beta},
              {"batch_size", rc.batch_size},
              {"top_n", rc.top_n}};
}

}  // namespace

Stage parse_stage(const std::string& name) {
  for (Stage s : kStageOrder) {
    if (stage_name(s) == name) return s;
  }
  throw Error("unknown stage '" + name +
              "' (expected preprocess, train-embeddings, build-dict, split, map or evaluate)");
}

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::Preprocess: return "preprocess";
    case Stage::TrainEmbeddings: return "train-embeddings";
    case Stage::BuildDict: return "build-dict";
    case Stage::Split: return "split";
    case Stage::Map: return "map";
    case Stage::Evaluate: return "evaluate";
  }
  return "?";
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw Error("config " + path.string() + " is not valid JSON: " + e.what());
  }
  const std::filesystem::path base = path.parent_path().empty() ? "." : path.parent_path();

  PipelineConfig cfg;
  require_known_keys(j,
                     {"language_pair", "paths", "token_rules", "sgns", "split", "normalize",
                      "retrieval", "top_n", "threads", "backend"},
                     "config");
  cfg.language_pair = j.value("language_pair", cfg.language_pair);

  if (!j.contains("paths")) throw Error("config: missing 'paths' section");
  {
    const auto& p = j.at("paths");
    require_known_keys(p, {"source_corpus", "target_corpus", "work_dir", "cache_dir"},
                       "'paths'");
    if (!p.contains("source_corpus") || !p.contains("target_corpus") ||
        !p.contains("work_dir")) {
      throw Error("config: paths requires source_corpus, target_corpus and work_dir");
    }
    cfg.source_corpus = resolve(base, p.at("source_corpus").get<std::string>());
    cfg.target_corpus = resolve(base, p.at("target_corpus").get<std::string>());
    cfg.work_dir = resolve(base, p.at("work_dir").get<std::string>());
    cfg.cache_dir = p.contains("cache_dir")
                        ? resolve(base, p.at("cache_dir").get<std::string>())
                        : cfg.work_dir / "cache";
  }

  if (j.contains("token_rules")) {
    const auto& r = j.at("token_rules");
    require_known_keys(r, {"lowercase", "unicode_nfc", "min_token_length"}, "'token_rules'");
    cfg.rules.lowercase = r.value("lowercase", cfg.rules.lowercase);
    cfg.rules.unicode_nfc = r.value("unicode_nfc", cfg.rules.unicode_nfc);
    cfg.rules.min_token_length = r.value("min_token_length", cfg.rules.min_token_length);
  }

  if (j.contains("sgns")) {
    const auto& s = j.at("sgns");
    require_known_keys(s,
                       {"dimension", "window", "epochs", "negatives", "min_count",
                        "learning_rate", "min_learning_rate", "seed", "threads",
                        "dynamic_window", "subsample", "unigram_power"},
                       "'sgns'");
    cfg.sgns.dimension = s.value("dimension", cfg.sgns.dimension);
    cfg.sgns.window = s.value("window", cfg.sgns.window);
    cfg.sgns.epochs = s.value("epochs", cfg.sgns.epochs);
    cfg.sgns.negatives = s.value("negatives", cfg.sgns.negatives);
    cfg.sgns.min_count = s.value("min_count", cfg.sgns.min_count);
    cfg.sgns.learning_rate = s.value("learning_rate", cfg.sgns.learning_rate);
    cfg.sgns.min_learning_rate = s.value("min_learning_rate", cfg.sgns.min_learning_rate);
    cfg.sgns.seed = s.value("seed", cfg.sgns.seed);
    cfg.sgns.threads = s.value("threads", cfg.sgns.threads);
    cfg.sgns.dynamic_window = s.value("dynamic_window", cfg.sgns.dynamic_window);
    cfg.sgns.subsample = s.value("subsample", cfg.sgns.subsample);
    cfg.sgns.unigram_power = s.value("unigram_power", cfg.sgns.unigram_power);
  }

  if (j.contains("split")) {
    const auto& s = j.at("split");
    require_known_keys(s, {"train_fraction", "seed"}, "'split'");
    cfg.split.train_fraction = s.value("train_fraction", cfg.split.train_fraction);
    cfg.split.seed = s.value("seed", cfg.split.seed);
  }

  cfg.normalize = j.value("normalize", cfg.normalize);
  cfg.top_n = j.value("top_n", cfg.top_n);
  cfg.threads = j.value("threads", cfg.threads);

  if (j.contains("retrieval")) {
    cfg.retrieval.clear();
    for (const auto& r : j.at("retrieval")) {
      require_known_keys(r, {"mode", "k", "beta", "batch_size"}, "'retrieval'");
      RetrievalConfig rc;
      rc.mode = parse_mode(r.at("mode").get<std::string>());
      rc.k = r.value("k", rc.k);
      rc.beta = r.value("beta", rc.beta);
      rc.batch_size = r.value("batch_size", rc.batch_size);
      cfg.retrieval.push_back(rc);
    }
  }
  for (auto& rc : cfg.retrieval) rc.top_n = cfg.top_n;

  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    require_known_keys(b,
                       {"kind", "table", "endpoint", "api_key_env", "lang", "parallelism",
                        "retries", "backoff_ms", "daily_limit", "monthly_limit"},
                       "'backend'");
    cfg.backend.kind = b.value("kind", cfg.backend.kind);
    if (b.contains("table")) cfg.backend.table = resolve(base, b.at("table").get<std::string>());
    cfg.backend.endpoint = b.value("endpoint", cfg.backend.endpoint);
    cfg.backend.api_key_env = b.value("api_key_env", cfg.backend.api_key_env);
    cfg.backend.lang = b.value("lang", cfg.backend.lang);
    cfg.backend.parallelism = b.value("parallelism", cfg.backend.parallelism);
    cfg.backend.retries = b.value("retries", cfg.backend.retries);
    cfg.backend.backoff_ms = b.value("backoff_ms", cfg.backend.backoff_ms);
    cfg.backend.daily_limit = b.value("daily_limit", cfg.backend.daily_limit);
    cfg.backend.monthly_limit = b.value("monthly_limit", cfg.backend.monthly_limit);
  }
  if (cfg.backend.lang.empty()) cfg.backend.lang = cfg.language_pair;
  return cfg;
}

void PipelineConfig::validate() const {
  namespace fs = std::filesystem;
  if (!fs::exists(source_corpus)) throw Error("source corpus not found: " + source_corpus.string());
  if (!fs::exists(target_corpus)) throw Error("target corpus not found: " + target_corpus.string());
  if (work_dir.empty()) throw Error("config: work_dir is required");
  sgns.validate();
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
    throw Error("config: split.train_fraction must lie in (0, 1)");
  }
  if (retrieval.empty()) throw Error("config: at least one retrieval mode is required");
  for (std::size_t i = 0; i < retrieval.size(); ++i) {
    for (std::size_t k = i + 1; k < retrieval.size(); ++k) {
      if (retrieval[i].mode == retrieval[k].mode) {
        throw Error("config: duplicate retrieval mode '" + mode_name(retrieval[i].mode) + "'");
      }
    }
  }
  if (top_n < 1) throw Error("config: top_n must be >= 1");
  if (threads < 1) throw Error("config: threads must be >= 1");
  if (backend.kind == "static") {
    if (backend.table.empty()) throw Error("config: static backend requires backend.table");
    if (!fs::exists(backend.table)) {
      throw Error("static translation table not found: " + backend.table.string());
    }
  } else if (backend.kind == "http") {
    if (backend.endpoint.empty()) throw Error("config: http backend requires backend.endpoint");
  } else {
    throw Error("config: backend.kind must be 'static' or 'http'");
  }
}

PipelineManifest PipelineManifest::load_or_create(const std::filesystem::path& path) {
  PipelineManifest m;
  std::ifstream is(path);
  if (!is) return m;  // fresh directory
  json j;
  try {
    j = json::parse(is);
    if (!j.contains("format_version")) throw Error("missing format_version");
    if (j.at("format_version") != 1) {
      throw Error("unsupported format_version " + j.at("format_version").dump());
    }
    const json stages = j.value("stages", json::object());
    for (const auto& [name, rec] : stages.items()) {
      StageRecord r;
      r.input_digests =
          rec.value("input_digests", std::map<std::string, std::string>{});
      r.config_digest = rec.value("config_digest", "");
      r.outputs = rec.value("outputs", std::vector<std::string>{});
      r.output_digests =
          rec.value("output_digests", std::map<std::string, std::string>{});
      r.completed_at = rec.value("completed_at", "");
      m.stages.emplace(name, std::move(r));
    }
  } catch (const std::exception& e) {
    throw ManifestError("manifest unreadable (" + path.string() + ": " + e.what() +
                        "); use --reset to start over");
  }
  return m;
}

void PipelineManifest::save_atomic(const std::filesystem::path& path) const {
  json stages_json = json::object();
  for (const auto& [name, r] : stages) {
    stages_json[name] = json{{"input_digests", r.input_digests},
                             {"config_digest", r.config_digest},
                             {"outputs", r.outputs},
                             {"output_digests", r.output_digests},
                             {"completed_at", r.completed_at}};
  }
  const json j{{"format_version", format_version}, {"stages", stages_json}};
  write_file_atomic(path, j.dump(2) + "\n");
}

namespace {

class PipelineRunner {
public:
  PipelineRunner(PipelineConfig cfg, const RunOptions& opts) : cfg_(std::move(cfg)), opts_(opts) {
    if (opts.seed) {
      cfg_.sgns.seed = *opts.seed;
      cfg_.split.seed = *opts.seed;
    }
    if (opts.threads) {
      cfg_.sgns.threads = *opts.threads;
      cfg_.threads = *opts.threads;
    }
    cfg_.validate();
    std::filesystem::create_directories(cfg_.work_dir);
    std::filesystem::create_directories(cfg_.cache_dir);
    lock_ = std::make_unique<DirLock>(cfg_.work_dir);
    const auto manifest_path = this->manifest_path();
    if (opts.reset) std::filesystem::remove(manifest_path);
    manifest_ = PipelineManifest::load_or_create(manifest_path);
  }

  StageOutcome run(Stage stage) {
    const std::string name = stage_name(stage);
    const auto inputs = stage_inputs(stage);
    const std::string config_digest = sha256_hex(stage_config(stage).dump());

    // Prerequisites: every input file must exist, either produced by an
    // earlier stage or supplied externally.
    std::map<std::string, std::string> input_digests;
    for (const auto& [key, path] : inputs) {
      if (!std::filesystem::exists(path)) {
        if (auto producer = producing_stage(key)) {
          throw Error("stage '" + stage_name(*producer) + "' incomplete: missing " +
                      path.string() + "; run '" + stage_name(*producer) + "' first");
        }
        throw Error("stage '" + name + "': missing input " + path.string());
      }
      input_digests.emplace(key, sha256_file(path));
    }

    const auto outputs = stage_outputs(stage);
    const auto rec = manifest_.stages.find(name);
    const bool outputs_present =
        std::all_of(outputs.begin(), outputs.end(), [&](const std::string& o) {
          return std::filesystem::exists(cfg_.work_dir / o);
        });

    if (rec != manifest_.stages.end() && rec->second.input_digests == input_digests &&
        rec->second.config_digest == config_digest && outputs_present) {
      say("stage " + name + ": cached, skipping");
      return outcome(stage, true, outputs);
    }

    if (opts_.no_overwrite && outputs_present) {
      throw Error("stage '" + name +
                  "' is stale (inputs or config changed) but --no-overwrite is set");
    }

    say("stage " + name + ": running");
    execute(stage);

    StageRecord record;
    record.input_digests = std::move(input_digests);
    record.config_digest = config_digest;
    record.outputs = outputs;
    for (const auto& o : outputs) {
      record.output_digests.emplace(o, sha256_file(cfg_.work_dir / o));
    }
    record.completed_at = iso_utc_now();
    manifest_.stages[name] = std::move(record);
    manifest_.save_atomic(manifest_path());
    return outcome(stage, false, outputs);
  }

private:
  std::filesystem::path manifest_path() const { return cfg_.work_dir / "manifest.json"; }

  void say(const std::string& line) const {
    if (!opts_.quiet) std::cout << line << '\n';
  }

  StageOutcome outcome(Stage stage, bool skipped, const std::vector<std::string>& outputs) const {
    StageOutcome o;
    o.stage = stage;
    o.skipped = skipped;
    for (const auto& f : outputs) o.outputs.push_back(cfg_.work_dir / f);
    return o;
  }

  // Input files per stage, keyed by a stable name (stage outputs keep their
  // work_dir-relative name so the producing stage can be identified).
  std::vector<std::pair<std::string, std::filesystem::path>> stage_inputs(Stage stage) const {
    switch (stage) {
      case Stage::Preprocess:
        return {{cfg_.source_corpus.string(), cfg_.source_corpus},
                {cfg_.target_corpus.string(), cfg_.target_corpus}};
      case Stage::TrainEmbeddings:
        return {{kSrcTok, cfg_.work_dir / kSrcTok}, {kTgtTok, cfg_.work_dir / kTgtTok}};
      case Stage::BuildDict: {
        std::vector<std::pair<std::string, std::filesystem::path>> in{
            {kSrcVocab, cfg_.work_dir / kSrcVocab}};
        if (cfg_.backend.kind == "static") {
          in.emplace_back(cfg_.backend.table.string(), cfg_.backend.table);
        }
        return in;
      }
      case Stage::Split:
        return {{kDict, cfg_.work_dir / kDict}};
      case Stage::Map:
        return {{kTrain, cfg_.work_dir / kTrain},
                {kSrcEmb, cfg_.work_dir / kSrcEmb},
                {kTgtEmb, cfg_.work_dir / kTgtEmb}};
      case Stage::Evaluate:
        return {{kTest, cfg_.work_dir / kTest},
                {kMappedEmb, cfg_.work_dir / kMappedEmb},
                {kTgtEmb, cfg_.work_dir / kTgtEmb}};
    }
    return {};
  }

  std::vector<std::string> stage_outputs(Stage stage) const {
    switch (stage) {
      case Stage::Preprocess: return {kSrcTok, kTgtTok, kSrcVocab, kTgtVocab};
      case Stage::TrainEmbeddings: return {kSrcEmb, kTgtEmb};
      case Stage::BuildDict: return {kDict};
      case Stage::Split: return {kTrain, kTest};
      case Stage::Map: return {kMapping, kMappedEmb};
      case Stage::Evaluate: {
        std::vector<std::string> out{kReportJson, kReportText};
        for (const auto& rc : cfg_.retrieval) {
          out.push_back("predictions." + mode_name(rc.mode) + ".tsv");
        }
        return out;
      }
    }
    return {};
  }

  // The config subsection a stage depends on; changing anything here makes
  // the stage stale.
  json stage_config(Stage stage) const {
    switch (stage) {
      case Stage::Preprocess:
        return json{{"lowercase", cfg_.rules.lowercase},
                    {"unicode_nfc", cfg_.rules.unicode_nfc},
                    {"min_token_length", cfg_.rules.min_token_length},
                    {"min_count", cfg_.sgns.min_count}};
      case Stage::TrainEmbeddings:
        return json{{"dimension", cfg_.sgns.dimension},
                    {"window", cfg_.sgns.window},
                    {"epochs", cfg_.sgns.epochs},
                    {"negatives", cfg_.sgns.negatives},
                    {"min_count", cfg_.sgns.min_count},
                    {"learning_rate", cfg_.sgns.learning_rate},
                    {"min_learning_rate", cfg_.sgns.min_learning_rate},
                    {"seed", cfg_.sgns.seed},
                    {"threads", cfg_.sgns.threads},
                    {"dynamic_window", cfg_.sgns.dynamic_window},
                    {"subsample", cfg_.sgns.subsample},
                    {"unigram_power", cfg_.sgns.unigram_power}};
      case Stage::BuildDict:
        return json{{"kind", cfg_.backend.kind},
                    {"endpoint", cfg_.backend.endpoint},
                    {"lang", cfg_.backend.lang},
                    {"daily_limit", cfg_.backend.daily_limit},
                    {"monthly_limit", cfg_.backend.monthly_limit},
                    {"lowercase", cfg_.rules.lowercase},
                    {"unicode_nfc", cfg_.rules.unicode_nfc},
                    {"min_token_length", cfg_.rules.min_token_length}};
      case Stage::Split:
        return json{{"train_fraction", cfg_.split.train_fraction}, {"seed", cfg_.split.seed}};
      case Stage::Map:
        return json{{"normalize", cfg_.normalize}};
      case Stage::Evaluate: {
        json modes = json::array();
        for (const auto& rc : cfg_.retrieval) modes.push_back(retrieval_json(rc));
        return json{{"retrieval", std::move(modes)},
                    {"top_n", cfg_.top_n},
                    {"language_pair", cfg_.language_pair}};
      }
    }
    return json::object();
  }

  void execute(Stage stage) {
    switch (stage) {
      case Stage::Preprocess: return do_preprocess();
      case Stage::TrainEmbeddings: return do_train();
      case Stage::BuildDict: return do_build_dict();
      case Stage::Split: return do_split();
      case Stage::Map: return do_map();
      case Stage::Evaluate: return do_evaluate();
    }
  }

  void do_preprocess() {
    const auto process = [&](const std::filesystem::path& corpus, const char* tok_file,
                             const char* vocab_file) {
      const auto sents = tokenize_lines(read_lines(corpus), cfg_.rules, cfg_.threads);
      write_tokenized(cfg_.work_dir / tok_file, sents);
      const Vocabulary vocab = build_vocab(sents, cfg_.sgns.min_count, cfg_.threads);
      vocab.save(cfg_.work_dir / vocab_file);
      say("  " + corpus.filename().string() + ": " + std::to_string(sents.size()) +
          " sentences, vocabulary " + std::to_string(vocab.size()));
    };
    process(cfg_.source_corpus, kSrcTok, kSrcVocab);
    process(cfg_.target_corpus, kTgtTok, kTgtVocab);
  }

  void do_train() {
    // The target side trains with a shifted seed so the two monolingual
    // spaces are not trivially correlated by the RNG stream.
    SgnsConfig src_cfg = cfg_.sgns;
    SgnsConfig tgt_cfg = cfg_.sgns;
    tgt_cfg.seed = cfg_.sgns.seed + 1;
    const auto train_one = [&](const char* tok_file, const SgnsConfig& sc, const char* emb_file) {
      const auto sents = read_tokenized(cfg_.work_dir / tok_file);
      const EmbeddingTable table = train_sgns(sents, sc);
      save_embeddings(table, cfg_.work_dir / emb_file);
      say("  " + std::string(emb_file) + ": " + std::to_string(table.size()) + " x " +
          std::to_string(table.dim()));
    };
    train_one(kSrcTok, src_cfg, kSrcEmb);
    train_one(kTgtTok, tgt_cfg, kTgtEmb);
  }

  void do_build_dict() {
    const Vocabulary vocab = Vocabulary::load(cfg_.work_dir / kSrcVocab);
    const std::vector<std::string> words = vocab.words();

    std::unique_ptr<TranslationBackend> backend;
    if (cfg_.backend.kind == "static") {
      backend = std::make_unique<StaticTableBackend>(
          StaticTableBackend::from_file(cfg_.backend.table));
    } else {
      HttpBackendConfig hc;
      hc.endpoint = cfg_.backend.endpoint;
      hc.lang_pair = cfg_.backend.lang;
      hc.api_key_env = cfg_.backend.api_key_env;
      hc.retries = cfg_.backend.retries;
      hc.backoff_ms = cfg_.backend.backoff_ms;
      backend = std::make_unique<HttpBackend>(hc);
    }

    TranslationCache cache(cfg_.cache_dir / (cfg_.backend.lang + ".tsv"));
    const auto budget_path = cfg_.cache_dir / "budget.json";
    CharBudget budget = CharBudget::load(budget_path, cfg_.backend.daily_limit,
                                         cfg_.backend.monthly_limit, utc_day_string(),
                                         utc_month_string());

    TranslateOptions topts;
    topts.rules = cfg_.rules;
    topts.parallelism = cfg_.backend.parallelism;
    topts.cache = &cache;
    topts.budget_state = budget_path;

    const TranslateReport report = translate_batch(words, *backend, budget, topts);
    budget.save(budget_path);
    report.dict.save(cfg_.work_dir / kDict);
    say("  dictionary: " + std::to_string(report.dict.size()) + " pairs (" +
        std::to_string(report.n_skipped_multiword) + " multiword skipped, " +
        std::to_string(report.n_skipped_unavailable) + " unavailable, " +
        std::to_string(report.n_cache_hits) + " cache hits)");
  }

  void do_split() {
    const auto dict = BilingualDictionary::load(cfg_.work_dir / kDict);
    auto [train, test] = split_dictionary(dict, cfg_.split);
    train.save(cfg_.work_dir / kTrain);
    test.save(cfg_.work_dir / kTest);
    say("  split: " + std::to_string(train.size()) + " train, " + std::to_string(test.size()) +
        " test");
  }

  void do_map() {
    const auto train = BilingualDictionary::load(cfg_.work_dir / kTrain);
    const auto src = load_embeddings(cfg_.work_dir / kSrcEmb);
    const auto tgt = load_embeddings(cfg_.work_dir / kTgtEmb);
    const AlignedMatrices am = align(train, src, tgt, cfg_.normalize);
    const MappingModel model = fit_orthogonal(am);
    model.save(cfg_.work_dir / kMapping);
    const EmbeddingTable mapped = apply_mapping(model, src);
    save_embeddings(mapped, cfg_.work_dir / kMappedEmb);
    say("  mapping: " + std::to_string(am.X.rows()) + " training rows, " +
        std::to_string(am.dropped) + " dropped");
  }

  void do_evaluate() {
    const auto test = BilingualDictionary::load(cfg_.work_dir / kTest);
    const auto src_mapped = load_embeddings(cfg_.work_dir / kMappedEmb);
    const auto tgt = load_embeddings(cfg_.work_dir / kTgtEmb);

    const CoverageResult cov = coverage(test, src_mapped, tgt);
    EvalReport report;
    report.language_pair = cfg_.language_pair;
    report.n_test_pairs = cov.n_test_pairs;
    report.n_test_sources = cov.n_test_sources;
    report.n_covered = cov.covered.size();
    report.n_covered_pairs = cov.n_covered_pairs;
    report.coverage_pct = cov.coverage_pct;
    report.test_digest = dictionary_digest(test);

    for (const auto& rc : cfg_.retrieval) {
      const auto results = retrieve(cov.covered, src_mapped, tgt, rc, cfg_.threads);
      std::vector<Prediction> top1;
      top1.reserve(results.size());
      for (const auto& r : results) {
        top1.push_back({r.query, r.candidates.at(0).first, r.candidates.at(0).second, false});
      }
      ModeResult mr;
      mr.mode = mode_name(rc.mode);
      mr.result = accuracy(test, cov, top1);
      report.modes.push_back(std::move(mr));

      std::ofstream os(cfg_.work_dir / ("predictions." + mode_name(rc.mode) + ".tsv"));
      if (!os) throw Error("cannot write predictions file");
      write_predictions(os, results);
    }

    write_file_atomic(cfg_.work_dir / kReportJson, report_to_json(report).dump(2) + "\n");
    write_file_atomic(cfg_.work_dir / kReportText, report_to_text(report));
    say(report_to_text(report));
  }

  PipelineConfig cfg_;
  RunOptions opts_;
  std::unique_ptr<DirLock> lock_;
  PipelineManifest manifest_;
};

}  // namespace

StageOutcome run_stage(Stage stage, const PipelineConfig& config, const RunOptions& opts) {
  PipelineRunner runner(config, opts);
  return runner.run(stage);
}

std::vector<StageOutcome> run_all(const PipelineConfig& config, const RunOptions& opts,
                                  std::optional<Stage> up_to) {
  PipelineRunner runner(config, opts);
  std::vector<StageOutcome> outcomes;
  for (Stage s : kStageOrder) {
    outcomes.push_back(runner.run(s));
    if (up_to && s == *up_to) break;
  }
  return outcomes;
}

}  // namespace lexmap
