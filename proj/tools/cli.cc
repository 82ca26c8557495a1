// cli.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// embstab command line: transform -> train -> stability / entropy ->
// correlate / report, plus sweep.

#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "embstab/analysis.h"
#include "embstab/corpus.h"
#include "embstab/embedding_io.h"
#include "embstab/errors.h"
#include "embstab/format.h"
#include "embstab/hashing.h"
#include "embstab/manifest.h"
#include "embstab/noisiness.h"
#include "embstab/parallel.h"
#include "embstab/sgns.h"
#include "embstab/stability.h"
#include "embstab/sweep.h"

namespace embstab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ifstream open_input(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string("cannot open ") + what + " " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

fs::path output_dir_or_default(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "embstab_out";
}

std::set<std::string> read_id_list(const fs::path& path) {
  auto in = open_input(path, "id list");
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string id;
    if (fields >> id) ids.insert(id);
  }
  return ids;
}

fs::path concepts_sidecar(const fs::path& tokens) { return fs::path(tokens.string() + ".concepts"); }
fs::path transform_sidecar(const fs::path& tokens) { return fs::path(tokens.string() + ".meta.json"); }

TokenCorpus load_tokens(const fs::path& path) {
  auto in = open_input(path, "token corpus");
  return read_token_corpus(in);
}

// Concept list for neighbor candidates: explicit flag, else the transform
// sidecar next to the token file, else none (every token is a candidate).
std::optional<std::set<std::string>> resolve_concepts(const std::string& flag, const std::string& tokens,
                                                      bool all_neighbors) {
  if (all_neighbors) return std::nullopt;
  if (!flag.empty()) return read_id_list(flag);
  if (!tokens.empty() && fs::exists(concepts_sidecar(tokens))) return read_id_list(concepts_sidecar(tokens));
  return std::nullopt;
}

std::vector<EmbeddingSpace> load_spaces(const std::vector<std::string>& paths) {
  std::vector<EmbeddingSpace> spaces;
  for (const auto& p : paths) spaces.push_back(load_space(p));
  check_comparable(spaces);
  return spaces;
}

Vocabulary resolve_vocab(const std::string& vocab_flag, const std::vector<std::string>& space_paths,
                         const EmbeddingSpace& first,
                         const TokenCorpus* tokens) {
  Vocabulary vocab;
  if (!vocab_flag.empty()) {
    auto in = open_input(vocab_flag, "vocabulary");
    vocab = Vocabulary::read(in);
  } else if (tokens) {
    vocab = build_vocab(*tokens, first.hyperparams.min_count).vocabulary;
  } else {
    const fs::path guess = fs::path(space_paths.front()).parent_path() / "vocab.tsv";
    if (!fs::exists(guess)) throw InputError("no vocabulary: pass --vocab or --tokens");
    auto in = open_input(guess, "vocabulary");
    vocab = Vocabulary::read(in);
  }
  if (vocab.fingerprint() != first.vocab_fingerprint) {
    throw IncomparableError("vocabulary does not match the spaces' fingerprint");
  }
  return vocab;
}

std::vector<std::int32_t> evaluated_tokens(const Vocabulary& vocab,
                                           const std::optional<std::set<std::string>>& concepts,
                                           std::uint64_t min_freq, std::uint64_t max_freq) {
  return select_tokens(vocab, [&](std::int32_t i, std::uint64_t f) {
    if (concepts && !concepts->count(vocab.token(static_cast<std::size_t>(i)))) return false;
    return f >= min_freq && (max_freq == 0 || f < max_freq);
  });
}

CandidateMask mask_for(const Vocabulary& vocab, const std::optional<std::set<std::string>>& concepts) {
  if (!concepts) return {};
  std::vector<std::string> names;
  names.reserve(vocab.size());
  for (const auto& e : vocab.entries()) names.push_back(e.token);
  return candidate_mask(names, *concepts);
}

struct HyperparamFlags {
  Hyperparams p;

  void attach(CLI::App* app) {
    app->add_option("--dim", p.dim, "Embedding size")->capture_default_str();
    app->add_option("-W,--window", p.window, "Max context distance")->capture_default_str();
    app->add_option("-E,--epochs", p.epochs, "Training epochs")->capture_default_str();
    app->add_option("-N,--negatives", p.negatives, "Negative samples per pair")->capture_default_str();
    app->add_option("-M,--smoothing", p.smoothing, "Negative distribution exponent")->capture_default_str();
    app->add_option("-S,--subsample", p.subsample, "Subsampling threshold")->capture_default_str();
    app->add_option("--min-count", p.min_count, "Minimum token frequency")->capture_default_str();
    app->add_option("--lr", p.initial_lr, "Initial learning rate")->capture_default_str();
    app->add_option("--min-lr", p.final_lr, "Final learning rate")->capture_default_str();
    app->add_flag("--fixed-window", p.fixed_window, "Use the full window at every position");
  }
};

// ---------------------------------------------------------------- transform

struct TransformArgs {
  std::string input, output, mode = "cui2vec";
};

int cmd_transform(const TransformArgs& a, std::ostream& err) {
  const Mode mode = parse_mode(a.mode);
  auto in = open_input(a.input, "input");
  auto out = open_output(a.output);
  std::set<std::string> concepts;
  std::size_t written = 0;
  bool pending_break = false;
  for_each_tagged_sentence(
      in, TagFormat{},
      [&](TaggedSentence&& s) {
        for (const Token& t : s.tokens) {
          if (const auto* c = std::get_if<Concept>(&t)) concepts.insert(c->id);
        }
        const auto tokens = transform(s, mode);
        if (tokens.empty()) return;
        if (pending_break && written) out << '\n';
        pending_break = false;
        for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? " " : "") << tokens[i];
        out << '\n';
        ++written;
      },
      [&] { pending_break = true; });

  if (mode != Mode::kWords) {
    auto cout = open_output(concepts_sidecar(a.output));
    for (const auto& c : concepts) cout << c << '\n';
  }
  auto meta = open_output(transform_sidecar(a.output));
  meta << json{{"mode", std::string(mode_name(mode))},
               {"source", a.input},
               {"source_sha256", sha256_file(a.input)},
               {"sentences", written}}
              .dump(2)
       << '\n';
  if (written == 0) err << "warning: transform produced no sentences (" << mode_name(mode) << " mode)\n";
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string tokens, output, mode;
  HyperparamFlags hp;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t jobs = 1;
  std::size_t threads = 1;
};

int cmd_train(const TrainArgs& a, std::ostream& err) {
  const TokenCorpus corpus = load_tokens(a.tokens);
  for (const auto& w : a.hp.p.validate()) err << "warning: " << w << '\n';
  if (a.seeds.empty()) throw InputError("--seeds must list at least one seed");

  Mode mode = Mode::kWords;
  if (!a.mode.empty()) {
    mode = parse_mode(a.mode);
  } else if (fs::exists(transform_sidecar(a.tokens))) {
    std::ifstream in(transform_sidecar(a.tokens));
    try {
      mode = parse_mode(json::parse(in).at("mode").get<std::string>());
    } catch (const json::exception&) {
      throw InputError("malformed " + transform_sidecar(a.tokens).string());
    }
  }

  const VocabResult vr = build_vocab(corpus, a.hp.p.min_count, a.jobs);
  const EncodedCorpus encoded = encode(corpus.sentences, vr.vocabulary);
  const fs::path out_dir = output_dir_or_default(a.output);

  RunManifest manifest;
  manifest.command = "train";
  manifest.corpus_path = a.tokens;
  manifest.corpus_hash = sha256_file(a.tokens);
  manifest.mode = mode;
  manifest.hyperparams = a.hp.p;
  manifest.seeds = a.seeds;
  manifest.output_dir = out_dir.string();
  manifest.extra = {{"threads", a.threads}};
  const std::string hash = manifest.write(out_dir);

  {
    auto vout = open_output(out_dir / "vocab.tsv");
    vr.vocabulary.write(vout);
  }
  TrainOptions options;
  options.threads = a.threads;
  parallel_for(a.seeds.size(), a.threads > 1 ? 1 : a.jobs, [&](std::size_t i) {
    TrainResult r = train(encoded, vr.vocabulary, a.hp.p, a.seeds[i], options);
    save_space(out_dir / ("space_" + std::to_string(i) + "_seed_" + std::to_string(a.seeds[i]) + ".vec"), r.space,
               hash);
  });
  err << "trained " << a.seeds.size() << " space(s) over " << vr.vocabulary.size() << " tokens into "
      << out_dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- stability

struct StabilityArgs {
  std::vector<std::string> spaces;
  std::string vocab, tokens, concepts, output, dump;
  std::size_t n = 10;
  std::size_t jobs = 1;
  bool all_neighbors = false;
  std::uint64_t min_frequency = 0;
  std::uint64_t max_frequency = 0;  // exclusive; 0 = unbounded
};

int cmd_stability(const StabilityArgs& a, std::ostream& err) {
  const auto spaces = load_spaces(a.spaces);
  std::optional<TokenCorpus> tokens;
  if (!a.tokens.empty()) tokens = load_tokens(a.tokens);
  const Vocabulary vocab = resolve_vocab(a.vocab, a.spaces, spaces.front(), tokens ? &*tokens : nullptr);
  const auto concepts = resolve_concepts(a.concepts, a.tokens, a.all_neighbors);

  StabilityOptions options;
  options.n = a.n;
  options.jobs = a.jobs;
  options.candidates = mask_for(vocab, concepts);
  options.keep_neighbors = !a.dump.empty();
  const auto report =
      stability_report(spaces, evaluated_tokens(vocab, concepts, a.min_frequency, a.max_frequency), options);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  const fs::path out = a.output.empty() ? output_dir_or_default("") / "stability.csv" : fs::path(a.output);
  auto os = open_output(out);
  write_stability_csv(os, report, vocab);
  if (!a.dump.empty()) {
    auto ds = open_output(a.dump);
    write_neighbor_dump(ds, report, vocab);
  }
  return kOk;
}

// ---------------------------------------------------------------- entropy

struct EntropyArgs {
  std::string tokens, vocab, output;
  int window = 7;
  std::uint64_t min_count = 5;
  bool after_subsampling = false;
  double subsample = 1e-3;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

int cmd_entropy(const EntropyArgs& a, std::ostream&) {
  const TokenCorpus corpus = load_tokens(a.tokens);
  Vocabulary vocab;
  if (!a.vocab.empty()) {
    auto in = open_input(a.vocab, "vocabulary");
    vocab = Vocabulary::read(in);
  } else {
    vocab = build_vocab(corpus, a.min_count, a.jobs).vocabulary;
  }
  EncodedCorpus encoded = encode(corpus.sentences, vocab);
  if (a.after_subsampling) encoded = subsample_corpus(encoded, vocab, a.subsample, a.seed);
  const auto records = entropy_records(collect_context_profiles(encoded, vocab.size(), a.window, a.jobs), vocab);
  const fs::path out = a.output.empty() ? output_dir_or_default("") / "entropy.csv" : fs::path(a.output);
  auto os = open_output(out);
  write_entropy_csv(os, records, vocab);
  return kOk;
}

// ---------------------------------------------------------------- correlate

struct CorrelateArgs {
  std::string joined, stability, entropy, common, output;
  std::uint64_t low_freq = kDefaultLowFrequency;
};

std::vector<JoinedRecord> join_csv_files(const fs::path& stability, const fs::path& entropy) {
  auto sin = open_input(stability, "stability CSV");
  auto ein = open_input(entropy, "entropy CSV");
  const auto srows = read_csv(sin);
  const auto erows = read_csv(ein);
  if (srows.empty() || srows.front() != std::vector<std::string>{"token", "frequency", "stability"}) {
    throw InputError("stability CSV: unexpected header");
  }
  if (erows.empty() ||
      erows.front() != std::vector<std::string>{"token", "frequency", "distinct_contexts", "normalized_entropy"}) {
    throw InputError("entropy CSV: unexpected header");
  }
  std::map<std::string, const std::vector<std::string>*> by_token;
  for (std::size_t i = 1; i < erows.size(); ++i) {
    if (erows[i].size() != 4) throw ParseError(i + 1, "entropy CSV: expected 4 fields");
    by_token[erows[i][0]] = &erows[i];
  }
  std::vector<JoinedRecord> out;
  for (std::size_t i = 1; i < srows.size(); ++i) {
    const auto& f = srows[i];
    if (f.size() != 3) throw ParseError(i + 1, "stability CSV: expected 3 fields");
    JoinedRecord r;
    r.token = static_cast<std::int32_t>(i - 1);
    r.name = f[0];
    try {
      r.frequency = std::stoull(f[1]);
    } catch (const std::exception&) {
      throw ParseError(i + 1, "stability CSV: malformed frequency");
    }
    r.stability = parse_double(f[2], "stability");
    if (auto it = by_token.find(r.name); it != by_token.end()) {
      const auto& e = *it->second;
      r.distinct_contexts = std::stoull(e[2]);
      if (e[3] != "NA") r.entropy = parse_double(e[3], "normalized_entropy");
    }
    out.push_back(std::move(r));
  }
  return out;
}

int cmd_correlate(const CorrelateArgs& a, std::ostream& err) {
  std::vector<JoinedRecord> records;
  if (!a.joined.empty()) {
    auto in = open_input(a.joined, "joined CSV");
    records = read_joined_csv(in);
  } else if (!a.stability.empty() && !a.entropy.empty()) {
    records = join_csv_files(a.stability, a.entropy);
  } else {
    throw InputError("correlate needs --joined, or both --stability and --entropy");
  }
  std::set<std::string> common;
  if (!a.common.empty()) common = read_id_list(a.common);
  for (auto& r : records) {
    r.low_freq = r.frequency < a.low_freq;
    if (!a.common.empty()) r.common = common.count(r.name) > 0;
  }
  const bool have_common =
      !a.common.empty() || std::any_of(records.begin(), records.end(), [](const JoinedRecord& r) { return r.common; });
  const auto rows = correlation_table(records, have_common);
  for (const auto& r : rows) {
    if (r.status != "ok") err << "warning: " << r.measure << '/' << r.group << ": " << r.status << '\n';
  }
  const fs::path out = a.output.empty() ? output_dir_or_default("") / "correlation.csv" : fs::path(a.output);
  auto os = open_output(out);
  write_correlation_csv(os, rows);
  return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> spaces;
  std::string tokens, vocab, concepts, common, output;
  int window = 0;  // 0: the spaces' training window
  std::size_t n = 10;
  std::size_t jobs = 1;
  std::uint64_t low_freq = kDefaultLowFrequency;
  bool all_neighbors = false;
  bool after_subsampling = false;
};

int cmd_report(const ReportArgs& a, std::ostream& err) {
  const auto spaces = load_spaces(a.spaces);
  const TokenCorpus corpus = load_tokens(a.tokens);
  const Vocabulary vocab = resolve_vocab(a.vocab, a.spaces, spaces.front(), &corpus);
  const auto concepts = resolve_concepts(a.concepts, a.tokens, a.all_neighbors);
  std::set<std::string> common;
  if (!a.common.empty()) common = read_id_list(a.common);
  const Hyperparams& trained = spaces.front().hyperparams;
  const int window = a.window > 0 ? a.window : trained.window;
  const fs::path out_dir = output_dir_or_default(a.output);

  static constexpr const char* kFiles[] = {"stability.csv", "entropy.csv", "joined.csv",
                                           "correlation.csv", "heatmap.csv", "heatmap_long.csv"};
  RunManifest manifest;
  manifest.command = "report";
  manifest.corpus_path = a.tokens;
  manifest.corpus_hash = sha256_file(a.tokens);
  manifest.hyperparams = trained;
  for (const auto& s : spaces) manifest.seeds.push_back(s.seed);
  manifest.output_dir = out_dir.string();
  json space_hashes = json::array();
  for (const auto& p : a.spaces) space_hashes.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  manifest.extra = {{"spaces", space_hashes},
                    {"neighbors", a.n},
                    {"entropy_window", window},
                    {"entropy_after_subsampling", a.after_subsampling},
                    {"concept_neighbors_only", concepts.has_value()},
                    {"low_freq_threshold", a.low_freq},
                    {"files", kFiles}};
  manifest.write(out_dir);

  StabilityOptions options;
  options.n = a.n;
  options.jobs = a.jobs;
  options.candidates = mask_for(vocab, concepts);
  const auto stab = stability_report(spaces, evaluated_tokens(vocab, concepts, 0, 0), options);
  for (const auto& w : stab.warnings) err << "warning: " << w << '\n';

  EncodedCorpus encoded = encode(corpus.sentences, vocab);
  if (a.after_subsampling) encoded = subsample_corpus(encoded, vocab, trained.subsample, spaces.front().seed);
  const auto entropy = entropy_records(collect_context_profiles(encoded, vocab.size(), window, a.jobs), vocab);
  const auto joined = join_records(stab, entropy, vocab, common, a.low_freq);
  const auto table = correlation_table(joined, !a.common.empty());
  for (const auto& r : table) {
    if (r.status != "ok") err << "warning: " << r.measure << '/' << r.group << ": " << r.status << '\n';
  }
  const auto grid = bin_heatmap(joined, default_frequency_edges(vocab.min_count()), default_stability_edges());

  {
    auto os = open_output(out_dir / "stability.csv");
    write_stability_csv(os, stab, vocab);
  }
  {
    auto os = open_output(out_dir / "entropy.csv");
    std::vector<EntropyRecord> rows;
    for (const auto& s : stab.records) rows.push_back(entropy[static_cast<std::size_t>(s.token)]);
    write_entropy_csv(os, rows, vocab);
  }
  {
    auto os = open_output(out_dir / "joined.csv");
    write_joined_csv(os, joined);
  }
  {
    auto os = open_output(out_dir / "correlation.csv");
    write_correlation_csv(os, table);
  }
  {
    auto os = open_output(out_dir / "heatmap.csv");
    write_heatmap_grid_csv(os, grid);
  }
  {
    auto os = open_output(out_dir / "heatmap_long.csv");
    write_heatmap_long_csv(os, grid);
  }
  err << "report over " << joined.size() << " tokens written to " << out_dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string config, output;
  std::size_t jobs = 0;  // 0: keep the config's value
};

int cmd_sweep(const SweepArgs& a, std::ostream& err) {
  SweepConfig config = load_sweep_config(a.config);
  if (!a.output.empty()) config.output = a.output;
  if (config.output.empty()) config.output = output_dir_or_default("");
  if (a.jobs) config.jobs = a.jobs;
  auto in = open_input(config.corpus, "corpus");
  const auto corpus = parse_tagged_text(in);
  const SweepReport report = run_sweep(corpus, config);
  write_sweep_report(config.output, report);
  err << "sweep: " << report.rows.size() << " rows, " << report.trained << " trained, " << report.reused
      << " reused, written to " << config.output.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& err) {
  CLI::App app{"Embedding stability toolkit: train seeded skip-gram spaces, measure nearest-neighbor "
               "stability and context-word entropy"};
  app.require_subcommand(1);

  TransformArgs transform_args;
  auto* transform = app.add_subcommand("transform", "Convert tagged text to a token stream");
  transform->add_option("-i,--input", transform_args.input, "Tagged text, one sentence per line")->required();
  transform->add_option("-o,--output", transform_args.output, "Token stream file")->required();
  transform->add_option("--mode", transform_args.mode, "cui2vec, nlm or words")->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train one skip-gram space per seed");
  train_cmd->add_option("-t,--tokens", train_args.tokens, "Token stream file")->required();
  train_cmd->add_option("-o,--output", train_args.output, "Output directory");
  train_cmd->add_option("--mode", train_args.mode, "Corpus mode recorded in the manifest");
  train_cmd->add_option("--seeds", train_args.seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
  train_cmd->add_option("--jobs", train_args.jobs, "Concurrent training runs")->capture_default_str();
  train_cmd->add_option("--threads", train_args.threads,
                        "Threads per run; >1 enables non-deterministic parallel updates")
      ->capture_default_str();
  train_args.hp.attach(train_cmd);

  StabilityArgs stab_args;
  auto* stab = app.add_subcommand("stability", "Nearest-neighbor stability across spaces");
  stab->add_option("--spaces", stab_args.spaces, "Embedding files (two or more)")->required()->expected(2, -1);
  stab->add_option("--vocab", stab_args.vocab, "Vocabulary file (default: vocab.tsv beside the spaces)");
  stab->add_option("--tokens", stab_args.tokens, "Token stream to rebuild the vocabulary from");
  stab->add_option("-n,--neighbors", stab_args.n, "Neighbors per token")->capture_default_str();
  stab->add_option("--concepts", stab_args.concepts, "Concept ids restricting queries and candidates");
  stab->add_flag("--all-neighbors", stab_args.all_neighbors, "Let every token be a neighbor candidate");
  stab->add_option("--min-frequency", stab_args.min_frequency, "Only tokens with frequency >= this");
  stab->add_option("--max-frequency", stab_args.max_frequency, "Only tokens with frequency < this");
  stab->add_option("-o,--output", stab_args.output, "CSV path");
  stab->add_option("--neighbors-dump", stab_args.dump, "Per-space neighbor lists CSV");
  stab->add_option("--jobs", stab_args.jobs, "Threads for neighbor search")->capture_default_str();

  EntropyArgs ent_args;
  auto* ent = app.add_subcommand("entropy", "Normalized entropy of context-word distributions");
  ent->add_option("-t,--tokens", ent_args.tokens, "Token stream file")->required();
  ent->add_option("--vocab", ent_args.vocab, "Vocabulary file (default: rebuilt with --min-count)");
  ent->add_option("-W,--window", ent_args.window, "Context window")->capture_default_str();
  ent->add_option("--min-count", ent_args.min_count, "Minimum token frequency")->capture_default_str();
  ent->add_flag("--entropy-after-subsampling", ent_args.after_subsampling,
                "Count contexts on the subsampled stream");
  ent->add_option("-S,--subsample", ent_args.subsample, "Subsampling threshold")->capture_default_str();
  ent->add_option("--seed", ent_args.seed, "Seed for subsampling")->capture_default_str();
  ent->add_option("-o,--output", ent_args.output, "CSV path");
  ent->add_option("--jobs", ent_args.jobs, "Counting threads")->capture_default_str();

  CorrelateArgs corr_args;
  auto* corr = app.add_subcommand("correlate", "Pearson correlations by token group");
  corr->add_option("--joined", corr_args.joined, "joined.csv from report");
  corr->add_option("--stability", corr_args.stability, "stability CSV");
  corr->add_option("--entropy", corr_args.entropy, "entropy CSV");
  corr->add_option("--common", corr_args.common, "Common-concept id list");
  corr->add_option("--low-freq", corr_args.low_freq, "Low-frequency threshold (exclusive)")->capture_default_str();
  corr->add_option("-o,--output", corr_args.output, "CSV path");

  ReportArgs rep_args;
  auto* rep = app.add_subcommand("report", "Stability, entropy, correlations and heatmaps in one pass");
  rep->add_option("--spaces", rep_args.spaces, "Embedding files (two or more)")->required()->expected(2, -1);
  rep->add_option("-t,--tokens", rep_args.tokens, "Token stream the spaces were trained on")->required();
  rep->add_option("--vocab", rep_args.vocab, "Vocabulary file (default: rebuilt from --tokens)");
  rep->add_option("--concepts", rep_args.concepts, "Concept ids (default: <tokens>.concepts if present)");
  rep->add_flag("--all-neighbors", rep_args.all_neighbors, "Evaluate every token against every token");
  rep->add_option("--common", rep_args.common, "Common-concept id list");
  rep->add_option("-W,--window", rep_args.window, "Entropy window (default: training window)");
  rep->add_option("-n,--neighbors", rep_args.n, "Neighbors per token")->capture_default_str();
  rep->add_option("--low-freq", rep_args.low_freq, "Low-frequency threshold (exclusive)")->capture_default_str();
  rep->add_flag("--entropy-after-subsampling", rep_args.after_subsampling,
                "Count contexts on the subsampled stream");
  rep->add_option("-o,--output", rep_args.output, "Output directory");
  rep->add_option("--jobs", rep_args.jobs, "Threads")->capture_default_str();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "One-axis-at-a-time hyperparameter sweep");
  sweep->add_option("-c,--config", sweep_args.config, "Sweep config (JSON)")->required();
  sweep->add_option("-o,--output", sweep_args.output, "Output directory (overrides the config)");
  sweep->add_option("--jobs", sweep_args.jobs, "Concurrent training runs (overrides the config)");

  std::vector<std::string> argv_rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(argv_rest);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    err << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*transform) return cmd_transform(transform_args, err);
    if (*train_cmd) return cmd_train(train_args, err);
    if (*stab) return cmd_stability(stab_args, err);
    if (*ent) return cmd_entropy(ent_args, err);
    if (*corr) return cmd_correlate(corr_args, err);
    if (*rep) return cmd_report(rep_args, err);
    if (*sweep) return cmd_sweep(sweep_args, err);
  } catch (const IncomparableError& e) {
    err << "error: " << e.what() << '\n';
    return kIncomparable;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace embstab::cli
