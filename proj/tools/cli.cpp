#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ccnrank/corpus.hpp"
#include "ccnrank/errors.hpp"
#include "ccnrank/evaluation.hpp"
#include "ccnrank/hash.hpp"
#include "ccnrank/models.hpp"
#include "ccnrank/synthetic.hpp"
#include "ccnrank/toy_problem.hpp"
#include "ccnrank/training.hpp"
#include "ccnrank/vocab.hpp"

namespace ccnrank::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json file_record(const fs::path& path) {
  return Json{{"path", path.string()}, {"fnv1a64", to_hex(hash_file(path))}};
}

// The manifest is the first artifact a command produces.
void write_manifest(const std::optional<fs::path>& path, const Json& manifest,
                    std::ostream& err) {
  if (!path) {
    err << "manifest: " << manifest.dump() << '\n';
    return;
  }
  if (path->has_parent_path()) fs::create_directories(path->parent_path());
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path->string() + "' for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path->string() + "'");
}

Json model_config_json(const ModelConfig& c) {
  return Json{{"architecture", architecture_name(c.architecture)},
              {"embedding_dim", c.embedding_dim},
              {"hidden_size", c.hidden_size},
              {"max_length", c.max_length},
              {"k", c.k},
              {"frequency_threshold", c.frequency_threshold},
              {"seed", c.seed},
              {"precision", c.precision},
              {"ccn_head", ccn_head_name(c.ccn_head)},
              {"embedding_init", c.embedding_init},
              {"weight_init", c.weight_init}};
}

Json train_config_json(const TrainConfig& c) {
  return Json{{"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
              {"rho", c.rho},               {"epsilon", c.epsilon},
              {"max_epochs", c.max_epochs}, {"patience", c.patience},
              {"seed", c.seed},             {"clip_norm", c.clip_norm},
              {"record_wall_clock", c.record_wall_clock}};
}

Json synthetic_config_json(const SyntheticConfig& c) {
  return Json{{"topics", c.topics},
              {"keywords_per_topic", c.keywords_per_topic},
              {"filler_vocab_size", c.filler_vocab_size},
              {"context_turns", c.context_turns},
              {"frequency_threshold", c.frequency_threshold},
              {"topic_filler_rate", c.topic_filler_rate},
              {"min_utterance_length", c.min_utterance_length},
              {"max_utterance_length", c.max_utterance_length}};
}

// --- gen-synthetic ------------------------------------------------------------

struct GenOptions {
  std::uint64_t seed = 7;
  std::size_t n_train = 4000;
  std::size_t n_eval = 500;
  std::string out_dir;
  std::string generator_config;
};

int gen_synthetic(const GenOptions& o, std::ostream& out, std::ostream& err) {
  SyntheticConfig config;
  Json inputs = Json::object();
  if (!o.generator_config.empty()) {
    config = load_synthetic_config(o.generator_config);
    inputs["generator_config"] = file_record(o.generator_config);
  }
  config.seed = o.seed;
  config.validate();

  const fs::path dir(o.out_dir);
  const fs::path train = dir / "train.csv";
  const fs::path validation = dir / "validation.csv";
  const fs::path eval = dir / "eval.csv";
  Json manifest{{"command", "gen-synthetic"},
                {"seed", o.seed},
                {"config", {{"n_train", o.n_train},
                            {"n_eval", o.n_eval},
                            {"generator", synthetic_config_json(config)}}},
                {"inputs", inputs},
                {"outputs", {train.string(), validation.string(), eval.string()}}};
  fs::create_directories(dir);
  write_manifest(dir / "manifest.json", manifest, err);

  const SyntheticCorpus corpus = generate_synthetic(o.seed, o.n_train, o.n_eval, config);
  save_train(train, corpus.train);
  save_eval(validation, corpus.validation);
  save_eval(eval, corpus.eval);
  out << "train\t" << train.string() << '\t' << corpus.train.size() << '\n'
      << "validation\t" << validation.string() << '\t' << corpus.validation.size() << '\n'
      << "eval\t" << eval.string() << '\t' << corpus.eval.size() << '\n';
  return kSuccess;
}

// --- prepare-vocab ------------------------------------------------------------

struct VocabOptions {
  std::string train;
  std::string out;
  std::size_t threshold = kDefaultFrequencyThreshold;
  std::string manifest;
};

int prepare_vocab(const VocabOptions& o, std::ostream& out, std::ostream& err) {
  Json manifest{{"command", "prepare-vocab"},
                {"config", {{"frequency_threshold", o.threshold}}},
                {"inputs", {{"train", file_record(o.train)}}},
                {"outputs", {o.out}}};
  write_manifest(o.manifest.empty() ? std::nullopt : std::optional<fs::path>(o.manifest),
                 manifest, err);
  const Vocabulary vocab = build_vocab(load_train(o.train));
  vocab.save(o.out);
  const FrequencySplit split(vocab, o.threshold);
  out << "vocabulary_size\t" << vocab.size() << '\n'
      << "high_band\t" << split.high().size() << '\n'
      << "low_band\t" << split.low().size() << '\n'
      << "hash\t" << to_hex(vocab.hash()) << '\n';
  return kSuccess;
}

// --- train --------------------------------------------------------------------

struct TrainOptions {
  std::string architecture;
  std::string ccn_head = "sigmoid";
  std::string train;
  std::string validation;
  std::string out;
  std::string vocab;
  std::string embeddings;
  std::uint64_t seed = 0;
  ModelConfig model;
  TrainConfig training;
  bool no_wall_clock = false;
};

int train_command(TrainOptions o, std::ostream& out, std::ostream& err) {
  o.model.architecture = parse_architecture(o.architecture);
  o.model.ccn_head = parse_ccn_head(o.ccn_head);
  o.model.seed = o.seed;
  o.training.seed = o.seed;
  o.training.record_wall_clock = !o.no_wall_clock;
  o.model.validate();
  o.training.validate();

  const fs::path ckpt(o.out);
  const fs::path vocab_path = o.vocab.empty() ? fs::path(o.out + ".vocab") : fs::path(o.vocab);
  const fs::path log_path(o.out + ".log");
  Json inputs{{"train", file_record(o.train)}, {"validation", file_record(o.validation)}};
  if (!o.vocab.empty()) inputs["vocab"] = file_record(o.vocab);
  if (!o.embeddings.empty()) inputs["embeddings"] = file_record(o.embeddings);
  Json outputs = Json::array({ckpt.string(), log_path.string()});
  if (o.vocab.empty()) outputs.push_back(vocab_path.string());
  Json manifest{{"command", "train"},
                {"seed", o.seed},
                {"config", {{"model", model_config_json(o.model)},
                            {"training", train_config_json(o.training)}}},
                {"inputs", inputs},
                {"outputs", outputs}};
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  write_manifest(fs::path(o.out + ".manifest.json"), manifest, err);

  const auto train_set = load_train(o.train);
  const auto validation = load_eval(o.validation);
  std::shared_ptr<const Vocabulary> vocab;
  if (o.vocab.empty()) {
    vocab = std::make_shared<const Vocabulary>(build_vocab(train_set));
    vocab->save(vocab_path);
  } else {
    vocab = std::make_shared<const Vocabulary>(Vocabulary::load(vocab_path));
  }
  const Featurizer featurizer(vocab, o.model.max_length, o.model.frequency_threshold);
  Model model(o.model, vocab->size(), vocab->hash());
  if (!o.embeddings.empty()) {
    const std::size_t covered = model.load_pretrained(o.embeddings, featurizer);
    err << "pretrained vectors cover " << covered << " of "
        << featurizer.split().high().size() << " high-frequency words\n";
  }

  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw IoError("cannot open '" + log_path.string() + "' for writing");
  write_epoch_log_header(log);
  const TrainResult result =
      train(std::move(model), train_set, validation, featurizer, o.training,
            [&](const EpochReport& r) {
              write_epoch_log_line(log, r);
              log.flush();
              err << "epoch " << r.epoch << ": loss " << r.mean_loss << ", val_acc "
                  << r.validation_accuracy << ", val_recall1 " << r.validation_recall1 << '\n';
            });
  if (!log) throw IoError("failed writing '" + log_path.string() + "'");
  save_checkpoint(result.best, ckpt);

  const EpochReport& best = result.reports[result.best_epoch - 1];
  out << "best_epoch\t" << result.best_epoch << '\n'
      << "val_acc\t" << format_double(best.validation_accuracy) << '\n'
      << "val_recall1\t" << format_double(best.validation_recall1) << '\n';
  return kSuccess;
}

// --- evaluate / rescore -------------------------------------------------------

struct EvalOptions {
  std::vector<std::string> models;
  std::string eval;
  std::string vocab;
  std::optional<double> scale;
  std::string tune;
  std::size_t threads = 1;
  std::string manifest;
};

struct LoadedScorers {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<std::unique_ptr<ModelScorer>> owned;
  std::vector<const CandidateScorer*> view;
};

LoadedScorers load_scorers(const EvalOptions& o) {
  LoadedScorers s;
  const fs::path vocab_path = o.vocab.empty() ? fs::path(o.models.front() + ".vocab") : fs::path(o.vocab);
  s.vocab = std::make_shared<const Vocabulary>(Vocabulary::load(vocab_path));
  const std::uint64_t expected = s.vocab->hash();
  for (const auto& path : o.models) {
    auto model = std::make_shared<const Model>(load_checkpoint(path));
    if (model->vocabulary_hash() != expected) {
      throw ContractError("checkpoint '" + path + "' was trained with vocabulary " +
                          to_hex(model->vocabulary_hash()) + ", but '" +
                          vocab_path.string() + "' hashes to " + to_hex(expected));
    }
    const auto& c = model->config();
    auto featurizer =
        std::make_shared<const Featurizer>(s.vocab, c.max_length, c.frequency_threshold);
    s.owned.push_back(std::make_unique<ModelScorer>(std::move(model), std::move(featurizer)));
    s.view.push_back(s.owned.back().get());
  }
  return s;
}

Json eval_manifest(const std::string& command, const EvalOptions& o) {
  Json models = Json::array();
  for (const auto& m : o.models) models.push_back(file_record(m));
  Json inputs{{"models", models}, {"eval", file_record(o.eval)}};
  inputs["vocab"] = file_record(o.vocab.empty() ? o.models.front() + ".vocab" : o.vocab);
  if (!o.tune.empty()) inputs["tune"] = file_record(o.tune);
  Json config{{"threads", o.threads}};
  if (o.scale) config["cwf_scale"] = *o.scale;
  return Json{{"command", command}, {"config", config}, {"inputs", inputs},
              {"outputs", Json::array()}};
}

double resolve_scale(const EvalOptions& o, const LoadedScorers& s, std::ostream& out) {
  if (o.tune.empty()) return o.scale.value_or(0.0);
  const auto validation = load_eval(o.tune);
  const auto sets = score_instances(s.view, validation, *s.vocab, o.threads);
  const double scale = tune_scale(sets, default_scale_grid());
  out << "tuned_scale\t" << format_double(scale) << '\n';
  return scale;
}

int evaluate_command(const std::string& command, const EvalOptions& o, std::ostream& out,
                     std::ostream& err) {
  write_manifest(o.manifest.empty() ? std::nullopt : std::optional<fs::path>(o.manifest),
                 eval_manifest(command, o), err);
  const LoadedScorers s = load_scorers(o);
  const auto instances = load_eval(o.eval);
  const double scale = resolve_scale(o, s, out);
  write_report(out, evaluate(s.view, instances, *s.vocab, scale, o.threads));
  return kSuccess;
}

int rescore_command(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  write_manifest(o.manifest.empty() ? std::nullopt : std::optional<fs::path>(o.manifest),
                 eval_manifest("rescore", o), err);
  const LoadedScorers s = load_scorers(o);
  const auto instances = load_eval(o.eval);
  const double scale = resolve_scale(o, s, out);
  const auto sets = score_instances(s.view, instances, *s.vocab, o.threads);
  out << "instance\tcandidate\tprobability\tcwf\tadjusted\n";
  for (std::size_t n = 0; n < sets.size(); ++n) {
    const CandidateScores adjusted = cwf_rescore(sets[n], scale);
    for (std::size_t i = 0; i < kCandidatesPerInstance; ++i) {
      out << n << '\t' << i << '\t' << format_double(sets[n].probabilities[i]) << '\t'
          << format_double(sets[n].cwf[i]) << '\t' << format_double(adjusted[i]) << '\n';
    }
  }
  return kSuccess;
}

// --- gradcheck ----------------------------------------------------------------

struct GradcheckOptions {
  std::string architecture;
  std::string ccn_head = "sigmoid";
  std::uint64_t seed = ToyProblemConfig{}.seed;
  GradCheckOptions check;
  bool corrupt = false;
};

int gradcheck_command(GradcheckOptions o, std::ostream& out, std::ostream& err) {
  ToyProblemConfig toy;
  toy.architecture = parse_architecture(o.architecture);
  toy.ccn_head = parse_ccn_head(o.ccn_head);
  toy.seed = o.seed;
  o.check.seed = o.seed;
  if (o.corrupt) o.check.analytic_scale = 2.0;
  Json manifest{{"command", "gradcheck"},
                {"seed", o.seed},
                {"config", {{"architecture", o.architecture},
                            {"ccn_head", o.ccn_head},
                            {"embedding_dim", toy.embedding_dim},
                            {"hidden_size", toy.hidden_size},
                            {"max_length", toy.max_length},
                            {"vocabulary_size", toy.word_count + 2},
                            {"h", o.check.h},
                            {"tolerance", o.check.tolerance},
                            {"samples_per_parameter", o.check.samples_per_parameter},
                            {"corrupt_gradient", o.corrupt}}},
                {"inputs", Json::object()},
                {"outputs", Json::array()}};
  write_manifest(std::nullopt, manifest, err);

  ToyProblem problem = make_toy_problem(toy);
  const GradCheckReport report = check_gradients(problem, o.check);
  out << "architecture\t" << o.architecture << '\n'
      << "max_relative_error\t" << format_double(report.max_relative_error) << '\n'
      << "worst_parameter\t" << report.worst_parameter << '[' << report.worst_index << "]\n"
      << "coordinates_checked\t" << report.coordinates_checked << '\n'
      << "status\t" << (report.passed ? "pass" : "fail") << '\n';
  return report.passed ? kSuccess : kVerificationFailure;
}

// --- wiring -------------------------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string option_name(const std::string& arg) {
  return arg.substr(0, arg.find('='));
}

// Replaces `--config FILE` with one `--key=value` argument per line of FILE,
// skipping keys that are also given explicitly. Lines are `key = value`;
// '#' starts a comment and a bare key sets a flag.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config || rest.empty()) return rest;

  std::ifstream in(*config);
  if (!in) throw IoError("cannot open config file '" + *config + "'");
  std::vector<std::string> explicit_names;
  for (const auto& a : rest) {
    if (a.rfind("--", 0) == 0) explicit_names.push_back(option_name(a));
  }
  std::vector<std::string> merged{rest.front()};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (std::find(explicit_names.begin(), explicit_names.end(), key) != explicit_names.end()) {
      continue;
    }
    merged.push_back(eq == std::string::npos ? key : key + "=" + trim(line.substr(eq + 1)));
  }
  merged.insert(merged.end(), rest.begin() + 1, rest.end());
  return merged;
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help) {
  static std::string config_placeholder;
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", config_placeholder,
                  "key = value file merged under the explicit flags");
  return sub;
}

void add_eval_flags(CLI::App* sub, EvalOptions& o) {
  sub->add_option("--models,--model", o.models, "Checkpoints, comma-separated")
      ->required()
      ->delimiter(',');
  sub->add_option("--eval", o.eval, "Eval CSV")->required();
  sub->add_option("--vocab", o.vocab, "Vocabulary file (default: <first model>.vocab)");
  auto* scale = sub->add_option("--cwf-scale", o.scale, "Common-word rescoring scale")
                    ->check(CLI::NonNegativeNumber);
  auto* tune = sub->add_option("--tune-cwf", o.tune, "Tune the scale on this validation CSV");
  scale->excludes(tune);
  sub->add_option("--threads", o.threads, "Scoring threads")->check(CLI::PositiveNumber);
  sub->add_option("--manifest", o.manifest, "Write the run manifest here");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Response ranking for multi-turn dialogue: train, evaluate and rescore.",
               "ccnrank");
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = add_command(app, "gen-synthetic", "Write a synthetic corpus");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--train", gen.n_train, "Training rows")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--eval", gen.n_eval, "Eval and validation instances")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--generator-config", gen.generator_config,
                      "Generator settings as key = value lines");

  VocabOptions voc;
  auto* voc_cmd = add_command(app, "prepare-vocab", "Build a vocabulary from training data");
  voc_cmd->add_option("--train", voc.train, "Training CSV")->required();
  voc_cmd->add_option("--out", voc.out, "Vocabulary file")->required();
  voc_cmd->add_option("--threshold", voc.threshold, "Frequency threshold for the band report");
  voc_cmd->add_option("--manifest", voc.manifest, "Write the run manifest here");

  TrainOptions tr;
  auto* train_cmd = add_command(app, "train", "Train a model");
  train_cmd->add_option("--arch", tr.architecture, "dual_lstm, mfcw_lstm or ccn_lstm")
      ->required();
  train_cmd->add_option("--train", tr.train, "Training CSV")->required();
  train_cmd->add_option("--val", tr.validation, "Validation CSV (eval layout)")->required();
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--seed", tr.seed, "Seed for initialization and shuffling");
  train_cmd->add_option("--vocab", tr.vocab, "Existing vocabulary file");
  train_cmd->add_option("--embeddings", tr.embeddings, "Pretrained vectors, `word v1 ... vN`");
  train_cmd->add_option("--embedding-dim", tr.model.embedding_dim, "N");
  train_cmd->add_option("--hidden-size", tr.model.hidden_size, "H");
  train_cmd->add_option("--max-length", tr.model.max_length, "L");
  train_cmd->add_option("--k", tr.model.k, "k-max pooling width");
  train_cmd->add_option("--threshold", tr.model.frequency_threshold, "Frequency threshold");
  train_cmd->add_option("--ccn-head", tr.ccn_head, "sigmoid or linear_sigmoid");
  train_cmd->add_option("--precision", tr.model.precision, "Only f64");
  train_cmd->add_option("--embedding-init", tr.model.embedding_init,
                        "Embedding init range [-x, x]");
  train_cmd->add_option("--weight-init", tr.model.weight_init, "Weight init range [-x, x]");
  train_cmd->add_option("--batch-size", tr.training.batch_size, "Mini-batch size");
  train_cmd->add_option("--lr", tr.training.learning_rate, "RMSProp learning rate");
  train_cmd->add_option("--rho", tr.training.rho, "RMSProp decay");
  train_cmd->add_option("--epsilon", tr.training.epsilon, "RMSProp epsilon");
  train_cmd->add_option("--epochs", tr.training.max_epochs, "Maximum epochs");
  train_cmd->add_option("--patience", tr.training.patience, "Early-stopping patience");
  train_cmd->add_option("--clip-norm", tr.training.clip_norm, "Global gradient-norm clip, 0 = off");
  train_cmd->add_flag("--no-wall-clock", tr.no_wall_clock,
                      "Record 0 seconds in the run log so it is reproducible byte for byte");

  EvalOptions ev;
  auto* eval_cmd = add_command(app, "evaluate", "Recall@k of one model or an ensemble");
  add_eval_flags(eval_cmd, ev);
  EvalOptions ens;
  auto* ens_cmd = add_command(app, "ensemble-eval", "Same as evaluate");
  add_eval_flags(ens_cmd, ens);
  EvalOptions rs;
  auto* rescore_cmd = add_command(app, "rescore", "Per-candidate probability, cwf and adjusted score");
  add_eval_flags(rescore_cmd, rs);

  GradcheckOptions gc;
  auto* gc_cmd = add_command(app, "gradcheck", "Finite-difference check of a small random model");
  gc_cmd->add_option("--arch", gc.architecture, "dual_lstm, mfcw_lstm or ccn_lstm")->required();
  gc_cmd->add_option("--ccn-head", gc.ccn_head, "sigmoid or linear_sigmoid");
  gc_cmd->add_option("--seed", gc.seed, "Seed");
  gc_cmd->add_option("--step", gc.check.h, "Finite-difference step")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--tolerance", gc.check.tolerance, "Maximum relative error");
  gc_cmd->add_option("--samples", gc.check.samples_per_parameter, "Coordinates per parameter");
  gc_cmd->add_flag("--corrupt-gradient", gc.corrupt,
                   "Double the analytic gradient to confirm the check fails");

  try {
    const std::vector<std::string> expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsageError;
  }

  try {
    if (gen_cmd->parsed()) return gen_synthetic(gen, out, err);
    if (voc_cmd->parsed()) return prepare_vocab(voc, out, err);
    if (train_cmd->parsed()) return train_command(tr, out, err);
    if (eval_cmd->parsed()) return evaluate_command("evaluate", ev, out, err);
    if (ens_cmd->parsed()) return evaluate_command("ensemble-eval", ens, out, err);
    if (rescore_cmd->parsed()) return rescore_command(rs, out, err);
    if (gc_cmd->parsed()) return gradcheck_command(gc, out, err);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kUsageError;
}

}  // namespace ccnrank::cli
