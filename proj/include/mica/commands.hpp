#ifndef MICA_COMMANDS_HPP
#define MICA_COMMANDS_HPP

// The command-line workflows (train, mica-train, predict, eval, inject,
// sweep, synth) as plain functions over a resolved RunConfig. Argument
// parsing lives in tools/mica.cpp; everything here throws mica::Error on
// bad input and writes its outputs under RunConfig::out_dir.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mica/corpus.hpp"
#include "mica/crf.hpp"
#include "mica/error.hpp"
#include "mica/eval.hpp"
#include "mica/mica.hpp"
#include "mica/synthetic.hpp"
#include "mica/typo.hpp"

namespace mica::cli {

inline const std::vector<long long> kDefaultSweepWindows = {0, 1, 8, 32, 128, 512};

struct RunConfig {
  // inputs
  std::string train_file;
  std::string dev_file;
  std::string test_file;
  std::string input_file;
  std::string gold_file;
  std::string pred_file;
  std::string model_file;
  std::string pass1_file;
  std::string pass2_file;
  std::string out_dir = "mica-out";

  TrainConfig train;
  long long window = 0;
  std::vector<long long> windows = kDefaultSweepWindows;

  double typo_rate = 0.15;
  std::string typo_ops = "substitute,delete,insert,transpose,merge_space";
  std::string target = "entities_only";

  // synth
  std::size_t documents = 300;
  std::size_t min_sentences = 6;
  std::size_t max_sentences = 12;
};

// ---------------------------------------------------------------------------
// Config helpers

inline ContextConfig context_config(long long window) {
  if (window < 0) throw Error("--window must be non-negative (got " + std::to_string(window) + ")");
  return ContextConfig{static_cast<std::size_t>(window), true};
}

inline TypoConfig typo_config(const RunConfig& rc) {
  TypoConfig tc;
  tc.rate = rc.typo_rate;
  tc.seed = rc.train.seed;
  tc.operations.clear();
  std::stringstream ss(rc.typo_ops);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    auto op = parse_typo_op(name);
    if (!op) throw Error("unknown typo operation '" + name + "'");
    tc.operations.push_back(*op);
  }
  if (tc.operations.empty()) throw Error("--typo-ops must name at least one operation");
  if (rc.target == "entities_only") tc.target = TypoTarget::entities_only;
  else if (rc.target == "all_tokens") tc.target = TypoTarget::all_tokens;
  else throw Error("--target must be entities_only or all_tokens (got '" + rc.target + "')");
  if (!(tc.rate >= 0.0 && tc.rate <= 1.0)) throw Error("--typo-rate must lie in [0, 1]");
  return tc;
}

inline void validate_train(const TrainConfig& tc) {
  if (tc.epochs < 0) throw Error("--epochs must be non-negative");
  if (!(tc.learning_rate > 0.0)) throw Error("--lr must be positive");
  if (!(tc.l2 >= 0.0)) throw Error("--l2 must be non-negative");
}

inline std::string toml_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

inline std::string toml_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

/// The resolved configuration as key = value lines, loadable with --config.
inline std::string resolved_config(const std::string& command, const RunConfig& rc) {
  std::ostringstream out;
  out << "# mica " << command << "\n";
  auto str = [&](const char* key, const std::string& v) {
    if (!v.empty()) out << key << " = " << toml_string(v) << "\n";
  };
  str("train", rc.train_file);
  str("dev", rc.dev_file);
  str("test", rc.test_file);
  str("input", rc.input_file);
  str("gold", rc.gold_file);
  str("pred", rc.pred_file);
  str("model", rc.model_file);
  str("pass1", rc.pass1_file);
  str("pass2", rc.pass2_file);
  str("out-dir", rc.out_dir);
  out << "epochs = " << rc.train.epochs << "\n";
  out << "lr = " << toml_number(rc.train.learning_rate) << "\n";
  out << "l2 = " << toml_number(rc.train.l2) << "\n";
  out << "seed = " << rc.train.seed << "\n";
  out << "batch-size = " << rc.train.batch_size << "\n";
  out << "window = " << rc.window << "\n";
  out << "windows = [";
  for (std::size_t i = 0; i < rc.windows.size(); ++i) out << (i ? ", " : "") << rc.windows[i];
  out << "]\n";
  out << "typo-rate = " << toml_number(rc.typo_rate) << "\n";
  out << "typo-ops = " << toml_string(rc.typo_ops) << "\n";
  out << "target = " << toml_string(rc.target) << "\n";
  if (command == "synth") {
    out << "documents = " << rc.documents << "\n";
    out << "min-sentences = " << rc.min_sentences << "\n";
    out << "max-sentences = " << rc.max_sentences << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// File helpers

inline std::string read_file(const std::string& path) {
  if (path.empty()) throw Error("missing required input file path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline Corpus load_corpus(const std::string& path, std::ostream& log) {
  const std::string text = read_file(path);
  try {
    auto parsed = parse_conll(text);
    if (parsed.repairs > 0) log << path << ": repaired " << parsed.repairs << " orphan I- tag(s)\n";
    return std::move(parsed.corpus);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

inline std::filesystem::path out_path(const RunConfig& rc, const std::string& name) {
  return std::filesystem::path(rc.out_dir) / name;
}

inline void write_config(const std::string& command, const RunConfig& rc) {
  write_file(out_path(rc, "config.toml"), resolved_config(command, rc));
}

inline Corpus with_predictions(Corpus corpus, const std::vector<DocumentLabels>& predictions) {
  for (std::size_t d = 0; d < corpus.documents.size(); ++d)
    for (std::size_t s = 0; s < corpus.documents[d].sentences.size(); ++s)
      corpus.documents[d].sentences[s].set_labels(Layer::predicted, predictions[d][s]);
  return corpus;
}

inline std::vector<DocumentLabels> predict_corpus(const Corpus& corpus, const CrfModel& pass1,
                                                  const CrfModel* pass2, const ContextConfig& context) {
  std::vector<DocumentLabels> out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents)
    out.push_back(pass2 ? two_pass_predict(doc, pass1, *pass2, context) : decode_document(doc, pass1));
  return out;
}

inline std::string format_report(const EvalReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "type" << std::right << std::setw(7) << "TP" << std::setw(7) << "FP"
      << std::setw(7) << "FN" << std::setw(9) << "Rec" << std::setw(9) << "Prec" << std::setw(9) << "F1"
      << std::setw(9) << "Acc" << "\n";
  auto row = [&](std::string_view name, const EntityCounts& c) {
    out << std::left << std::setw(8) << name << std::right << std::setw(7) << c.tp << std::setw(7) << c.fp
        << std::setw(7) << c.fn << std::setw(9) << percent(c.recall()) << std::setw(9) << percent(c.precision())
        << std::setw(9) << percent(c.f1()) << std::setw(9) << percent(c.accuracy()) << "\n";
  };
  for (EntityType t : kEntityTypes) row(to_string(t), r[t]);
  row("overall", r.overall);
  return out.str();
}

inline EpochObserver epoch_logger(std::ostream& log, std::string tag) {
  return [&log, tag](int epoch, double loss) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", loss);
    log << tag << " epoch " << epoch << " loss " << buf << "\n";
  };
}

// ---------------------------------------------------------------------------
// Commands

/// Baseline CRF on handcrafted features.
inline void cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  validate_train(rc.train);
  const Corpus corpus = load_corpus(rc.train_file, log);
  std::optional<Corpus> dev;
  if (!rc.dev_file.empty()) dev = load_corpus(rc.dev_file, log);
  if (corpus.sentence_count() == 0) throw Error(rc.train_file + ": no training sentences");

  const CrfModel model = train(handcrafted_training_data(corpus), rc.train, epoch_logger(log, "baseline"));
  const auto model_path = rc.model_file.empty() ? out_path(rc, "baseline.crf") : std::filesystem::path(rc.model_file);
  std::filesystem::create_directories(rc.out_dir);
  if (model_path.has_parent_path()) std::filesystem::create_directories(model_path.parent_path());
  save_model(model, model_path);
  write_config("train", rc);
  if (dev) {
    const auto report = score(*dev, with_predictions(*dev, predict_corpus(*dev, model, nullptr, {})), Layer::predicted);
    out << "dev F1 " << percent(report.f1()) << "\n";
  }
  out << "wrote " << model_path.string() << "\n";
}

inline void cmd_mica_train(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  validate_train(rc.train);
  const ContextConfig context = context_config(rc.window);
  const Corpus corpus = load_corpus(rc.train_file, log);
  std::optional<Corpus> dev;
  if (!rc.dev_file.empty()) dev = load_corpus(rc.dev_file, log);
  if (corpus.sentence_count() == 0) throw Error(rc.train_file + ": no training sentences");

  const CrfModel pass1 = train(handcrafted_training_data(corpus), rc.train, epoch_logger(log, "pass1"));
  const auto predictions = decode_corpus(corpus, pass1);
  const CrfModel pass2 = train_second_pass(corpus, predictions, context, rc.train, epoch_logger(log, "pass2"));

  std::filesystem::create_directories(rc.out_dir);
  save_model(pass1, out_path(rc, "pass1.crf"));
  save_model(pass2, out_path(rc, "pass2.crf"));
  write_config("mica-train", rc);
  if (dev) {
    const auto report = score(*dev, with_predictions(*dev, predict_corpus(*dev, pass1, &pass2, context)), Layer::predicted);
    out << "dev F1 " << percent(report.f1()) << " (window " << rc.window << ")\n";
  }
  out << "wrote " << out_path(rc, "pass1.crf").string() << " and " << out_path(rc, "pass2.crf").string() << "\n";
}

inline void cmd_predict(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const bool two_pass = !rc.pass1_file.empty() || !rc.pass2_file.empty();
  if (two_pass && !rc.model_file.empty()) throw Error("use either --model or --pass1/--pass2, not both");
  if (!rc.pass2_file.empty() && rc.pass1_file.empty()) throw Error("--pass2 requires --pass1");
  if (!rc.pass1_file.empty() && rc.pass2_file.empty()) throw Error("--pass1 requires --pass2");
  if (!two_pass && rc.model_file.empty()) throw Error("a model is required (--model, or --pass1 and --pass2)");
  const ContextConfig context = context_config(rc.window);

  const CrfModel first = load_model(two_pass ? rc.pass1_file : rc.model_file);
  std::optional<CrfModel> second;
  if (has_similarity_features(first))
    throw Error("model '" + (two_pass ? rc.pass1_file : rc.model_file) +
                "' expects similarity features; give it as --pass2 together with a --pass1 model");
  if (two_pass) {
    second = load_model(rc.pass2_file);
    if (!has_similarity_features(*second))
      throw Error("model '" + rc.pass2_file + "' has no similarity features; it is not a pass-2 model");
  }

  const Corpus corpus = load_corpus(rc.input_file, log);
  const Corpus predicted = with_predictions(corpus, predict_corpus(corpus, first, second ? &*second : nullptr, context));
  const auto path = rc.pred_file.empty() ? out_path(rc, "predictions.conll") : std::filesystem::path(rc.pred_file);
  write_file(path, write_conll(predicted, Layer::predicted));
  write_config("predict", rc);
  out << "wrote " << path.string() << "\n";
}

inline EvalReport cmd_eval(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const Corpus gold = load_corpus(rc.gold_file, log);
  const Corpus pred = load_corpus(rc.pred_file, log);
  const EvalReport report = score(gold, pred, Layer::gold);
  out << format_report(report);
  return report;
}

inline void cmd_inject(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  const TypoConfig tc = typo_config(rc);
  const Corpus corpus = load_corpus(rc.input_file, log);
  const TypoResult result = inject(corpus, tc);
  write_file(out_path(rc, "noisy.conll"), write_conll(result.corpus, Layer::gold));
  write_file(out_path(rc, "typo_log.csv"), corruption_log_csv(result.log));
  write_config("inject", rc);
  out << "corrupted " << result.log.size() << " token(s); wrote " << out_path(rc, "noisy.conll").string() << "\n";
}

/// Baseline once, then MICA per window; each scored on the clean and the
/// typo-injected test set. Returns the report rows in CSV order.
inline std::vector<SweepRow> cmd_sweep(const RunConfig& rc, std::ostream& out, std::ostream& log) {
  validate_train(rc.train);
  if (rc.windows.empty()) throw Error("--windows must list at least one window");
  std::vector<ContextConfig> contexts;
  for (long long w : rc.windows) contexts.push_back(context_config(w));
  const TypoConfig tc = typo_config(rc);

  const Corpus train_corpus = load_corpus(rc.train_file, log);
  const Corpus test = load_corpus(rc.test_file, log);
  if (train_corpus.sentence_count() == 0) throw Error(rc.train_file + ": no training sentences");
  const Corpus noisy = inject(test, tc).corpus;

  const CrfModel pass1 = train(handcrafted_training_data(train_corpus), rc.train, epoch_logger(log, "baseline"));
  const auto train_predictions = decode_corpus(train_corpus, pass1);
  if (!rc.dev_file.empty()) {
    const Corpus dev = load_corpus(rc.dev_file, log);
    const auto r = score(dev, with_predictions(dev, predict_corpus(dev, pass1, nullptr, {})), Layer::predicted);
    log << "baseline dev F1 " << percent(r.f1()) << "\n";
  }

  const std::array<const Corpus*, 2> sets = {&test, &noisy};
  const std::array<std::string, 2> names = {"clean", "typo"};
  std::array<std::vector<DocumentLabels>, 2> pass1_test;
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < 2; ++k) {
    pass1_test[k] = predict_corpus(*sets[k], pass1, nullptr, {});
    rows.push_back({"crf-baseline/" + names[k], 0,
                    score(*sets[k], with_predictions(*sets[k], pass1_test[k]), Layer::predicted)});
  }
  std::array<std::vector<SweepRow>, 2> mica_rows;
  for (const auto& context : contexts) {
    log << "training pass 2, window " << context.window << "\n";
    const CrfModel pass2 = train_second_pass(train_corpus, train_predictions, context, rc.train);
    for (std::size_t k = 0; k < 2; ++k) {
      std::vector<DocumentLabels> labels;
      for (std::size_t d = 0; d < sets[k]->documents.size(); ++d)
        labels.push_back(decode_second_pass(sets[k]->documents[d], pass1_test[k][d], pass2, context));
      mica_rows[k].push_back({"mica+crf-baseline/" + names[k], context.window,
                              score(*sets[k], with_predictions(*sets[k], labels), Layer::predicted)});
    }
  }
  std::vector<SweepRow> ordered;
  for (std::size_t k = 0; k < 2; ++k) {
    ordered.push_back(rows[k]);
    for (auto& r : mica_rows[k]) ordered.push_back(std::move(r));
  }

  const SweepReport report = sweep_report(ordered);
  write_file(out_path(rc, "sweep.csv"), report.csv);
  write_file(out_path(rc, "sweep.txt"), report.table);
  write_config("sweep", rc);
  out << report.table;
  return ordered;
}

/// Synthetic train/dev/test splits (80/10/10 by document).
inline void cmd_synth(const RunConfig& rc, std::ostream& out, std::ostream&) {
  synthetic::SyntheticConfig sc;
  sc.documents = rc.documents;
  sc.min_sentences = rc.min_sentences;
  sc.max_sentences = rc.max_sentences;
  sc.seed = rc.train.seed;
  const Corpus all = synthetic::generate(sc);
  const std::size_t n = all.documents.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_dev = n / 10;
  Corpus parts[3];
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t k = d < n_train ? 0 : (d < n_train + n_dev ? 1 : 2);
    parts[k].documents.push_back(all.documents[d]);
  }
  const char* names[3] = {"train.conll", "dev.conll", "test.conll"};
  for (int k = 0; k < 3; ++k) write_file(out_path(rc, names[k]), write_conll(parts[k], Layer::gold));
  write_config("synth", rc);
  out << "wrote " << parts[0].documents.size() << "/" << parts[1].documents.size() << "/"
      << parts[2].documents.size() << " train/dev/test documents to " << rc.out_dir << "\n";
}

}  // namespace mica::cli

#endif  // MICA_COMMANDS_HPP
