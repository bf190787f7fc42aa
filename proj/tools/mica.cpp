// mica: command-line front end for the CRF baseline and the two-pass
// dictionary-augmented tagger.
//
// Exit status: 0 on success, 1 on user or configuration errors, 2 when an
// internal invariant fails.

#include <exception>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mica/commands.hpp"

namespace {

using mica::cli::RunConfig;

void add_training_flags(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--epochs", rc.train.epochs, "Training epochs")->capture_default_str();
  cmd.add_option("--lr", rc.train.learning_rate, "Initial learning rate")->capture_default_str();
  cmd.add_option("--l2", rc.train.l2, "L2 regularization strength")->capture_default_str();
  cmd.add_option("--batch-size", rc.train.batch_size, "Mini-batch size")->capture_default_str();
}

void add_seed(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--seed", rc.train.seed, "Random seed")->capture_default_str();
}

void add_typo_flags(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--typo-rate", rc.typo_rate, "Per-token corruption probability")->capture_default_str();
  cmd.add_option("--typo-ops", rc.typo_ops, "Comma-separated typo operations")->capture_default_str();
  cmd.add_option("--target", rc.target, "entities_only or all_tokens")->capture_default_str();
}

void add_out_dir(CLI::App& cmd, RunConfig& rc) {
  cmd.add_option("--out-dir", rc.out_dir, "Output directory")->capture_default_str();
}

// Config files are flat key = value lists; every key is routed to the
// subcommand named on the command line.
class SubcommandConfig : public CLI::ConfigTOML {
 public:
  std::string subcommand;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    for (auto& item : items)
      if (item.parents.empty() && !subcommand.empty()) item.parents = {subcommand};
    return items;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Named entity recognition with a linear-chain CRF and contextual similarity features"};
  app.require_subcommand(1);

  RunConfig rc;

  auto* train = app.add_subcommand("train", "Train the baseline CRF");
  train->add_option("--train", rc.train_file, "Training CoNLL file")->required();
  train->add_option("--dev", rc.dev_file, "Development CoNLL file");
  train->add_option("--model", rc.model_file, "Model output path (default <out-dir>/baseline.crf)");
  add_training_flags(*train, rc);
  add_seed(*train, rc);
  add_out_dir(*train, rc);

  auto* mica_train = app.add_subcommand("mica-train", "Train the pass-1 and pass-2 models");
  mica_train->add_option("--train", rc.train_file, "Training CoNLL file")->required();
  mica_train->add_option("--dev", rc.dev_file, "Development CoNLL file");
  mica_train->add_option("--window", rc.window, "Context window in sentences on each side")->capture_default_str();
  add_training_flags(*mica_train, rc);
  add_seed(*mica_train, rc);
  add_out_dir(*mica_train, rc);

  auto* predict = app.add_subcommand("predict", "Tag a CoNLL file");
  predict->add_option("--input", rc.input_file, "CoNLL file to tag")->required();
  predict->add_option("--model", rc.model_file, "Baseline model");
  predict->add_option("--pass1", rc.pass1_file, "Pass-1 model");
  predict->add_option("--pass2", rc.pass2_file, "Pass-2 model");
  predict->add_option("--pred", rc.pred_file, "Output path (default <out-dir>/predictions.conll)");
  predict->add_option("--window", rc.window, "Context window in sentences on each side")->capture_default_str();
  add_out_dir(*predict, rc);

  auto* eval = app.add_subcommand("eval", "Score predictions against gold labels");
  eval->add_option("--gold", rc.gold_file, "Gold CoNLL file")->required();
  eval->add_option("--pred", rc.pred_file, "Predicted CoNLL file")->required();

  auto* inject = app.add_subcommand("inject", "Write a typo-corrupted copy of a CoNLL file");
  inject->add_option("--input", rc.input_file, "CoNLL file to corrupt")->required();
  add_typo_flags(*inject, rc);
  add_seed(*inject, rc);
  add_out_dir(*inject, rc);

  auto* sweep = app.add_subcommand("sweep", "Baseline vs. two-pass over several windows, clean and noisy");
  sweep->add_option("--train", rc.train_file, "Training CoNLL file")->required();
  sweep->add_option("--dev", rc.dev_file, "Development CoNLL file");
  sweep->add_option("--test", rc.test_file, "Test CoNLL file")->required();
  sweep->add_option("--windows", rc.windows, "Comma-separated context windows")->delimiter(',')->capture_default_str();
  add_training_flags(*sweep, rc);
  add_typo_flags(*sweep, rc);
  add_seed(*sweep, rc);
  add_out_dir(*sweep, rc);

  auto* synth = app.add_subcommand("synth", "Generate synthetic train/dev/test corpora");
  synth->add_option("--documents", rc.documents, "Number of documents")->capture_default_str();
  synth->add_option("--min-sentences", rc.min_sentences, "Minimum sentences per document")->capture_default_str();
  synth->add_option("--max-sentences", rc.max_sentences, "Maximum sentences per document")->capture_default_str();
  add_seed(*synth, rc);
  add_out_dir(*synth, rc);

  auto config = std::make_shared<SubcommandConfig>();
  app.config_formatter(config);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    sub->fallthrough();
    sub->allow_config_extras(CLI::config_extras_mode::ignore);
  }
  for (int i = 1; i < argc && config->subcommand.empty(); ++i)
    if (app.get_subcommand_no_throw(argv[i]) != nullptr) config->subcommand = argv[i];

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    namespace c = mica::cli;
    if (*train) c::cmd_train(rc, std::cout, std::cerr);
    else if (*mica_train) c::cmd_mica_train(rc, std::cout, std::cerr);
    else if (*predict) c::cmd_predict(rc, std::cout, std::cerr);
    else if (*eval) c::cmd_eval(rc, std::cout, std::cerr);
    else if (*inject) c::cmd_inject(rc, std::cout, std::cerr);
    else if (*sweep) c::cmd_sweep(rc, std::cout, std::cerr);
    else if (*synth) c::cmd_synth(rc, std::cout, std::cerr);
  } catch (const mica::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
