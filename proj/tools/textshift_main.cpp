#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "textshift/errors.hpp"
#include "textshift/log.hpp"
#include "textshift/pipeline.hpp"
#include "textshift/report.hpp"

namespace {

using textshift::RunConfig;

// Flags shared by every subcommand. Values land in `pending` first so that a
// --config file is applied before flag overrides, whatever the flag order.
struct CommonFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> dataset;
  std::optional<std::string> dataset_format;
  std::optional<std::string> embeddings;
  std::optional<std::string> model;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> sample;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_file, "flat key=value config file");
  cmd->add_option("--dataset", flags.dataset, "dataset path (csv or pos/neg directory)");
  cmd->add_option("--dataset-format", flags.dataset_format, "csv | dirs (default csv)");
  cmd->add_option("--embeddings", flags.embeddings, "word-vector file (.txt or .gz)");
  cmd->add_option("--model", flags.model, "model file to load or write");
  cmd->add_option("--out", flags.out, "output directory (default out)");
  cmd->add_option("--seed", flags.seed, "master seed for split/sample/train/attack/lime");
  cmd->add_option("--sample", flags.sample, "number of test documents to attack");
}

RunConfig resolve(const CommonFlags& flags) {
  RunConfig config;
  config.propagate_seed();
  if (flags.config_file) textshift::apply_config_file(config, *flags.config_file);
  if (flags.dataset) config.dataset_path = *flags.dataset;
  if (flags.dataset_format) {
    textshift::apply_config_pair(config, "dataset_format", *flags.dataset_format);
  }
  if (flags.embeddings) config.embeddings_path = *flags.embeddings;
  if (flags.model) config.model_path = *flags.model;
  if (flags.out) config.out_dir = *flags.out;
  if (flags.seed) {
    config.seed = *flags.seed;
    config.propagate_seed();
  }
  if (flags.sample) config.sample_n = *flags.sample;
  return config;
}

textshift::LinearTextModel load_model_or_fail(const RunConfig& config) {
  if (config.model_path.empty()) {
    throw textshift::ConfigError("a --model file is required");
  }
  return textshift::LinearTextModel::load(config.model_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"text classifier training, black-box word-level attacks, local surrogate "
               "explanations and drift reports"};
  app.require_subcommand(1);

  CommonFlags flags;
  double test_fraction = -1.0;
  int epochs = -1;
  std::string explain_text;
  int explain_doc_id = -1;
  int num_features = -1;
  int num_samples = -1;
  bool skip_train = false;
  int max_queries = -1;

  CLI::App* cmd_train = app.add_subcommand("train", "train a model and write model + metrics");
  add_common_flags(cmd_train, flags);
  cmd_train->add_option("--test-fraction", test_fraction, "held-out fraction (default 0.2)");
  cmd_train->add_option("--epochs", epochs, "training epochs (default 50)");

  CLI::App* cmd_eval = app.add_subcommand("evaluate", "accuracy of a model on a dataset");
  add_common_flags(cmd_eval, flags);

  CLI::App* cmd_attack = app.add_subcommand("attack", "attack sampled test documents");
  add_common_flags(cmd_attack, flags);
  cmd_attack->add_option("--max-queries", max_queries, "per-attack query budget (default 500)");

  CLI::App* cmd_explain = app.add_subcommand("explain", "explain one text with the surrogate");
  add_common_flags(cmd_explain, flags);
  cmd_explain->add_option("--text", explain_text, "text to explain");
  cmd_explain->add_option("--doc-id", explain_doc_id, "explain this dataset document instead");
  cmd_explain->add_option("--num-features", num_features, "top-K features (default 10)");
  cmd_explain->add_option("--num-samples", num_samples, "perturbation samples (default 1000)");

  CLI::App* cmd_pipeline =
      app.add_subcommand("pipeline", "train (or load), attack, explain before/after, drift");
  add_common_flags(cmd_pipeline, flags);
  cmd_pipeline->add_flag("--skip-train", skip_train, "reuse --model instead of training");
  cmd_pipeline->add_option("--test-fraction", test_fraction, "held-out fraction (default 0.2)");
  cmd_pipeline->add_option("--epochs", epochs, "training epochs (default 50)");
  cmd_pipeline->add_option("--max-queries", max_queries, "per-attack query budget");
  cmd_pipeline->add_option("--num-features", num_features, "top-K features (default 10)");
  cmd_pipeline->add_option("--num-samples", num_samples, "perturbation samples (default 1000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors are exit 2
  }

  try {
    RunConfig config = resolve(flags);
    if (test_fraction >= 0.0) config.test_fraction = test_fraction;
    if (epochs >= 0) config.train.epochs = epochs;
    if (num_features >= 0) config.lime.num_features = num_features;
    if (num_samples >= 0) config.lime.num_samples = num_samples;
    if (max_queries >= 0) config.attack.max_queries = max_queries;
    config.skip_train = skip_train;

    if (cmd_train->parsed()) {
      auto art = textshift::run_train(config);
      std::cout << "model: " << art.model_file << "\n"
                << "train_accuracy: " << art.train_accuracy << "\n"
                << "test_accuracy: " << art.test_accuracy << "\n"
                << "metrics: " << art.metrics_file << "\n";
    } else if (cmd_eval->parsed()) {
      auto model = load_model_or_fail(config);
      double acc = textshift::run_evaluate(config, model);
      std::cout << "accuracy: " << acc << "\n";
    } else if (cmd_attack->parsed()) {
      auto model = load_model_or_fail(config);
      auto art = textshift::run_attack(config, model);
      const auto& s = art.summary;
      std::cout << "results: " << art.results_file << "\n"
                << "success/failed/skipped: " << s.n_success << "/" << s.n_failed << "/"
                << s.n_skipped << "\n";
      if (s.success_rate) std::cout << "success_rate: " << *s.success_rate << "\n";
    } else if (cmd_explain->parsed()) {
      auto model = load_model_or_fail(config);
      std::string text = explain_text;
      if (text.empty() && explain_doc_id >= 0) {
        if (config.dataset_path.empty()) {
          throw textshift::ConfigError("--doc-id requires --dataset");
        }
        auto docs = textshift::load_dataset(config.dataset_path, config.dataset_format);
        for (const auto& d : docs) {
          if (d.id == explain_doc_id) {
            text = d.text;
            break;
          }
        }
        if (text.empty()) {
          throw textshift::ConfigError("doc id " + std::to_string(explain_doc_id) +
                                       " not found (or empty)");
        }
      }
      if (text.empty()) throw textshift::ConfigError("explain requires --text or --doc-id");
      auto art = textshift::run_explain(config, model, text);
      std::cout << "explanation: " << art.json_file << "\n"
                << "html: " << art.html_file << "\n";
    } else if (cmd_pipeline->parsed()) {
      auto art = textshift::run_pipeline(config);
      std::cout << "index: " << art.index_file << "\n";
    }
    return 0;
  } catch (const textshift::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
