#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "textshift/attack.hpp"
#include "textshift/corpus.hpp"
#include "textshift/drift.hpp"
#include "textshift/explain.hpp"
#include "textshift/features.hpp"
#include "textshift/model.hpp"

namespace textshift {

constexpr int kOutputFormatVersion = 1;

// The resolved configuration of one run; serialized under key "config" into
// every output JSON.
struct RunConfig {
  PreprocessConfig preprocess;
  VectorizerConfig features;
  TrainConfig train;
  AttackConfig attack;
  LimeConfig lime;

  std::string dataset_path;
  DatasetFormat dataset_format = DatasetFormat::CsvLabelText;
  std::string embeddings_path;
  std::string model_path;  // input when skip_train, output of training otherwise
  std::string out_dir = "out";
  double test_fraction = 0.2;
  std::uint64_t seed = 7;  // split + sample selection; also the sub-seed default
  int sample_n = 10;
  bool skip_train = false;
  std::string explain_text;
  int explain_doc_id = -1;
  std::array<std::string, 2> class_names = {"Negative", "Positive"};

  // Sets every stage seed (train/attack/lime) to `seed`; individual stage
  // seeds can still be overridden afterwards via config keys.
  void propagate_seed();
};

// Flat key=value file with '#' comments; dotted keys address stage fields
// (train.epochs=80). Unknown keys are ConfigErrors. CLI flags are applied on
// top by the caller.
void apply_config_file(RunConfig& config, const std::string& path);
void apply_config_pair(RunConfig& config, const std::string& key, const std::string& value);

nlohmann::json run_config_to_json(const RunConfig& config);

// Wraps a payload as {"format_version": .., "config": .., <payload fields>}.
nlohmann::json output_document(const RunConfig& config, nlohmann::json payload);

struct TrainArtifacts {
  LinearTextModel model;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::string model_file;
  std::string metrics_file;
};

// load -> split -> preprocess -> fit vocabulary -> train -> evaluate ->
// write model + metrics.
TrainArtifacts run_train(const RunConfig& config);

struct AttackArtifacts {
  std::vector<AttackResult> results;
  AttackSummary summary;
  std::string results_file;
  // tokenized docs for the attacked sample, parallel to results
  std::vector<TokenizedDocument> docs;
};

// Samples test documents (seeded shuffle, first sample_n), attacks each, and
// writes the results file. `quiet` suppresses the per-success console lines.
AttackArtifacts run_attack(const RunConfig& config, const LinearTextModel& model,
                           bool quiet = false);

struct ExplainArtifacts {
  Explanation explanation;
  std::string json_file;
  std::string html_file;
};

ExplainArtifacts run_explain(const RunConfig& config, const LinearTextModel& model,
                             const std::string& text);

struct DriftArtifacts {
  int doc_id = -1;
  Explanation before;
  Explanation after;
  DriftReport report;
};

struct PipelineArtifacts {
  TrainArtifacts train;
  AttackArtifacts attack;
  std::vector<DriftArtifacts> drifts;
  std::string index_file;
};

// Full run: train (or load) -> attack sample -> before/after explanations on
// every Success -> drift reports -> index page. Before-explanations run on
// the original inputs, after-explanations on the perturbed texts, both
// against the same model and both targeting class 1.
PipelineArtifacts run_pipeline(const RunConfig& config, bool quiet = false);

double run_evaluate(const RunConfig& config, const LinearTextModel& model);

}  // namespace textshift
