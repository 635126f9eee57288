#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "test_helpers.hpp"
#include "textshift/errors.hpp"
#include "textshift/pipeline.hpp"
#include "textshift/report.hpp"

using namespace textshift;
namespace fs = std::filesystem;

namespace {

// A small separable corpus with one opposite-leaning word per review so
// synonym swaps can flip the prediction.
std::string mini_corpus_csv() {
  const std::vector<std::string> pos{"great", "lovely", "superb", "charming"};
  const std::vector<std::string> neg{"awful", "dreary", "clumsy", "tedious"};
  const std::vector<std::string> nouns{"film", "story", "script", "cast"};
  std::mt19937 rng(100);
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  std::ostringstream csv;
  csv << "label,text\n";
  for (int i = 0; i < 60; ++i) {
    int label = i % 2;
    const auto& main_words = label == 1 ? pos : neg;
    const auto& opp_words = label == 1 ? neg : pos;
    csv << label << ",\"the " << nouns[pick(rng)] << " is " << main_words[pick(rng)] << " and "
        << main_words[pick(rng)] << " but the " << nouns[pick(rng)] << " feels "
        << opp_words[pick(rng)] << " .\"\n";
  }
  return csv.str();
}

// Store: each sentiment word plus one off-corpus synonym in a tight cluster.
std::string mini_store_text() {
  const std::vector<std::pair<std::string, std::string>> clusters{
      {"great", "grand"},     {"lovely", "pleasant"}, {"superb", "splendid"},
      {"charming", "winsome"}, {"awful", "dire"},      {"dreary", "bleak"},
      {"clumsy", "awkward"},  {"tedious", "tiring"}};
  std::mt19937 rng(200);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::ostringstream out;
  int dim = 10;
  for (const auto& [word, synonym] : clusters) {
    std::vector<double> center(static_cast<std::size_t>(dim));
    double sq = 0.0;
    for (auto& x : center) {
      x = gauss(rng);
      sq += x * x;
    }
    for (auto& x : center) x /= std::sqrt(sq);
    for (const std::string& w : {word, synonym}) {
      out << w;
      for (double x : center) out << ' ' << x + 0.01 * gauss(rng);
      out << "\n";
    }
  }
  return out.str();
}

RunConfig mini_config(const std::string& tag) {
  RunConfig cfg;
  cfg.dataset_path = testutil::write_temp_file("ts_mini_corpus.csv", mini_corpus_csv());
  cfg.embeddings_path = testutil::write_temp_file("ts_mini_store.txt", mini_store_text());
  cfg.out_dir = (fs::temp_directory_path() / tag).string();
  fs::remove_all(cfg.out_dir);
  cfg.seed = 5;
  cfg.propagate_seed();
  cfg.sample_n = 6;
  cfg.lime.num_samples = 200;
  cfg.train.epochs = 40;
  return cfg;
}

std::vector<fs::path> json_files_under(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

TEST_CASE("config file parsing with overrides and comments") {
  auto path = testutil::write_temp_file("ts_cfg.txt",
                                        "# a comment\n"
                                        "seed = 42\n"
                                        "train.epochs = 9\n"
                                        "attack.max_queries = 77  # trailing comment\n"
                                        "lime.kernel_width = 12.5\n"
                                        "preprocess.stem = true\n"
                                        "dataset = some.csv\n");
  RunConfig cfg;
  apply_config_file(cfg, path);
  CHECK(cfg.seed == 42);
  CHECK(cfg.train.seed == 42);  // master seed propagates
  CHECK(cfg.attack.seed == 42);
  CHECK(cfg.train.epochs == 9);
  CHECK(cfg.attack.max_queries == 77);
  CHECK(cfg.lime.kernel_width == 12.5);
  CHECK(cfg.preprocess.stem);
  CHECK(cfg.dataset_path == "some.csv");

  // stage seed set after the master seed wins
  auto path2 = testutil::write_temp_file("ts_cfg2.txt", "seed=1\ntrain.seed=9\n");
  RunConfig cfg2;
  apply_config_file(cfg2, path2);
  CHECK(cfg2.seed == 1);
  CHECK(cfg2.train.seed == 9);
}

TEST_CASE("config file rejects unknown keys and bad values") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_config_pair(cfg, "nonsense.key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_pair(cfg, "train.epochs", "many"), ConfigError);
  CHECK_THROWS_AS(apply_config_pair(cfg, "preprocess.stem", "yep"), ConfigError);
  CHECK_THROWS_AS(apply_config_pair(cfg, "dataset_format", "parquet"), ConfigError);
  auto bad = testutil::write_temp_file("ts_cfg_bad.txt", "no equals sign here\n");
  CHECK_THROWS_AS(apply_config_file(cfg, bad), ConfigError);
  CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent.cfg"), ConfigError);
}

TEST_CASE("train writes model and metrics with embedded config") {
  RunConfig cfg = mini_config("ts_out_train");
  TrainArtifacts art = run_train(cfg);
  CHECK(fs::exists(art.model_file));
  CHECK(fs::exists(art.metrics_file));
  CHECK(art.train_accuracy > 0.9);
  CHECK(art.test_accuracy > 0.7);

  auto j = nlohmann::json::parse(read_text_file(art.metrics_file));
  CHECK(j.at("format_version") == kOutputFormatVersion);
  CHECK(j.contains("config"));
  CHECK(j.at("config").at("seed") == 5);
  CHECK(j.at("test_accuracy").is_number());

  // model reload predicts identically
  LinearTextModel reloaded = LinearTextModel::load(art.model_file);
  CHECK(reloaded.predict("a great lovely film").p1 ==
        art.model.predict("a great lovely film").p1);
}

TEST_CASE("full pipeline: attack, explanations, drift, index") {
  RunConfig cfg = mini_config("ts_out_pipe");
  PipelineArtifacts art = run_pipeline(cfg, /*quiet=*/true);

  CHECK(fs::exists(art.attack.results_file));
  CHECK(fs::exists(art.index_file));
  CHECK(art.attack.summary.n_examples == 6);
  CHECK(art.attack.summary.n_examples ==
        art.attack.summary.n_success + art.attack.summary.n_failed +
            art.attack.summary.n_skipped);
  CHECK(art.attack.summary.n_success >= 1);  // the corpus is built to be attackable

  for (const auto& d : art.drifts) {
    CHECK(d.report.flipped);  // success implies a flip
    CHECK(fs::exists(fs::path(cfg.out_dir) / "drift" /
                     ("example_" + std::to_string(d.doc_id) + ".json")));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "explanations" /
                     ("example_" + std::to_string(d.doc_id) + "_before.json")));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "explanations" /
                     ("example_" + std::to_string(d.doc_id) + "_after.html")));
  }

  // results file: results array then summary, config embedded
  auto j = nlohmann::json::parse(read_text_file(art.attack.results_file));
  CHECK(j.at("format_version") == kOutputFormatVersion);
  CHECK(j.contains("config"));
  REQUIRE(j.contains("results"));
  CHECK(j.at("results").is_array());
  CHECK(j.at("results").size() == 6);
  CHECK(j.contains("summary"));
  CHECK(j.at("summary").at("n_examples") == 6);

  // html artifacts parse as well-formed markup
  CHECK(html_is_well_formed(read_text_file(art.index_file)));
  for (const auto& d : art.drifts) {
    CHECK(html_is_well_formed(read_text_file(
        (fs::path(cfg.out_dir) / "drift" / ("example_" + std::to_string(d.doc_id) + ".html"))
            .string())));
  }
}

TEST_CASE("pipeline reruns are byte-identical on json artifacts") {
  RunConfig cfg = mini_config("ts_out_det");
  run_pipeline(cfg, true);
  fs::path snapshot = fs::temp_directory_path() / "ts_out_det_snapshot";
  fs::remove_all(snapshot);
  fs::copy(cfg.out_dir, snapshot, fs::copy_options::recursive);
  fs::remove_all(cfg.out_dir);
  run_pipeline(cfg, true);  // identical config, fresh run

  auto fa = json_files_under(snapshot);
  auto fb = json_files_under(cfg.out_dir);
  REQUIRE(fa.size() == fb.size());
  REQUIRE(!fa.empty());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(fa[i].filename() == fb[i].filename());
    CHECK(read_text_file(fa[i].string()) == read_text_file(fb[i].string()));
  }
}

TEST_CASE("skip-train reuses the model file") {
  RunConfig cfg = mini_config("ts_out_skip");
  TrainArtifacts trained = run_train(cfg);

  RunConfig reuse = mini_config("ts_out_skip2");
  reuse.skip_train = true;
  reuse.model_path = trained.model_file;
  PipelineArtifacts art = run_pipeline(reuse, true);
  CHECK(art.train.model_file == trained.model_file);
  CHECK(art.attack.summary.n_examples == 6);
}

TEST_CASE("pipeline validation errors") {
  RunConfig cfg;
  cfg.skip_train = true;  // no model path
  CHECK_THROWS_AS(run_pipeline(cfg, true), ConfigError);

  RunConfig no_data;
  CHECK_THROWS_AS(run_train(no_data), ConfigError);

  RunConfig bad_sample = mini_config("ts_out_bad");
  bad_sample.sample_n = 0;
  LinearTextModel dummy;
  CHECK_THROWS_AS(run_attack(bad_sample, dummy, true), ConfigError);
}

TEST_CASE("documents emptied by cleaning are dropped, not fatal") {
  std::string csv = mini_corpus_csv();
  csv += "1,\"<br/><p></p>\"\n";  // cleans to empty
  RunConfig cfg = mini_config("ts_out_drop");
  cfg.dataset_path = testutil::write_temp_file("ts_mini_drop.csv", csv);
  TrainArtifacts art = run_train(cfg);
  CHECK(art.test_accuracy > 0.5);  // training proceeded without the empty doc
}

TEST_CASE("output_document merges payload after version and config") {
  RunConfig cfg;
  auto doc = output_document(cfg, nlohmann::json{{"alpha", 1}});
  CHECK(doc.at("format_version") == kOutputFormatVersion);
  CHECK(doc.at("alpha") == 1);
  CHECK(doc.at("config").contains("train"));
}
