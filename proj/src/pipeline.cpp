#include "textshift/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "textshift/errors.hpp"
#include "textshift/log.hpp"
#include "textshift/report.hpp"

namespace textshift {

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("invalid boolean for " + key + ": " + value);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": " + value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": " + value);
  }
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid seed for " + key + ": " + value);
  }
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Documents whose cleaned text is empty are dropped with a warning.
std::vector<LabeledDocument> preprocess_all(const std::vector<Document>& docs,
                                            const Preprocessor& pre) {
  std::vector<LabeledDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    TokenizedDocument tok = pre.run(d.text, d.id);
    if (tok.cleaned_text.empty() || tok.tokens.empty()) {
      log_warn("document " + std::to_string(d.id) + " is empty after cleaning; dropped");
      continue;
    }
    out.push_back({std::move(tok), d.label});
  }
  return out;
}

std::filesystem::path out_path(const RunConfig& config, const std::string& rel) {
  return std::filesystem::path(config.out_dir) / rel;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2));
}

}  // namespace

void RunConfig::propagate_seed() {
  train.seed = seed;
  attack.seed = seed;
  lime.seed = seed;
}

void apply_config_pair(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "seed") {
    c.seed = parse_seed(key, value);
    c.propagate_seed();
  } else if (key == "dataset") {
    c.dataset_path = value;
  } else if (key == "dataset_format") {
    if (value == "csv") {
      c.dataset_format = DatasetFormat::CsvLabelText;
    } else if (value == "dirs") {
      c.dataset_format = DatasetFormat::TwoDirectory;
    } else {
      throw ConfigError("dataset_format must be csv or dirs, got " + value);
    }
  } else if (key == "embeddings") {
    c.embeddings_path = value;
  } else if (key == "model") {
    c.model_path = value;
  } else if (key == "out") {
    c.out_dir = value;
  } else if (key == "test_fraction") {
    c.test_fraction = parse_double(key, value);
  } else if (key == "sample") {
    c.sample_n = parse_int(key, value);
  } else if (key == "skip_train") {
    c.skip_train = parse_bool(key, value);
  } else if (key == "class_name_0") {
    c.class_names[0] = value;
  } else if (key == "class_name_1") {
    c.class_names[1] = value;
  } else if (key == "preprocess.lowercase") {
    c.preprocess.lowercase = parse_bool(key, value);
  } else if (key == "preprocess.strip_html") {
    c.preprocess.strip_html = parse_bool(key, value);
  } else if (key == "preprocess.stem") {
    c.preprocess.stem = parse_bool(key, value);
  } else if (key == "preprocess.stopword_path") {
    c.preprocess.stopword_path = value;
  } else if (key == "preprocess.min_token_chars") {
    c.preprocess.min_token_chars = parse_int(key, value);
  } else if (key == "features.ngram_lo") {
    c.features.ngram_lo = parse_int(key, value);
  } else if (key == "features.ngram_hi") {
    c.features.ngram_hi = parse_int(key, value);
  } else if (key == "features.min_df") {
    c.features.min_df = parse_int(key, value);
  } else if (key == "features.sublinear_tf") {
    c.features.sublinear_tf = parse_bool(key, value);
  } else if (key == "features.use_idf") {
    c.features.use_idf = parse_bool(key, value);
  } else if (key == "train.learning_rate") {
    c.train.learning_rate = parse_double(key, value);
  } else if (key == "train.epochs") {
    c.train.epochs = parse_int(key, value);
  } else if (key == "train.l2") {
    c.train.l2 = parse_double(key, value);
  } else if (key == "train.seed") {
    c.train.seed = parse_seed(key, value);
  } else if (key == "train.shuffle_each_epoch") {
    c.train.shuffle_each_epoch = parse_bool(key, value);
  } else if (key == "train.batch_size") {
    c.train.batch_size = parse_int(key, value);
  } else if (key == "train.head") {
    if (value == "logistic") {
      c.train.head = ModelHead::Logistic;
    } else if (value == "linear_svm") {
      c.train.head = ModelHead::LinearSvm;
    } else {
      throw ConfigError("train.head must be logistic or linear_svm, got " + value);
    }
  } else if (key == "attack.max_percent_words") {
    c.attack.max_percent_words = parse_double(key, value);
  } else if (key == "attack.min_embed_sim") {
    c.attack.min_embed_sim = parse_double(key, value);
  } else if (key == "attack.candidates_per_word") {
    c.attack.candidates_per_word = parse_int(key, value);
  } else if (key == "attack.enable_char_level") {
    c.attack.enable_char_level = parse_bool(key, value);
  } else if (key == "attack.max_queries") {
    c.attack.max_queries = parse_int(key, value);
  } else if (key == "attack.seed") {
    c.attack.seed = parse_seed(key, value);
  } else if (key == "lime.num_samples") {
    c.lime.num_samples = parse_int(key, value);
  } else if (key == "lime.num_features") {
    c.lime.num_features = parse_int(key, value);
  } else if (key == "lime.kernel_width") {
    c.lime.kernel_width = parse_double(key, value);
  } else if (key == "lime.ridge_lambda") {
    c.lime.ridge_lambda = parse_double(key, value);
  } else if (key == "lime.seed") {
    c.lime.seed = parse_seed(key, value);
  } else if (key == "lime.target_class") {
    c.lime.target_class = parse_int(key, value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    apply_config_pair(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  return nlohmann::json{
      {"preprocess",
       {{"lowercase", c.preprocess.lowercase},
        {"strip_html", c.preprocess.strip_html},
        {"stem", c.preprocess.stem},
        {"stopword_path", c.preprocess.stopword_path},
        {"min_token_chars", c.preprocess.min_token_chars}}},
      {"features",
       {{"ngram_lo", c.features.ngram_lo},
        {"ngram_hi", c.features.ngram_hi},
        {"min_df", c.features.min_df},
        {"sublinear_tf", c.features.sublinear_tf},
        {"use_idf", c.features.use_idf}}},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"l2", c.train.l2},
        {"seed", c.train.seed},
        {"shuffle_each_epoch", c.train.shuffle_each_epoch},
        {"batch_size", c.train.batch_size},
        {"head", c.train.head == ModelHead::Logistic ? "logistic" : "linear_svm"}}},
      {"attack",
       {{"max_percent_words", c.attack.max_percent_words},
        {"min_embed_sim", c.attack.min_embed_sim},
        {"candidates_per_word", c.attack.candidates_per_word},
        {"enable_char_level", c.attack.enable_char_level},
        {"max_queries", c.attack.max_queries},
        {"seed", c.attack.seed}}},
      {"lime",
       {{"num_samples", c.lime.num_samples},
        {"num_features", c.lime.num_features},
        {"kernel_width", c.lime.kernel_width},
        {"ridge_lambda", c.lime.ridge_lambda},
        {"seed", c.lime.seed},
        {"target_class",
         c.lime.target_class.has_value() ? nlohmann::json(*c.lime.target_class)
                                         : nlohmann::json(nullptr)}}},
      {"dataset", c.dataset_path},
      {"dataset_format",
       c.dataset_format == DatasetFormat::CsvLabelText ? "csv" : "dirs"},
      {"embeddings", c.embeddings_path},
      {"model", c.model_path},
      {"out", c.out_dir},
      {"test_fraction", c.test_fraction},
      {"seed", c.seed},
      {"sample", c.sample_n},
      {"skip_train", c.skip_train},
      {"class_names", {c.class_names[0], c.class_names[1]}}};
}

nlohmann::json output_document(const RunConfig& config, nlohmann::json payload) {
  nlohmann::json doc{{"format_version", kOutputFormatVersion},
                     {"config", run_config_to_json(config)}};
  for (auto& [key, value] : payload.items()) doc[key] = std::move(value);
  return doc;
}

TrainArtifacts run_train(const RunConfig& config) {
  if (config.dataset_path.empty()) throw ConfigError("train requires a dataset path");
  config.preprocess.validate();
  config.features.validate();
  config.train.validate();

  std::vector<Document> docs = load_dataset(config.dataset_path, config.dataset_format);
  auto [train_docs, test_docs] = split(docs, config.test_fraction, config.seed);
  log_info("dataset: " + std::to_string(docs.size()) + " documents, " +
           std::to_string(train_docs.size()) + " train / " + std::to_string(test_docs.size()) +
           " test");

  Preprocessor pre = Preprocessor::make(config.preprocess);
  std::vector<LabeledDocument> train_tok = preprocess_all(train_docs, pre);
  if (train_tok.empty()) throw std::runtime_error("no training documents survived cleaning");

  std::vector<TokenizedDocument> train_only;
  train_only.reserve(train_tok.size());
  for (const auto& t : train_tok) train_only.push_back(t.doc);
  Vocabulary vocab = fit_vocabulary(train_only, config.features);
  log_info("vocabulary: " + std::to_string(vocab.size()) + " terms");

  TrainArtifacts art;
  art.model = train(train_tok, vocab, config.train, pre);
  art.train_accuracy = evaluate(art.model, train_docs).accuracy;
  art.test_accuracy = evaluate(art.model, test_docs).accuracy;

  std::string model_file = config.model_path.empty()
                               ? out_path(config, "model.json").string()
                               : config.model_path;
  std::filesystem::path mp(model_file);
  if (mp.has_parent_path()) std::filesystem::create_directories(mp.parent_path());
  art.model.save(model_file);
  art.model_file = model_file;

  nlohmann::json metrics = output_document(
      config, nlohmann::json{{"train_accuracy", art.train_accuracy},
                             {"test_accuracy", art.test_accuracy},
                             {"model_file", model_file}});
  art.metrics_file = out_path(config, "metrics.json").string();
  write_json_file(art.metrics_file, metrics);
  return art;
}

double run_evaluate(const RunConfig& config, const LinearTextModel& model) {
  if (config.dataset_path.empty()) throw ConfigError("evaluate requires a dataset path");
  std::vector<Document> docs = load_dataset(config.dataset_path, config.dataset_format);
  EvalResult r = evaluate(model, docs);
  nlohmann::json j = output_document(
      config, nlohmann::json{{"accuracy", r.accuracy}, {"n_documents", docs.size()}});
  write_json_file(out_path(config, "evaluation.json").string(), j);
  return r.accuracy;
}

AttackArtifacts run_attack(const RunConfig& config, const LinearTextModel& model, bool quiet) {
  if (config.dataset_path.empty()) throw ConfigError("attack requires a dataset path");
  if (config.sample_n < 1) throw ConfigError("sample must be >= 1");
  config.attack.validate();

  EmbeddingStore store;
  if (!config.embeddings_path.empty()) {
    store = EmbeddingStore::load(config.embeddings_path);
    log_info("embeddings: " + std::to_string(store.size()) + " words, dim " +
             std::to_string(store.dim()));
  } else {
    log_warn("no embeddings given; attack will rely on char-level transformations only");
  }

  std::vector<Document> docs = load_dataset(config.dataset_path, config.dataset_format);
  auto [train_docs, test_docs] = split(docs, config.test_fraction, config.seed);

  // seeded sample of the test set
  std::vector<std::size_t> idx(test_docs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937 rng(static_cast<std::uint32_t>(config.seed));
  std::shuffle(idx.begin(), idx.end(), rng);
  std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(config.sample_n),
                                           idx.size());

  // attacks see the model's own preprocessing so flags match training
  const Preprocessor& pre = model.preprocessor();

  AttackArtifacts art;
  for (std::size_t i = 0; i < take; ++i) {
    const Document& d = test_docs[idx[i]];
    TokenizedDocument tok = pre.run(d.text, d.id);
    if (tok.tokens.empty()) {
      log_warn("document " + std::to_string(d.id) + " is empty after cleaning; dropped");
      continue;
    }
    AttackResult result = greedy_attack(model, tok, d.label, config.attack, store);
    if (!quiet) {
      std::cout << render_attack_console(result, tok, config.class_names) << "\n";
    }
    art.results.push_back(std::move(result));
    art.docs.push_back(std::move(tok));
  }
  if (art.results.empty()) throw std::runtime_error("no attackable documents in the sample");
  art.summary = summarize(art.results);

  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : art.results) results.push_back(to_json(r));
  nlohmann::json j = output_document(config, nlohmann::json{{"results", std::move(results)},
                                                            {"summary", to_json(art.summary)}});
  art.results_file = out_path(config, "attack_results.json").string();
  write_json_file(art.results_file, j);
  return art;
}

ExplainArtifacts run_explain(const RunConfig& config, const LinearTextModel& model,
                             const std::string& text) {
  if (text.empty()) throw ConfigError("explain requires a non-empty text");
  config.lime.validate();
  ExplainArtifacts art;
  art.explanation = explain(model, text, config.lime, model.preprocessor().config);
  nlohmann::json j = output_document(config, to_json(art.explanation));
  art.json_file = out_path(config, "explanation.json").string();
  write_json_file(art.json_file, j);
  std::string html =
      explanation_to_html(art.explanation, model.preprocessor().config, config.class_names);
  art.html_file = out_path(config, "explanation.html").string();
  write_text_file(art.html_file, html);
  return art;
}

PipelineArtifacts run_pipeline(const RunConfig& config, bool quiet) {
  config.lime.validate();
  PipelineArtifacts art;

  if (config.skip_train) {
    if (config.model_path.empty()) throw ConfigError("--skip-train requires a model path");
    art.train.model = LinearTextModel::load(config.model_path);
    art.train.model_file = config.model_path;
    log_info("loaded model from " + config.model_path);
  } else {
    art.train = run_train(config);
    log_info("trained model: train accuracy " + std::to_string(art.train.train_accuracy) +
             ", test accuracy " + std::to_string(art.train.test_accuracy));
  }
  const LinearTextModel& model = art.train.model;

  art.attack = run_attack(config, model, quiet);

  // Before/after explanations on every Success, both against the same model
  // and both targeting class 1 so drift weights share a sign convention.
  LimeConfig lime = config.lime;
  lime.target_class = 1;
  for (std::size_t i = 0; i < art.attack.results.size(); ++i) {
    const AttackResult& r = art.attack.results[i];
    if (r.status != AttackStatus::Success) continue;
    const TokenizedDocument& doc = art.attack.docs[i];
    const std::string tag = "example_" + std::to_string(r.doc_id);

    LimeConfig before_cfg = lime;
    before_cfg.seed = lime.seed + 2 * static_cast<std::uint64_t>(r.doc_id);
    LimeConfig after_cfg = lime;
    after_cfg.seed = before_cfg.seed + 1;

    DriftArtifacts d;
    d.doc_id = r.doc_id;
    d.before = explain(model, r.original_text, before_cfg, model.preprocessor().config);
    d.after = explain(model, r.perturbed_text, after_cfg, model.preprocessor().config);
    d.report = compare(d.before, d.after, r.original_pred, r.final_pred,
                       align(doc, r.substitutions), config.class_names);

    write_json_file(out_path(config, "explanations/" + tag + "_before.json").string(),
                    output_document(config, to_json(d.before)));
    write_json_file(out_path(config, "explanations/" + tag + "_after.json").string(),
                    output_document(config, to_json(d.after)));
    write_text_file(
        out_path(config, "explanations/" + tag + "_before.html").string(),
        explanation_to_html(d.before, model.preprocessor().config, config.class_names));
    write_text_file(
        out_path(config, "explanations/" + tag + "_after.html").string(),
        explanation_to_html(d.after, model.preprocessor().config, config.class_names));
    write_json_file(out_path(config, "drift/" + tag + ".json").string(),
                    output_document(config, to_json(d.report)));
    write_text_file(out_path(config, "drift/" + tag + ".html").string(),
                    drift_to_html(d.before, d.after, d.report, model.preprocessor().config,
                                  config.class_names));
    art.drifts.push_back(std::move(d));
  }

  // index page
  {
    std::ostringstream body;
    body << "<h1>Run overview</h1>\n";
    if (!config.skip_train) {
      body << "<p>test accuracy: " << art.train.test_accuracy << "</p>\n";
    }
    const AttackSummary& s = art.attack.summary;
    body << "<table>\n<tr><th>examples</th><th>success</th><th>failed</th><th>skipped</th>"
         << "<th>success rate</th><th>avg % words changed</th><th>avg queries</th></tr>\n"
         << "<tr><td>" << s.n_examples << "</td><td>" << s.n_success << "</td><td>"
         << s.n_failed << "</td><td>" << s.n_skipped << "</td><td>"
         << (s.success_rate.has_value() ? std::to_string(*s.success_rate) : std::string("null"))
         << "</td><td>"
         << (s.avg_percent_words_changed.has_value()
                 ? std::to_string(*s.avg_percent_words_changed)
                 : std::string("null"))
         << "</td><td>"
         << (s.avg_queries.has_value() ? std::to_string(*s.avg_queries) : std::string("null"))
         << "</td></tr>\n</table>\n";
    body << "<h2>Attacked examples</h2>\n<table>\n"
         << "<tr><th>doc</th><th>status</th><th>transition</th><th>reports</th></tr>\n";
    for (std::size_t i = 0; i < art.attack.results.size(); ++i) {
      const AttackResult& r = art.attack.results[i];
      std::string tag = "example_" + std::to_string(r.doc_id);
      body << "<tr><td>" << r.doc_id << "</td><td>" << to_string(r.status) << "</td><td>"
           << escape_html(render_transition(r.original_pred, r.final_pred, config.class_names))
           << "</td><td>";
      if (r.status == AttackStatus::Success) {
        body << "<a href=\"explanations/" << tag << "_before.html\">before</a> "
             << "<a href=\"explanations/" << tag << "_after.html\">after</a> "
             << "<a href=\"drift/" << tag << ".html\">drift</a>";
      }
      body << "</td></tr>\n";
    }
    body << "</table>\n";

    art.index_file = out_path(config, "index.html").string();
    write_text_file(art.index_file, html_page("textshift run", body.str()));
  }
  return art;
}

}  // namespace textshift
