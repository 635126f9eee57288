#include "textshift/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "textshift/errors.hpp"
#include "textshift/log.hpp"

namespace textshift {

namespace {

double dot(const std::vector<double>& w, const FeatureVector& x) {
  double z = 0.0;
  for (const auto& e : x.entries) z += w[static_cast<std::size_t>(e.index)] * e.weight;
  return z;
}

// ln(1 + e^z) without overflow
double log1pexp(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

nlohmann::json preprocess_to_json(const Preprocessor& pre) {
  std::vector<std::string> stopwords(pre.stopwords.begin(), pre.stopwords.end());
  std::sort(stopwords.begin(), stopwords.end());
  return nlohmann::json{{"lowercase", pre.config.lowercase},
                        {"strip_html", pre.config.strip_html},
                        {"stem", pre.config.stem},
                        {"stopword_path", pre.config.stopword_path},
                        {"min_token_chars", pre.config.min_token_chars},
                        {"stopwords", stopwords}};
}

Preprocessor preprocess_from_json(const nlohmann::json& j) {
  Preprocessor pre;
  pre.config.lowercase = j.at("lowercase").get<bool>();
  pre.config.strip_html = j.at("strip_html").get<bool>();
  pre.config.stem = j.at("stem").get<bool>();
  pre.config.stopword_path = j.at("stopword_path").get<std::string>();
  pre.config.min_token_chars = j.at("min_token_chars").get<int>();
  for (const auto& w : j.at("stopwords")) pre.stopwords.insert(w.get<std::string>());
  return pre;
}

nlohmann::json vocabulary_to_json(const Vocabulary& vocab) {
  std::vector<std::string> terms;
  std::vector<int> dfs;
  terms.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    terms.push_back(vocab.term(static_cast<int>(i)));
    dfs.push_back(vocab.doc_freq(static_cast<int>(i)));
  }
  const auto& c = vocab.config();
  return nlohmann::json{{"format_version", 1},
                        {"terms", terms},
                        {"doc_freqs", dfs},
                        {"n_docs", vocab.n_docs()},
                        {"config",
                         {{"ngram_lo", c.ngram_lo},
                          {"ngram_hi", c.ngram_hi},
                          {"min_df", c.min_df},
                          {"sublinear_tf", c.sublinear_tf},
                          {"use_idf", c.use_idf}}}};
}

Vocabulary vocabulary_from_json(const nlohmann::json& j) {
  VectorizerConfig c;
  const auto& jc = j.at("config");
  c.ngram_lo = jc.at("ngram_lo").get<int>();
  c.ngram_hi = jc.at("ngram_hi").get<int>();
  c.min_df = jc.at("min_df").get<int>();
  c.sublinear_tf = jc.at("sublinear_tf").get<bool>();
  c.use_idf = jc.at("use_idf").get<bool>();
  return Vocabulary::from_parts(j.at("terms").get<std::vector<std::string>>(),
                                j.at("doc_freqs").get<std::vector<int>>(),
                                j.at("n_docs").get<int>(), c);
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

Prediction prediction_from_p1(double p1) {
  Prediction p;
  p.p1 = p1;
  p.p0 = 1.0 - p1;
  p.predicted_class = p1 > 0.5 ? 1 : 0;
  return p;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (l2 < 0.0) throw ConfigError("l2 must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

LinearTextModel::LinearTextModel(Preprocessor preprocessor, Vocabulary vocab,
                                 std::vector<double> weights, double bias, ModelHead head)
    : preprocessor_(std::move(preprocessor)),
      vocab_(std::move(vocab)),
      weights_(std::move(weights)),
      bias_(bias),
      head_(head) {
  if (weights_.size() != vocab_.size()) {
    throw std::runtime_error("weight vector length must equal vocabulary size");
  }
}

FeatureVector LinearTextModel::vectorize(const std::string& text) const {
  return transform(preprocessor_.run(text), vocab_);
}

Prediction LinearTextModel::score(const std::string& text) const {
  double z = dot(weights_, vectorize(text)) + bias_;
  if (head_ == ModelHead::LinearSvm) z = std::clamp(z, -30.0, 30.0);
  return prediction_from_p1(sigmoid(z));
}

GradientResult loss_and_gradient(const std::vector<double>& weights, double bias,
                                 const std::vector<TrainingInstance>& batch, double l2,
                                 ModelHead head) {
  GradientResult r;
  r.grad_w.assign(weights.size(), 0.0);
  for (const auto& inst : batch) {
    double z = dot(weights, inst.features) + bias;
    if (head == ModelHead::Logistic) {
      double y = static_cast<double>(inst.label);
      r.loss += log1pexp(z) - y * z;
      double residual = sigmoid(z) - y;
      for (const auto& e : inst.features.entries) {
        r.grad_w[static_cast<std::size_t>(e.index)] += residual * e.weight;
      }
      r.grad_b += residual;
    } else {
      double y = inst.label == 1 ? 1.0 : -1.0;
      double margin = 1.0 - y * z;
      if (margin > 0.0) {
        r.loss += margin;
        for (const auto& e : inst.features.entries) {
          r.grad_w[static_cast<std::size_t>(e.index)] += -y * e.weight;
        }
        r.grad_b += -y;
      }
    }
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sq += weights[i] * weights[i];
    r.grad_w[i] += l2 * weights[i];
  }
  r.loss += 0.5 * l2 * sq;
  return r;
}

GradientResult loss_and_gradient(const LinearTextModel& model,
                                 const std::vector<TrainingInstance>& batch, double l2) {
  return loss_and_gradient(model.weights(), model.bias(), batch, l2, model.head());
}

LinearTextModel train(const std::vector<LabeledDocument>& docs, const Vocabulary& vocab,
                      const TrainConfig& config, const Preprocessor& preprocessor,
                      std::vector<double>* epoch_losses) {
  config.validate();
  if (docs.empty()) throw std::runtime_error("training set is empty");
  bool seen[2] = {false, false};
  for (const auto& d : docs) {
    if (d.label != 0 && d.label != 1) throw std::runtime_error("labels must be 0 or 1");
    seen[d.label] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw std::runtime_error("training set contains a single class; need both labels");
  }

  std::vector<TrainingInstance> instances;
  instances.reserve(docs.size());
  for (const auto& d : docs) instances.push_back({transform(d.doc, vocab), d.label});

  std::vector<double> weights(vocab.size(), 0.0);
  double bias = 0.0;
  std::mt19937 rng(static_cast<std::uint32_t>(config.seed));
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<TrainingInstance> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(instances[order[i]]);
      GradientResult g = loss_and_gradient(weights, bias, batch, config.l2, config.head);
      double scale = config.learning_rate / static_cast<double>(batch.size());
      for (std::size_t i = 0; i < weights.size(); ++i) weights[i] -= scale * g.grad_w[i];
      bias -= scale * g.grad_b;
    }
    if (epoch_losses != nullptr) {
      epoch_losses->push_back(
          loss_and_gradient(weights, bias, instances, config.l2, config.head).loss);
    }
  }
  return LinearTextModel(preprocessor, vocab, std::move(weights), bias, config.head);
}

EvalResult evaluate(const TextModel& model, const std::vector<Document>& docs) {
  if (docs.empty()) throw std::runtime_error("evaluate needs at least one document");
  EvalResult r;
  r.correct.reserve(docs.size());
  int n_correct = 0;
  for (const auto& d : docs) {
    bool ok = model.predict(d.text).predicted_class == d.label;
    r.correct.push_back(ok);
    if (ok) ++n_correct;
  }
  r.accuracy = static_cast<double>(n_correct) / static_cast<double>(docs.size());
  return r;
}

std::string LinearTextModel::to_json_string() const {
  nlohmann::json j{{"format_version", 1},
                   {"head_type", head_ == ModelHead::Logistic ? "logistic" : "linear_svm"},
                   {"preprocess", preprocess_to_json(preprocessor_)},
                   {"vocabulary", vocabulary_to_json(vocab_)},
                   {"weights", weights_},
                   {"bias", bias_}};
  return j.dump(2) + "\n";
}

LinearTextModel LinearTextModel::from_json_string(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  int version = j.at("format_version").get<int>();
  if (version != 1) {
    throw std::runtime_error("unsupported model format_version " + std::to_string(version));
  }
  std::string head_name = j.at("head_type").get<std::string>();
  ModelHead head;
  if (head_name == "logistic") {
    head = ModelHead::Logistic;
  } else if (head_name == "linear_svm") {
    head = ModelHead::LinearSvm;
  } else {
    throw std::runtime_error("unknown head_type: " + head_name);
  }
  return LinearTextModel(preprocess_from_json(j.at("preprocess")),
                         vocabulary_from_json(j.at("vocabulary")),
                         j.at("weights").get<std::vector<double>>(),
                         j.at("bias").get<double>(), head);
}

void LinearTextModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << to_json_string();
  if (!out) throw std::runtime_error("failed writing model file: " + path);
}

LinearTextModel LinearTextModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

}  // namespace textshift
