#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "textshift/corpus.hpp"
#include "textshift/features.hpp"

namespace textshift {

struct Prediction {
  double p0 = 0.5;
  double p1 = 0.5;
  int predicted_class = 0;  // argmax; exact tie predicts class 0
};

Prediction prediction_from_p1(double p1);

// The wrapper interface every downstream module consumes. Scoring a text by
// any path bumps the query counter by exactly one per text; attacks read
// per-attack costs as (after - before) deltas. The counter is atomic so
// concurrent scoring against a shared immutable model stays exact.
class TextModel {
 public:
  TextModel() = default;
  virtual ~TextModel() = default;
  // copies/moves carry the counter value; the atomic itself is not copyable
  TextModel(const TextModel& other) noexcept : queries_(other.query_count()) {}
  TextModel& operator=(const TextModel& other) noexcept {
    queries_.store(other.query_count(), std::memory_order_relaxed);
    return *this;
  }

  Prediction predict(const std::string& text) const {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return score(text);
  }

  std::vector<Prediction> predict_batch(const std::vector<std::string>& texts) const {
    std::vector<Prediction> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(predict(t));
    return out;
  }

  std::uint64_t query_count() const noexcept {
    return queries_.load(std::memory_order_relaxed);
  }

 protected:
  // Same text -> same Prediction; implementations must be stateless.
  virtual Prediction score(const std::string& text) const = 0;

 private:
  mutable std::atomic<std::uint64_t> queries_{0};
};

enum class ModelHead { Logistic, LinearSvm };

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 50;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  int batch_size = 32;  // last batch ragged; >= n gives full-batch mode
  ModelHead head = ModelHead::Logistic;

  void validate() const;
};

struct LabeledDocument {
  TokenizedDocument doc;
  int label = 0;
};

// Logistic regression (or a linear-SVM head) over TF-IDF features, with the
// preprocessing chain embedded so predict() is self-contained on raw text.
class LinearTextModel : public TextModel {
 public:
  LinearTextModel() = default;
  LinearTextModel(Preprocessor preprocessor, Vocabulary vocab, std::vector<double> weights,
                  double bias, ModelHead head);

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  ModelHead head() const { return head_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const Preprocessor& preprocessor() const { return preprocessor_; }

  FeatureVector vectorize(const std::string& text) const;

  std::string to_json_string() const;
  static LinearTextModel from_json_string(const std::string& json_text);
  void save(const std::string& path) const;
  static LinearTextModel load(const std::string& path);

 protected:
  Prediction score(const std::string& text) const override;

 private:
  Preprocessor preprocessor_;
  Vocabulary vocab_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  ModelHead head_ = ModelHead::Logistic;
};

struct TrainingInstance {
  FeatureVector features;
  int label = 0;
};

struct GradientResult {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// Loss and analytic gradient over the batch in sum form:
//   L = sum_i loss(z_i, y_i) + (l2/2) ||w||^2,  z = w.x + b
// logistic: loss = ln(1+e^z) - y z; hinge: loss = max(0, 1 - (2y-1) z).
GradientResult loss_and_gradient(const std::vector<double>& weights, double bias,
                                 const std::vector<TrainingInstance>& batch, double l2,
                                 ModelHead head = ModelHead::Logistic);
GradientResult loss_and_gradient(const LinearTextModel& model,
                                 const std::vector<TrainingInstance>& batch, double l2);

// Mini-batch gradient descent on the regularized loss above, deterministic
// under config.seed. Updates use the mean batch gradient. Throws if the
// training set contains a single class. epoch_losses, when given, receives
// the full-training-set loss after each epoch.
LinearTextModel train(const std::vector<LabeledDocument>& docs, const Vocabulary& vocab,
                      const TrainConfig& config, const Preprocessor& preprocessor,
                      std::vector<double>* epoch_losses = nullptr);

struct EvalResult {
  double accuracy = 0.0;
  std::vector<bool> correct;
};

// Scores every document through predict() (so the query counter moves).
EvalResult evaluate(const TextModel& model, const std::vector<Document>& docs);

double sigmoid(double z);

}  // namespace textshift
