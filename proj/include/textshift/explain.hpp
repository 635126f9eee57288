#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textshift/corpus.hpp"
#include "textshift/model.hpp"

namespace textshift {

struct LimeConfig {
  int num_samples = 1000;  // >= 10; includes the leading all-ones mask
  int num_features = 10;   // top-K reported
  double kernel_width = 25.0;
  double ridge_lambda = 1.0;
  std::uint64_t seed = 0;
  std::optional<int> target_class;  // default: the model's predicted class

  void validate() const;
};

struct TokenWeight {
  int position = 0;
  std::string token;
  double weight = 0.0;
};

struct Explanation {
  std::vector<TokenWeight> token_weights;  // top-K by |weight|, descending
  double intercept = 0.0;
  double fidelity_r2 = 0.0;
  Prediction prediction;  // the model on the unmasked text
  int target_class = 1;
  std::string text;
};

using Mask = std::vector<std::uint8_t>;

// First mask is all-ones; each further mask zeroes d distinct positions with
// d uniform in [1, n_tokens]. Deterministic under seed.
std::vector<Mask> sample_masks(int n_tokens, int num_samples, std::uint64_t seed);

// Surfaces of masked-off tokens removed, the rest joined by single spaces.
std::string mask_to_text(const TokenizedDocument& doc, const Mask& mask);

// exp(-d^2 / sigma^2) with d = 1 - cos(mask, all-ones); an all-zeros mask
// gets d = 1.
double kernel_weight(const Mask& mask, double sigma);

struct SurrogateFit {
  std::vector<double> coefficients;  // one per token position
  double intercept = 0.0;
  double fidelity_r2 = 0.0;
};

// Weighted ridge regression, intercept unpenalized, solved via the dense
// (n+1)-dimensional normal equations. fidelity_r2 is the weighted R^2 of the
// fit on its own samples. Throws when the system is singular and lambda is 0.
SurrogateFit fit_surrogate(const std::vector<Mask>& masks, const std::vector<double>& outputs,
                           const std::vector<double>& sample_weights, double lambda);

// tokenize -> sample_masks -> mask_to_text -> predict_batch -> kernel_weight
// -> fit_surrogate -> top-K by |coefficient| (ties by lower position). Every
// scored perturbation counts toward the model's query counter.
Explanation explain(const TextModel& model, const std::string& text, const LimeConfig& config,
                    const PreprocessConfig& preprocess = {});

}  // namespace textshift
