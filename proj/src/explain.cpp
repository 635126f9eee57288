#include "textshift/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "textshift/errors.hpp"

namespace textshift {

namespace {

// Gaussian elimination with partial pivoting on the (n+1)-dim normal
// equations. Small systems only (tokens + intercept).
std::vector<double> solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs,
                                double lambda) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-12) {
      if (lambda <= 0.0) {
        throw std::runtime_error(
            "singular surrogate system with ridge_lambda = 0; use ridge_lambda > 0");
      }
      throw std::runtime_error("singular surrogate system");
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= m[i][c] * x[c];
    x[i] = acc / m[i][i];
  }
  return x;
}

}  // namespace

void LimeConfig::validate() const {
  if (num_samples < 10) throw ConfigError("num_samples must be >= 10");
  if (num_features < 1) throw ConfigError("num_features must be >= 1");
  if (!(kernel_width > 0.0)) throw ConfigError("kernel_width must be > 0");
  if (ridge_lambda < 0.0) throw ConfigError("ridge_lambda must be >= 0");
  if (target_class.has_value() && *target_class != 0 && *target_class != 1) {
    throw ConfigError("target_class must be 0 or 1");
  }
}

std::vector<Mask> sample_masks(int n_tokens, int num_samples, std::uint64_t seed) {
  if (n_tokens < 1) throw std::invalid_argument("sample_masks needs n_tokens >= 1");
  if (num_samples < 1) throw std::invalid_argument("sample_masks needs num_samples >= 1");
  std::vector<Mask> masks;
  masks.reserve(static_cast<std::size_t>(num_samples));
  masks.emplace_back(static_cast<std::size_t>(n_tokens), std::uint8_t{1});
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::uniform_int_distribution<int> d_dist(1, n_tokens);
  std::vector<int> positions(static_cast<std::size_t>(n_tokens));
  std::iota(positions.begin(), positions.end(), 0);
  for (int s = 1; s < num_samples; ++s) {
    int d = d_dist(rng);
    // partial Fisher-Yates: the first d entries become the zeroed positions
    for (int i = 0; i < d; ++i) {
      std::uniform_int_distribution<int> pick(i, n_tokens - 1);
      std::swap(positions[static_cast<std::size_t>(i)],
                positions[static_cast<std::size_t>(pick(rng))]);
    }
    Mask mask(static_cast<std::size_t>(n_tokens), std::uint8_t{1});
    for (int i = 0; i < d; ++i) mask[static_cast<std::size_t>(positions[i])] = 0;
    masks.push_back(std::move(mask));
  }
  return masks;
}

std::string mask_to_text(const TokenizedDocument& doc, const Mask& mask) {
  if (mask.size() != doc.tokens.size()) {
    throw std::invalid_argument("mask length must equal token count");
  }
  std::string out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(doc.tokens[i].surface);
  }
  return out;
}

double kernel_weight(const Mask& mask, double sigma) {
  if (mask.empty()) throw std::invalid_argument("kernel_weight needs a non-empty mask");
  double ones = 0.0;
  for (auto v : mask) ones += v != 0 ? 1.0 : 0.0;
  double n = static_cast<double>(mask.size());
  double d = ones == 0.0 ? 1.0 : 1.0 - ones / (std::sqrt(ones) * std::sqrt(n));
  return std::exp(-(d * d) / (sigma * sigma));
}

SurrogateFit fit_surrogate(const std::vector<Mask>& masks, const std::vector<double>& outputs,
                           const std::vector<double>& sample_weights, double lambda) {
  if (masks.size() < 2) throw std::invalid_argument("fit_surrogate needs >= 2 samples");
  if (outputs.size() != masks.size() || sample_weights.size() != masks.size()) {
    throw std::invalid_argument("masks, outputs and weights must have equal length");
  }
  const std::size_t n_tokens = masks[0].size();
  const std::size_t dim = n_tokens + 1;  // coefficients + intercept (last)

  // normal equations: (X^T W X + lambda I') beta = X^T W y, intercept unpenalized
  std::vector<std::vector<double>> m(dim, std::vector<double>(dim, 0.0));
  std::vector<double> rhs(dim, 0.0);
  for (std::size_t s = 0; s < masks.size(); ++s) {
    if (masks[s].size() != n_tokens) {
      throw std::invalid_argument("all masks must have equal length");
    }
    double w = sample_weights[s];
    double y = outputs[s];
    const Mask& row = masks[s];
    for (std::size_t i = 0; i < n_tokens; ++i) {
      if (row[i] == 0) continue;
      for (std::size_t j = i; j < n_tokens; ++j) {
        if (row[j] != 0) m[i][j] += w;
      }
      m[i][n_tokens] += w;
      rhs[i] += w * y;
    }
    m[n_tokens][n_tokens] += w;
    rhs[n_tokens] += w * y;
  }
  for (std::size_t i = 0; i < n_tokens; ++i) {
    for (std::size_t j = 0; j < i; ++j) m[i][j] = m[j][i];
    m[n_tokens][i] = m[i][n_tokens];
    m[i][i] += lambda;
  }

  std::vector<double> beta = solve_dense(std::move(m), std::move(rhs), lambda);

  SurrogateFit fit;
  fit.intercept = beta[n_tokens];
  fit.coefficients.assign(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(n_tokens));

  double w_sum = 0.0;
  double y_mean = 0.0;
  for (std::size_t s = 0; s < masks.size(); ++s) {
    w_sum += sample_weights[s];
    y_mean += sample_weights[s] * outputs[s];
  }
  if (w_sum > 0.0) y_mean /= w_sum;
  double sse = 0.0;
  double sst = 0.0;
  for (std::size_t s = 0; s < masks.size(); ++s) {
    double pred = fit.intercept;
    for (std::size_t i = 0; i < n_tokens; ++i) {
      if (masks[s][i] != 0) pred += fit.coefficients[i];
    }
    double res = outputs[s] - pred;
    double dev = outputs[s] - y_mean;
    sse += sample_weights[s] * res * res;
    sst += sample_weights[s] * dev * dev;
  }
  fit.fidelity_r2 = sst > 0.0 ? 1.0 - sse / sst : (sse <= 1e-12 ? 1.0 : 0.0);
  return fit;
}

Explanation explain(const TextModel& model, const std::string& text, const LimeConfig& config,
                    const PreprocessConfig& preprocess) {
  config.validate();
  TokenizedDocument doc = tokenize(clean_text(text, preprocess), preprocess);
  if (doc.tokens.empty()) throw std::runtime_error("cannot explain a text with zero tokens");
  const int n_tokens = static_cast<int>(doc.tokens.size());

  std::vector<Mask> masks = sample_masks(n_tokens, config.num_samples, config.seed);
  std::vector<std::string> texts;
  texts.reserve(masks.size());
  for (const auto& mask : masks) texts.push_back(mask_to_text(doc, mask));
  std::vector<Prediction> preds = model.predict_batch(texts);

  Explanation ex;
  ex.text = doc.cleaned_text;
  ex.prediction = preds[0];  // all-ones mask scores the original token join
  ex.target_class = config.target_class.value_or(ex.prediction.predicted_class);

  std::vector<double> outputs;
  std::vector<double> weights;
  outputs.reserve(masks.size());
  weights.reserve(masks.size());
  for (std::size_t s = 0; s < masks.size(); ++s) {
    outputs.push_back(ex.target_class == 1 ? preds[s].p1 : preds[s].p0);
    weights.push_back(kernel_weight(masks[s], config.kernel_width));
  }

  SurrogateFit fit = fit_surrogate(masks, outputs, weights, config.ridge_lambda);
  ex.intercept = fit.intercept;
  ex.fidelity_r2 = fit.fidelity_r2;

  std::vector<int> order(static_cast<std::size_t>(n_tokens));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double wa = std::abs(fit.coefficients[static_cast<std::size_t>(a)]);
    double wb = std::abs(fit.coefficients[static_cast<std::size_t>(b)]);
    if (wa != wb) return wa > wb;
    return a < b;
  });
  int k = std::min(config.num_features, n_tokens);
  ex.token_weights.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    int pos = order[static_cast<std::size_t>(i)];
    ex.token_weights.push_back({pos, doc.tokens[static_cast<std::size_t>(pos)].surface,
                                fit.coefficients[static_cast<std::size_t>(pos)]});
  }
  return ex;
}

}  // namespace textshift
