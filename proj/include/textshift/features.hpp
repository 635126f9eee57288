#pragma once

#include <map>
#include <string>
#include <vector>

#include "textshift/corpus.hpp"

namespace textshift {

struct VectorizerConfig {
  int ngram_lo = 1;
  int ngram_hi = 1;  // 1 <= lo <= hi <= 2
  int min_df = 1;
  bool sublinear_tf = false;  // tf -> 1 + ln(tf)
  bool use_idf = true;

  void validate() const;
};

struct FeatureEntry {
  int index = 0;
  double weight = 0.0;
};

// Sparse L2-normalized vector; indices strictly increasing. `norm` is the
// L2 norm before normalization (0 for an all-unknown document).
struct FeatureVector {
  std::vector<FeatureEntry> entries;
  double norm = 0.0;
};

// Fitted token->index state. Terms are n-grams of normalized forms joined by
// single spaces, contiguous in the original token sequence and containing no
// stop-word token. Indices are dense 0..V-1 in lexicographic term order.
class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return terms_.size(); }
  int n_docs() const { return n_docs_; }
  const VectorizerConfig& config() const { return config_; }
  const std::string& term(int index) const { return terms_[static_cast<std::size_t>(index)]; }
  int doc_freq(int index) const { return doc_freq_[static_cast<std::size_t>(index)]; }
  // -1 when the term is unknown.
  int index_of(const std::string& term) const;
  // ln((1 + n_docs) / (1 + doc_freq)) + 1, or 1.0 when idf is disabled.
  double idf(int index) const;

  friend Vocabulary fit_vocabulary(const std::vector<TokenizedDocument>& docs,
                                   const VectorizerConfig& config);
  static Vocabulary from_parts(std::vector<std::string> terms, std::vector<int> doc_freq,
                               int n_docs, const VectorizerConfig& config);

 private:
  std::vector<std::string> terms_;
  std::vector<int> doc_freq_;
  std::map<std::string, int> term_to_index_;
  int n_docs_ = 0;
  VectorizerConfig config_;
};

// Throws when no term survives min_df (empty effective vocabulary).
Vocabulary fit_vocabulary(const std::vector<TokenizedDocument>& docs,
                          const VectorizerConfig& config);

// tf(t,d) * idf(t), unknown terms ignored, then L2 normalization. Never
// mutates the vocabulary; an all-unknown document yields an empty vector.
FeatureVector transform(const TokenizedDocument& doc, const Vocabulary& vocab);

std::vector<FeatureVector> transform_batch(const std::vector<TokenizedDocument>& docs,
                                           const Vocabulary& vocab);

// The in-order n-gram terms of a document under the vocabulary's config
// (stop words skipped, contiguity enforced). Shared by fit and transform.
std::vector<std::string> extract_terms(const TokenizedDocument& doc,
                                       const VectorizerConfig& config);

}  // namespace textshift
