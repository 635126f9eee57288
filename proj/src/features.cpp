#include "textshift/features.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include "textshift/errors.hpp"

namespace textshift {

void VectorizerConfig::validate() const {
  if (ngram_lo < 1 || ngram_hi < ngram_lo || ngram_hi > 2) {
    throw ConfigError("ngram_range must satisfy 1 <= lo <= hi <= 2");
  }
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
}

std::vector<std::string> extract_terms(const TokenizedDocument& doc,
                                       const VectorizerConfig& config) {
  std::vector<std::string> terms;
  const auto& tokens = doc.tokens;
  for (int n = config.ngram_lo; n <= config.ngram_hi; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      bool ok = true;
      for (std::size_t j = i; j < i + n; ++j) {
        if (tokens[j].is_stopword) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::string term = tokens[i].normalized;
      for (std::size_t j = i + 1; j < i + n; ++j) {
        term += ' ';
        term += tokens[j].normalized;
      }
      terms.push_back(std::move(term));
    }
  }
  return terms;
}

int Vocabulary::index_of(const std::string& term) const {
  auto it = term_to_index_.find(term);
  return it == term_to_index_.end() ? -1 : it->second;
}

double Vocabulary::idf(int index) const {
  if (!config_.use_idf) return 1.0;
  return std::log((1.0 + n_docs_) / (1.0 + doc_freq(index))) + 1.0;
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms, std::vector<int> doc_freq,
                                  int n_docs, const VectorizerConfig& config) {
  Vocabulary v;
  v.terms_ = std::move(terms);
  v.doc_freq_ = std::move(doc_freq);
  v.n_docs_ = n_docs;
  v.config_ = config;
  for (std::size_t i = 0; i < v.terms_.size(); ++i) {
    v.term_to_index_[v.terms_[i]] = static_cast<int>(i);
  }
  return v;
}

Vocabulary fit_vocabulary(const std::vector<TokenizedDocument>& docs,
                          const VectorizerConfig& config) {
  config.validate();
  if (docs.empty()) throw ConfigError("fit_vocabulary needs at least one document");
  std::map<std::string, int> df;  // ordered: indices come out lexicographic
  for (const auto& doc : docs) {
    std::set<std::string> seen;
    for (auto& term : extract_terms(doc, config)) seen.insert(std::move(term));
    for (const auto& term : seen) ++df[term];
  }
  Vocabulary v;
  v.n_docs_ = static_cast<int>(docs.size());
  v.config_ = config;
  for (const auto& [term, count] : df) {
    if (count < config.min_df) continue;
    v.term_to_index_[term] = static_cast<int>(v.terms_.size());
    v.terms_.push_back(term);
    v.doc_freq_.push_back(count);
  }
  if (v.terms_.empty()) throw std::runtime_error("empty effective vocabulary");
  return v;
}

FeatureVector transform(const TokenizedDocument& doc, const Vocabulary& vocab) {
  std::map<int, double> counts;
  for (const auto& term : extract_terms(doc, vocab.config())) {
    int idx = vocab.index_of(term);
    if (idx >= 0) counts[idx] += 1.0;
  }
  FeatureVector vec;
  vec.entries.reserve(counts.size());
  double sq = 0.0;
  for (const auto& [idx, raw_tf] : counts) {
    double tf = vocab.config().sublinear_tf ? 1.0 + std::log(raw_tf) : raw_tf;
    double w = tf * vocab.idf(idx);
    vec.entries.push_back({idx, w});
    sq += w * w;
  }
  vec.norm = std::sqrt(sq);
  if (vec.norm > 0.0) {
    for (auto& e : vec.entries) e.weight /= vec.norm;
  }
  return vec;
}

std::vector<FeatureVector> transform_batch(const std::vector<TokenizedDocument>& docs,
                                           const Vocabulary& vocab) {
  std::vector<FeatureVector> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(transform(doc, vocab));
  return out;
}

}  // namespace textshift
