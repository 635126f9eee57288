#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace textshift {

// Word vectors in GloVe text format (word then dim reals per line), served
// as unit vectors for cosine queries. Immutable after load; queries are
// brute-force scans so results are exactly reproducible.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Accepts plain text or gzip input (filename ending .gz). Duplicate words
  // keep the first occurrence, zero vectors are skipped, both with warnings;
  // inconsistent dimensions and empty stores are errors.
  static EmbeddingStore load(const std::string& path);

  // Programmatic construction (fixtures, tests). Vectors are normalized;
  // same duplicate/zero-vector policy as load().
  static EmbeddingStore from_entries(
      const std::vector<std::pair<std::string, std::vector<double>>>& entries);

  int dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool contains(const std::string& word) const { return word_to_row_.count(word) > 0; }
  const std::vector<std::string>& words() const { return words_; }
  // Unit vector for a row (length dim).
  const float* row(std::size_t r) const { return unit_vectors_.data() + r * dim_; }

  // Throws when either word is missing, naming it.
  double cosine(const std::string& a, const std::string& b) const;

  // Top-k other words with similarity >= min_sim, descending, ties broken
  // lexicographically. A missing word yields an empty result.
  std::vector<std::pair<std::string, double>> nearest_neighbors(const std::string& word,
                                                                int k, double min_sim) const;

 private:
  void insert(const std::string& word, const std::vector<double>& values, long line_no);

  std::unordered_map<std::string, std::size_t> word_to_row_;
  std::vector<std::string> words_;
  std::vector<float> unit_vectors_;  // row-major, each row L2-normalized
  int dim_ = 0;
};

}  // namespace textshift
