#include "textshift/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

#include "textshift/log.hpp"

namespace textshift {

namespace {

// Reads a whole file, transparently inflating gzip when the name ends .gz.
// (zlib's gz* API also passes plain text through, but keeping the branch
// explicit makes the error messages clearer.)
std::string read_file_maybe_gzip(const std::string& path) {
  bool gz = path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (!gz) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open embeddings file: " + path);
  std::string out;
  char chunk[1 << 16];
  int n = 0;
  while ((n = gzread(f, chunk, sizeof(chunk))) > 0) out.append(chunk, static_cast<size_t>(n));
  bool bad = n < 0;
  gzclose(f);
  if (bad) throw std::runtime_error("gzip read error in embeddings file: " + path);
  return out;
}

}  // namespace

void EmbeddingStore::insert(const std::string& word, const std::vector<double>& values,
                            long line_no) {
  if (word_to_row_.count(word) > 0) {
    log_warn("duplicate embedding for \"" + word + "\" at line " + std::to_string(line_no) +
             "; keeping first occurrence");
    return;
  }
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (sq == 0.0) {
    log_warn("zero vector for \"" + word + "\" at line " + std::to_string(line_no) +
             "; entry skipped");
    return;
  }
  double inv = 1.0 / std::sqrt(sq);
  word_to_row_[word] = words_.size();
  words_.push_back(word);
  for (double v : values) unit_vectors_.push_back(static_cast<float>(v * inv));
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
  std::string content = read_file_maybe_gzip(path);
  EmbeddingStore store;
  std::istringstream in(content);
  std::string line;
  long line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    values.clear();
    double v = 0.0;
    while (ls >> v) values.push_back(v);
    if (word.empty() || values.empty()) {
      throw std::runtime_error("malformed embedding line " + std::to_string(line_no) + " in " +
                               path);
    }
    if (store.dim_ == 0) {
      store.dim_ = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != store.dim_) {
      throw std::runtime_error("dimension mismatch at line " + std::to_string(line_no) +
                               " in " + path + ": expected " + std::to_string(store.dim_) +
                               ", got " + std::to_string(values.size()));
    }
    store.insert(word, values, line_no);
  }
  if (store.words_.empty()) throw std::runtime_error("empty embeddings file: " + path);
  return store;
}

EmbeddingStore EmbeddingStore::from_entries(
    const std::vector<std::pair<std::string, std::vector<double>>>& entries) {
  EmbeddingStore store;
  long line_no = 0;
  for (const auto& [word, values] : entries) {
    ++line_no;
    if (store.dim_ == 0) {
      store.dim_ = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != store.dim_) {
      throw std::runtime_error("dimension mismatch at entry " + std::to_string(line_no));
    }
    store.insert(word, values, line_no);
  }
  return store;
}

double EmbeddingStore::cosine(const std::string& a, const std::string& b) const {
  auto ia = word_to_row_.find(a);
  if (ia == word_to_row_.end()) throw std::runtime_error("word not in embedding store: " + a);
  auto ib = word_to_row_.find(b);
  if (ib == word_to_row_.end()) throw std::runtime_error("word not in embedding store: " + b);
  const float* ra = row(ia->second);
  const float* rb = row(ib->second);
  double dot = 0.0;
  for (int i = 0; i < dim_; ++i) dot += static_cast<double>(ra[i]) * rb[i];
  return std::clamp(dot, -1.0, 1.0);
}

std::vector<std::pair<std::string, double>> EmbeddingStore::nearest_neighbors(
    const std::string& word, int k, double min_sim) const {
  std::vector<std::pair<std::string, double>> hits;
  auto it = word_to_row_.find(word);
  if (it == word_to_row_.end() || k < 1) return hits;
  const float* q = row(it->second);
  for (std::size_t r = 0; r < words_.size(); ++r) {
    if (r == it->second) continue;
    const float* v = this->row(r);
    double dot = 0.0;
    for (int i = 0; i < dim_; ++i) dot += static_cast<double>(q[i]) * v[i];
    dot = std::clamp(dot, -1.0, 1.0);
    if (dot >= min_sim) hits.emplace_back(words_[r], dot);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
  return hits;
}

}  // namespace textshift
