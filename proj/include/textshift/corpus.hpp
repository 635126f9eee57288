#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace textshift {

// A raw binary-labeled review as loaded from disk.
struct Document {
  int id = 0;
  std::string text;
  int label = 0;  // 0 or 1
};

struct Token {
  std::string surface;     // exact slice of the cleaned text
  std::string normalized;  // lowercased / stemmed form
  std::size_t begin = 0;   // half-open byte range into cleaned_text
  std::size_t end = 0;
  bool is_stopword = false;
};

struct TokenizedDocument {
  int doc_id = -1;
  std::string cleaned_text;
  std::vector<Token> tokens;
};

struct PreprocessConfig {
  bool lowercase = true;
  bool strip_html = true;
  bool stem = false;
  std::string stopword_path;  // empty selects the built-in English list
  int min_token_chars = 1;

  void validate() const;  // throws ConfigError
};

enum class DatasetFormat { CsvLabelText, TwoDirectory };

// CSV format: optional header (detected by a non-numeric first field),
// columns `label,text`, RFC-4180 quoting. Two-directory format: pos/ and
// neg/ directories of one-review-per-file plain text. Ids are assigned in
// input order starting at 0.
std::vector<Document> load_dataset(const std::string& path, DatasetFormat format);

// Strips HTML tags and control characters, collapses repeated whitespace,
// trims. Idempotent. May return an empty string; callers drop such documents.
std::string clean_text(const std::string& raw, const PreprocessConfig& config);

// Tokens are maximal runs of alphanumeric characters plus internal
// apostrophes/hyphens; each standalone punctuation character becomes its own
// token. Byte spans into `text` are recorded, so joining surfaces with the
// inter-span gaps reproduces the input exactly. Bytes >= 0x80 are treated as
// word characters (multibyte sequences pass through unsplit).
TokenizedDocument tokenize(const std::string& text, const PreprocessConfig& config);

// Recomputes each normalized form from the surface: lowercase when configured,
// then the fixed suffix-strip rules when `stem` is set. Surfaces and spans
// are untouched, so the operation is idempotent.
TokenizedDocument normalize(TokenizedDocument doc, const PreprocessConfig& config);

// Flags tokens whose normalized form is in `stopwords`. Tokens are never
// deleted; downstream modules need positional stability.
TokenizedDocument mark_stopwords(TokenizedDocument doc,
                                 const std::unordered_set<std::string>& stopwords);

// Deterministic seeded shuffle, class-stratified: per-class test count =
// llround(fraction * class size). Throws if either side would be empty.
std::pair<std::vector<Document>, std::vector<Document>> split(
    const std::vector<Document>& docs, double test_fraction, std::uint64_t seed);

// Suffix-strip stemmer used by normalize(): trailing 's, sses->ss, ies->i,
// trailing s after a non-s letter, trailing ing/ed when the remaining stem
// has >= 3 chars and a vowel. Exposed for tests.
std::string stem_word(std::string word);

// One lowercase token per line, '#' comments allowed. Empty path loads the
// built-in English list.
std::unordered_set<std::string> load_stopwords(const std::string& path);
const std::vector<std::string>& builtin_stopwords();

// PreprocessConfig plus the resolved stop-word set; runs the whole
// clean -> tokenize -> normalize -> mark_stopwords chain.
struct Preprocessor {
  PreprocessConfig config;
  std::unordered_set<std::string> stopwords;

  static Preprocessor make(const PreprocessConfig& config);
  TokenizedDocument run(const std::string& raw_text, int doc_id = -1) const;
};

// True if the token contains at least one alphanumeric (or >= 0x80) byte,
// i.e. it is not punctuation-only. Metrics that count "words" use this.
bool is_word_token(const Token& token);

}  // namespace textshift
