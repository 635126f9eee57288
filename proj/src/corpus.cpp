#include "textshift/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "textshift/errors.hpp"
#include "textshift/log.hpp"

namespace textshift {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool parse_binary_label(const std::string& field, int& label) {
  std::string t = field;
  while (!t.empty() && is_space_byte(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
  while (!t.empty() && is_space_byte(static_cast<unsigned char>(t.back()))) t.pop_back();
  if (t == "0") {
    label = 0;
    return true;
  }
  if (t == "1") {
    label = 1;
    return true;
  }
  return false;
}

// One RFC-4180 record; quoted fields may contain commas, quotes ("") and
// newlines. Returns false at end of input. `line` tracks the record's first
// line for error messages.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, int& line,
                     int& next_line) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  line = next_line;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(field);
      return true;
    }
    any = true;
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++next_line;
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      ++next_line;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
      return true;
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
  (void)any;
}

std::vector<Document> load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::vector<Document> docs;
  std::vector<std::string> fields;
  int line = 1;
  int next_line = 1;
  bool first = true;
  while (read_csv_record(in, fields, line, next_line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    int label = 0;
    if (first && !parse_binary_label(fields[0], label)) {
      first = false;  // header row
      continue;
    }
    first = false;
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line) +
                               ": expected exactly 2 columns (label,text), got " +
                               std::to_string(fields.size()));
    }
    if (!parse_binary_label(fields[0], label)) {
      throw std::runtime_error(path + ":" + std::to_string(line) +
                               ": label must be 0 or 1, got \"" + fields[0] + "\"");
    }
    Document d;
    d.id = static_cast<int>(docs.size());
    d.label = label;
    d.text = fields[1];
    docs.push_back(std::move(d));
  }
  if (docs.empty()) throw std::runtime_error("empty dataset: " + path);
  return docs;
}

std::vector<Document> load_two_directory(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<Document> docs;
  for (const auto& [sub, label] : {std::pair<const char*, int>{"pos", 1}, {"neg", 0}}) {
    fs::path dir = fs::path(path) / sub;
    if (!fs::is_directory(dir)) {
      throw std::runtime_error("expected directory not found: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open review file: " + file.string());
      std::ostringstream buf;
      buf << in.rdbuf();
      Document d;
      d.id = static_cast<int>(docs.size());
      d.label = label;
      d.text = buf.str();
      docs.push_back(std::move(d));
    }
  }
  if (docs.empty()) throw std::runtime_error("empty dataset: " + path);
  return docs;
}

bool has_vowel(const std::string& s) {
  return s.find_first_of("aeiou") != std::string::npos;
}

}  // namespace

void PreprocessConfig::validate() const {
  if (min_token_chars < 1) throw ConfigError("min_token_chars must be >= 1");
}

std::vector<Document> load_dataset(const std::string& path, DatasetFormat format) {
  switch (format) {
    case DatasetFormat::CsvLabelText: return load_csv(path);
    case DatasetFormat::TwoDirectory: return load_two_directory(path);
  }
  throw std::runtime_error("unknown dataset format");
}

std::string clean_text(const std::string& raw, const PreprocessConfig& config) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  auto push_space = [&out]() {
    if (!out.empty() && out.back() != ' ') out.push_back(' ');
  };
  while (i < raw.size()) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    if (config.strip_html && c == '<') {
      std::size_t close = raw.find('>', i + 1);
      if (close != std::string::npos) {
        push_space();
        i = close + 1;
        continue;
      }
      // no closing '>': keep the literal '<'
      out.push_back('<');
      ++i;
      continue;
    }
    if (is_space_byte(c)) {
      push_space();
      ++i;
      continue;
    }
    if (c < 0x20 || c == 0x7f) {  // remaining control characters
      ++i;
      continue;
    }
    out.push_back(static_cast<char>(c));
    ++i;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

TokenizedDocument tokenize(const std::string& text, const PreprocessConfig& config) {
  config.validate();
  TokenizedDocument doc;
  doc.cleaned_text = text;
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto word_at = [&](std::size_t pos) {
    return pos < n && is_word_byte(static_cast<unsigned char>(text[pos]));
  };
  auto emit = [&](std::size_t begin, std::size_t end) {
    if (end - begin < static_cast<std::size_t>(config.min_token_chars)) return;
    Token t;
    t.surface = text.substr(begin, end - begin);
    t.normalized = t.surface;
    t.begin = begin;
    t.end = end;
    doc.tokens.push_back(std::move(t));
  };
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      std::size_t begin = i;
      while (i < n) {
        if (word_at(i)) {
          ++i;
        } else if ((text[i] == '\'' || text[i] == '-') && i > begin && word_at(i + 1)) {
          ++i;  // internal apostrophe/hyphen
        } else {
          break;
        }
      }
      emit(begin, i);
      continue;
    }
    emit(i, i + 1);  // one token per punctuation character
    ++i;
  }
  return doc;
}

std::string stem_word(std::string word) {
  auto ends_with = [&word](const char* suffix) {
    std::size_t len = std::char_traits<char>::length(suffix);
    return word.size() >= len && word.compare(word.size() - len, len, suffix) == 0;
  };
  if (ends_with("'s")) word.erase(word.size() - 2);
  if (ends_with("sses")) {
    word.erase(word.size() - 2);
  } else if (ends_with("ies")) {
    word.erase(word.size() - 2);
  } else if (word.size() >= 2 && word.back() == 's') {
    char prev = word[word.size() - 2];
    if (prev != 's' && std::isalpha(static_cast<unsigned char>(prev))) word.pop_back();
  }
  if (ends_with("ing")) {
    std::string rest = word.substr(0, word.size() - 3);
    if (rest.size() >= 3 && has_vowel(rest)) word = rest;
  } else if (ends_with("ed")) {
    std::string rest = word.substr(0, word.size() - 2);
    if (rest.size() >= 3 && has_vowel(rest)) word = rest;
  }
  return word;
}

TokenizedDocument normalize(TokenizedDocument doc, const PreprocessConfig& config) {
  for (Token& t : doc.tokens) {
    std::string form = t.surface;
    if (config.lowercase) {
      for (char& ch : form) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      }
    }
    if (config.stem) form = stem_word(std::move(form));
    t.normalized = form.empty() ? t.surface : std::move(form);
  }
  return doc;
}

TokenizedDocument mark_stopwords(TokenizedDocument doc,
                                 const std::unordered_set<std::string>& stopwords) {
  for (Token& t : doc.tokens) t.is_stopword = stopwords.count(t.normalized) > 0;
  return doc;
}

std::pair<std::vector<Document>, std::vector<Document>> split(
    const std::vector<Document>& docs, double test_fraction, std::uint64_t seed) {
  if (docs.size() < 2) throw ConfigError("split needs at least 2 documents");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0,1)");
  }
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::vector<Document> train;
  std::vector<Document> test;
  for (int label : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (docs[i].label == label) idx.push_back(i);
    }
    if (idx.empty()) continue;
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(idx.size())));
    n_test = std::min(n_test, idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_test ? test : train).push_back(docs[idx[i]]);
    }
  }
  if (test.empty() || train.empty()) {
    throw ConfigError("test_fraction " + std::to_string(test_fraction) +
                      " yields an empty split");
  }
  auto by_id = [](const Document& a, const Document& b) { return a.id < b.id; };
  std::sort(train.begin(), train.end(), by_id);
  std::sort(test.begin(), test.end(), by_id);
  return {std::move(train), std::move(test)};
}

const std::vector<std::string>& builtin_stopwords() {
  static const std::vector<std::string> words = {
      "a",       "about",   "above",  "after",   "again",  "against", "all",
      "am",      "an",      "and",    "any",     "are",    "aren't",  "as",
      "at",      "be",      "because", "been",   "before", "being",   "below",
      "between", "both",    "but",    "by",      "can",    "cannot",  "could",
      "did",     "do",      "does",   "doing",   "down",   "during",  "each",
      "few",     "for",     "from",   "further", "had",    "has",     "have",
      "having",  "he",      "her",    "here",    "hers",   "herself", "him",
      "himself", "his",     "how",    "i",       "if",     "in",      "into",
      "is",      "isn't",   "it",     "its",     "itself", "just",    "me",
      "more",    "most",    "my",     "myself",  "no",     "nor",     "not",
      "now",     "of",      "off",    "on",      "once",   "only",    "or",
      "other",   "ought",   "our",    "ours",    "out",    "over",    "own",
      "same",    "she",     "should", "so",      "some",   "such",    "than",
      "that",    "the",     "their",  "theirs",  "them",   "themselves",
      "then",    "there",   "these",  "they",    "this",   "those",   "through",
      "to",      "too",     "under",  "until",   "up",     "very",    "was",
      "we",      "were",    "what",   "when",    "where",  "which",   "while",
      "who",     "whom",    "why",    "will",    "with",   "would",   "you",
      "your",    "yours",   "yourself", "yourselves", "it's", "don't", "doesn't",
      "didn't",  "won't",   "wasn't", "weren't", "i'm",    "i've",    "he's",
      "she's",   "we're",   "they're", "also",
  };
  return words;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::unordered_set<std::string> set;
  if (path.empty()) {
    const auto& words = builtin_stopwords();
    set.insert(words.begin(), words.end());
    return set;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stop-word file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && is_space_byte(static_cast<unsigned char>(line.back()))) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() && is_space_byte(static_cast<unsigned char>(line[start]))) {
      ++start;
    }
    if (start > 0) line.erase(0, start);
    if (!line.empty()) set.insert(line);
  }
  return set;
}

Preprocessor Preprocessor::make(const PreprocessConfig& config) {
  config.validate();
  return Preprocessor{config, load_stopwords(config.stopword_path)};
}

TokenizedDocument Preprocessor::run(const std::string& raw_text, int doc_id) const {
  TokenizedDocument doc =
      mark_stopwords(normalize(tokenize(clean_text(raw_text, config), config), config),
                     stopwords);
  doc.doc_id = doc_id;
  return doc;
}

bool is_word_token(const Token& token) {
  for (unsigned char c : token.surface) {
    if (is_word_byte(c)) return true;
  }
  return false;
}

}  // namespace textshift
