#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "test_helpers.hpp"
#include "textshift/corpus.hpp"
#include "textshift/errors.hpp"

using namespace textshift;

namespace {

// Round-trip oracle: surfaces plus inter-span gaps must rebuild the text.
std::string rebuild(const TokenizedDocument& doc) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& t : doc.tokens) {
    out += doc.cleaned_text.substr(cursor, t.begin - cursor);
    out += t.surface;
    cursor = t.end;
  }
  out += doc.cleaned_text.substr(cursor);
  return out;
}

}  // namespace

TEST_CASE("clean_text strips tags and collapses whitespace") {
  PreprocessConfig cfg;
  CHECK(clean_text("<b>good</b>  movie\n", cfg) == "good movie");
  CHECK(clean_text("plain text", cfg) == "plain text");
  CHECK(clean_text("a<br/>b", cfg) == "a b");
  CHECK(clean_text("  padded  ", cfg) == "padded");
  CHECK(clean_text("ctrl\x01\x02here", cfg) == "ctrlhere");
  CHECK(clean_text("tab\tand\nnewline", cfg) == "tab and newline");
  CHECK(clean_text("", cfg).empty());
  CHECK(clean_text("<only><tags>", cfg).empty());
}

TEST_CASE("clean_text keeps an unclosed angle bracket literally") {
  PreprocessConfig cfg;
  CHECK(clean_text("3 < 4", cfg) == "3 < 4");
  CHECK(clean_text("a < b > c", cfg) == "a c");  // "< b >" parses as a tag
}

TEST_CASE("clean_text respects strip_html=false") {
  PreprocessConfig cfg;
  cfg.strip_html = false;
  CHECK(clean_text("<b>good</b>", cfg) == "<b>good</b>");
}

TEST_CASE("clean_text is idempotent") {
  PreprocessConfig cfg;
  std::mt19937 rng(13);
  const std::string alphabet = "ab <>/\t\n.,'-x01\x01";
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw;
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 40);
    int n = len(rng);
    for (int i = 0; i < n; ++i) raw.push_back(alphabet[pick(rng)]);
    std::string once = clean_text(raw, cfg);
    CHECK(clean_text(once, cfg) == once);
  }
}

TEST_CASE("tokenize splits words and standalone punctuation") {
  PreprocessConfig cfg;
  // By the token rule, "it's" is a single token (internal apostrophe), so
  // the sentence is 8 words plus the terminal period.
  auto doc = tokenize("it's so clever you want to hate it .", cfg);
  REQUIRE(doc.tokens.size() == 9);
  CHECK(doc.tokens.front().surface == "it's");
  CHECK(doc.tokens.back().surface == ".");

  CHECK(tokenize("", cfg).tokens.empty());

  auto doc2 = tokenize("offers that rare combination of entertainment and education .", cfg);
  CHECK(doc2.tokens.size() == 9);
  CHECK(doc2.tokens.back().surface == ".");
}

TEST_CASE("tokenize handles hyphens, apostrophes and digits") {
  PreprocessConfig cfg;
  auto doc = tokenize("rock-and-roll isn't 90s-style -- wow", cfg);
  std::vector<std::string> surfaces;
  for (const auto& t : doc.tokens) surfaces.push_back(t.surface);
  CHECK(surfaces == std::vector<std::string>{"rock-and-roll", "isn't", "90s-style", "-", "-",
                                             "wow"});
}

TEST_CASE("tokenize records exact spans") {
  PreprocessConfig cfg;
  std::string text = "so clever, right?";
  auto doc = tokenize(text, cfg);
  for (const auto& t : doc.tokens) {
    CHECK(text.substr(t.begin, t.end - t.begin) == t.surface);
  }
  std::size_t prev_end = 0;
  for (const auto& t : doc.tokens) {
    CHECK(t.begin >= prev_end);
    CHECK(t.end > t.begin);
    prev_end = t.end;
  }
}

TEST_CASE("tokenize round-trips through spans on random cleaned text") {
  PreprocessConfig cfg;
  std::mt19937 rng(29);
  const std::string alphabet = "abc de'-.,!?()09";
  for (int trial = 0; trial < 300; ++trial) {
    std::string raw;
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 60);
    int n = len(rng);
    for (int i = 0; i < n; ++i) raw.push_back(alphabet[pick(rng)]);
    std::string cleaned = clean_text(raw, cfg);
    auto doc = tokenize(cleaned, cfg);
    CHECK(rebuild(doc) == cleaned);
  }
}

TEST_CASE("tokenize drops short word tokens under min_token_chars") {
  PreprocessConfig cfg;
  cfg.min_token_chars = 2;
  auto doc = tokenize("a bb c ddd", cfg);
  std::vector<std::string> surfaces;
  for (const auto& t : doc.tokens) surfaces.push_back(t.surface);
  CHECK(surfaces == std::vector<std::string>{"bb", "ddd"});
}

TEST_CASE("stemmer rule table") {
  CHECK(stem_word("curls") == "curl");
  CHECK(stem_word("pulls") == "pull");
  CHECK(stem_word("classes") == "class");
  CHECK(stem_word("dresses") == "dress");
  CHECK(stem_word("flies") == "fli");
  CHECK(stem_word("class") == "class");     // ss kept
  CHECK(stem_word("running") == "runn");    // stem >= 3 chars with vowel
  CHECK(stem_word("sing") == "sing");       // stem "s" too short
  CHECK(stem_word("hated") == "hat");
  CHECK(stem_word("red") == "red");         // stem "r" too short
  CHECK(stem_word("movie's") == "movie");
  CHECK(stem_word("1990s") == "1990s");     // digit before s: not a plural
  CHECK(stem_word("meetings") == "meet");   // s then ing
}

TEST_CASE("normalize lowercases and optionally stems, surfaces untouched") {
  PreprocessConfig cfg;
  auto doc = tokenize("Clever curls", cfg);
  auto out = normalize(doc, cfg);
  CHECK(out.tokens[0].normalized == "clever");
  CHECK(out.tokens[0].surface == "Clever");
  CHECK(out.tokens[1].normalized == "curls");

  cfg.stem = true;
  auto stemmed = normalize(doc, cfg);
  CHECK(stemmed.tokens[1].normalized == "curl");
  CHECK(stemmed.tokens[1].surface == "curls");
}

TEST_CASE("normalize is idempotent on its own output") {
  PreprocessConfig cfg;
  cfg.stem = true;
  auto doc = normalize(tokenize("Raising Meetings pressed classes", cfg), cfg);
  auto again = normalize(doc, cfg);
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    CHECK(again.tokens[i].normalized == doc.tokens[i].normalized);
    CHECK(again.tokens[i].surface == doc.tokens[i].surface);
  }
}

TEST_CASE("mark_stopwords flags without deleting") {
  PreprocessConfig cfg;
  auto stop = load_stopwords("");
  auto doc = mark_stopwords(normalize(tokenize("the clever film", cfg), cfg), stop);
  REQUIRE(doc.tokens.size() == 3);
  CHECK(doc.tokens[0].is_stopword);
  CHECK_FALSE(doc.tokens[1].is_stopword);
  CHECK_FALSE(doc.tokens[2].is_stopword);

  auto all_stop = mark_stopwords(normalize(tokenize("the and of", cfg), cfg), stop);
  CHECK(all_stop.tokens.size() == 3);
  for (const auto& t : all_stop.tokens) CHECK(t.is_stopword);
}

TEST_CASE("mark_stopwords preserves count and spans") {
  PreprocessConfig cfg;
  auto stop = load_stopwords("");
  auto before = normalize(tokenize("the quick film ends .", cfg), cfg);
  auto after = mark_stopwords(before, stop);
  REQUIRE(after.tokens.size() == before.tokens.size());
  for (std::size_t i = 0; i < before.tokens.size(); ++i) {
    CHECK(after.tokens[i].begin == before.tokens[i].begin);
    CHECK(after.tokens[i].end == before.tokens[i].end);
  }
}

TEST_CASE("stopword file loading") {
  auto path = testutil::write_temp_file("ts_stopwords.txt", "# comment\nthe\nand # inline\n\n  of\n");
  auto set = load_stopwords(path);
  CHECK(set.count("the") == 1);
  CHECK(set.count("and") == 1);
  CHECK(set.count("of") == 1);
  CHECK(set.count("#") == 0);
  CHECK(set.size() == 3);
  CHECK(load_stopwords("").count("the") == 1);  // builtin
  CHECK_THROWS(load_stopwords("/nonexistent/stopwords.txt"));
}

TEST_CASE("split stratifies and is deterministic") {
  std::vector<Document> docs;
  for (int i = 0; i < 10; ++i) docs.push_back({i, "text " + std::to_string(i), i < 5 ? 0 : 1});

  auto [train, test] = split(docs, 0.2, 7);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  int test_label_sum = 0;
  for (const auto& d : test) test_label_sum += d.label;
  CHECK(test_label_sum == 1);  // one per class

  auto [train2, test2] = split(docs, 0.2, 7);
  REQUIRE(train2.size() == train.size());
  for (std::size_t i = 0; i < train.size(); ++i) CHECK(train2[i].id == train[i].id);

  // union = input, intersection empty
  std::set<int> ids;
  for (const auto& d : train) ids.insert(d.id);
  for (const auto& d : test) ids.insert(d.id);
  CHECK(ids.size() == docs.size());
}

TEST_CASE("split on 2 same-class docs with fraction 0.5") {
  std::vector<Document> docs{{0, "a", 1}, {1, "b", 1}};
  auto [train, test] = split(docs, 0.5, 3);
  CHECK(train.size() == 1);
  CHECK(test.size() == 1);
}

TEST_CASE("split rejects empty partitions") {
  std::vector<Document> one_per_class{{0, "a", 0}, {1, "b", 1}};
  // round(0.5 * 1) = 1 per class -> train would be empty
  CHECK_THROWS_AS(split(one_per_class, 0.5, 1), ConfigError);

  std::vector<Document> docs;
  for (int i = 0; i < 10; ++i) docs.push_back({i, "t", i % 2});
  CHECK_THROWS_AS(split(docs, 0.01, 1), ConfigError);  // test side empty
  CHECK_THROWS_AS(split({{0, "a", 0}}, 0.5, 1), ConfigError);
  CHECK_THROWS_AS(split(docs, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(split(docs, 1.0, 1), ConfigError);
}

TEST_CASE("load_dataset csv") {
  auto path = testutil::write_temp_file(
      "ts_data.csv",
      "label,text\n"
      "1,\"offers that rare combination of entertainment and education .\"\n"
      "0,\"a dull, plodding mess\"\n"
      "1,unquoted text row\n");
  auto docs = load_dataset(path, DatasetFormat::CsvLabelText);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].id == 0);
  CHECK(docs[0].label == 1);
  CHECK(docs[0].text == "offers that rare combination of entertainment and education .");
  CHECK(docs[1].text == "a dull, plodding mess");  // quoted comma kept
  CHECK(docs[2].id == 2);
}

TEST_CASE("load_dataset csv without header and with escaped quotes") {
  auto path = testutil::write_temp_file("ts_data2.csv", "0,\"he said \"\"hi\"\"\"\n1,fine\n");
  auto docs = load_dataset(path, DatasetFormat::CsvLabelText);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].text == "he said \"hi\"");
  CHECK(docs[1].label == 1);
}

TEST_CASE("load_dataset csv errors") {
  auto empty = testutil::write_temp_file("ts_empty.csv", "");
  CHECK_THROWS_WITH_AS(load_dataset(empty, DatasetFormat::CsvLabelText),
                       doctest::Contains("empty dataset"), std::runtime_error);

  auto bad_label = testutil::write_temp_file("ts_badlabel.csv", "1,ok\n2,bad\n");
  try {
    load_dataset(bad_label, DatasetFormat::CsvLabelText);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);  // line number
  }

  auto extra_col = testutil::write_temp_file("ts_cols.csv", "1,a,b\n");
  CHECK_THROWS(load_dataset(extra_col, DatasetFormat::CsvLabelText));
  CHECK_THROWS(load_dataset("/nonexistent.csv", DatasetFormat::CsvLabelText));
}

TEST_CASE("load_dataset two-directory layout") {
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "ts_twodir";
  fs::remove_all(root);
  fs::create_directories(root / "pos");
  fs::create_directories(root / "neg");
  std::ofstream(root / "pos" / "0.txt") << "a fine film";
  std::ofstream(root / "pos" / "1.txt") << "really enjoyable";
  std::ofstream(root / "neg" / "0.txt") << "a sad mess";
  auto docs = load_dataset(root.string(), DatasetFormat::TwoDirectory);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].label == 1);  // pos first, sorted by filename
  CHECK(docs[0].text == "a fine film");
  CHECK(docs[2].label == 0);
  CHECK(docs[2].id == 2);
  CHECK_THROWS(load_dataset((root / "pos").string(), DatasetFormat::TwoDirectory));
}

TEST_CASE("preprocessor runs the whole chain") {
  PreprocessConfig cfg;
  auto pre = Preprocessor::make(cfg);
  auto doc = pre.run("<b>The</b> Clever  film", 42);
  CHECK(doc.doc_id == 42);
  CHECK(doc.cleaned_text == "The Clever film");
  REQUIRE(doc.tokens.size() == 3);
  CHECK(doc.tokens[0].is_stopword);
  CHECK(doc.tokens[1].normalized == "clever");
}

TEST_CASE("is_word_token distinguishes words from punctuation") {
  PreprocessConfig cfg;
  auto doc = tokenize("well , 90s !", cfg);
  REQUIRE(doc.tokens.size() == 4);
  CHECK(is_word_token(doc.tokens[0]));
  CHECK_FALSE(is_word_token(doc.tokens[1]));
  CHECK(is_word_token(doc.tokens[2]));
  CHECK_FALSE(is_word_token(doc.tokens[3]));
}
