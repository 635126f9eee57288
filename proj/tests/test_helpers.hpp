#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "textshift/corpus.hpp"
#include "textshift/model.hpp"

namespace testutil {

// A TokenizedDocument whose tokens are the given words joined by single
// spaces, normalized to lowercase, spans consistent.
inline textshift::TokenizedDocument make_doc(const std::vector<std::string>& words,
                                             int doc_id = 0) {
  textshift::TokenizedDocument doc;
  doc.doc_id = doc_id;
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text.push_back(' ');
    textshift::Token t;
    t.surface = w;
    t.normalized = w;
    for (char& c : t.normalized) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    t.begin = text.size();
    text += w;
    t.end = text.size();
    doc.tokens.push_back(std::move(t));
  }
  doc.cleaned_text = text;
  return doc;
}

inline std::string write_temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

// Fixed-output model for attack/explain tests: p1 from a callable on the text.
template <typename F>
class FunctionModel : public textshift::TextModel {
 public:
  explicit FunctionModel(F f) : f_(std::move(f)) {}

 protected:
  textshift::Prediction score(const std::string& text) const override {
    return textshift::prediction_from_p1(f_(text));
  }

 private:
  F f_;
};

template <typename F>
FunctionModel<F> make_model(F f) {
  return FunctionModel<F>(std::move(f));
}

inline bool text_contains_word(const std::string& text, const std::string& word) {
  std::size_t pos = 0;
  while ((pos = text.find(word, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
    std::size_t end = pos + word.size();
    bool right_ok = end >= text.size() || !std::isalnum(static_cast<unsigned char>(text[end]));
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace testutil
