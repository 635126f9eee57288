#pragma once

#include <array>
#include <string>

#include <json.hpp>

#include "textshift/attack.hpp"
#include "textshift/drift.hpp"
#include "textshift/explain.hpp"
#include "textshift/model.hpp"

namespace textshift {

nlohmann::json to_json(const Prediction& p);
nlohmann::json to_json(const Substitution& s);
nlohmann::json to_json(const AttackResult& r);
nlohmann::json to_json(const AttackSummary& s);
nlohmann::json to_json(const Explanation& e);
nlohmann::json to_json(const AlignedToken& t);
nlohmann::json to_json(const DriftReport& r);

std::string escape_html(const std::string& text);

// Balanced-tag self-check used by the HTML emitters (and their tests).
// Handles doctype, comments and self-closing tags; attribute values emitted
// by this project never contain '>'.
bool html_is_well_formed(const std::string& html);

// Standard page shell around a body; runs the well-formedness self-check and
// throws std::logic_error if the result is unbalanced.
std::string html_page(const std::string& title, const std::string& body);

// Terminal rendering of one attack: [[word]] brackets around changed
// positions on both sides plus the confidence transition.
std::string render_attack_console(const AttackResult& result, const TokenizedDocument& doc,
                                  const std::array<std::string, 2>& class_names);

// Standalone page with per-token highlight: class-0 color vs class-1 color
// by weight sign, opacity proportional to |weight| / max |weight|, and a
// feature table showing |weight| / sum |top-K| percentages.
std::string explanation_to_html(const Explanation& explanation,
                                const PreprocessConfig& preprocess,
                                const std::array<std::string, 2>& class_names);

// Side-by-side before/after panel plus the aligned weight-delta table.
std::string drift_to_html(const Explanation& before, const Explanation& after,
                          const DriftReport& report, const PreprocessConfig& preprocess,
                          const std::array<std::string, 2>& class_names);

// Writes UTF-8 with a trailing newline, creating parent directories.
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace textshift
