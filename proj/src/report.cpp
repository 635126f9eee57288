#include "textshift/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace textshift {

namespace {

nlohmann::json opt_to_json(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

std::string format_pct(double fraction) {
  std::ostringstream os;
  os << std::lround(fraction * 100.0) << "%";
  return os.str();
}

// Tokens of the cleaned text with [[ ]] around the given positions,
// substituting replacement words where provided.
std::string bracketed_text(const TokenizedDocument& doc,
                           const std::vector<Substitution>& subs, bool use_replacements) {
  std::vector<const Substitution*> at(doc.tokens.size(), nullptr);
  for (const auto& s : subs) {
    if (s.token_position >= 0 && static_cast<std::size_t>(s.token_position) < at.size()) {
      at[static_cast<std::size_t>(s.token_position)] = &s;
    }
  }
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    out.append(doc.cleaned_text, cursor, t.begin - cursor);
    if (at[i] != nullptr) {
      out += "[[";
      out += use_replacements ? at[i]->replacement : t.surface;
      out += "]]";
    } else {
      out += t.surface;
    }
    cursor = t.end;
  }
  out.append(doc.cleaned_text, cursor, doc.cleaned_text.size() - cursor);
  return out;
}

// Highlighted sentence: top-K tokens get a sign-colored background with
// opacity |w| / max|w|.
std::string highlight_tokens(const std::string& text, const PreprocessConfig& preprocess,
                             const std::vector<TokenWeight>& weights) {
  TokenizedDocument doc = tokenize(text, preprocess);
  double max_abs = 0.0;
  for (const auto& tw : weights) max_abs = std::max(max_abs, std::abs(tw.weight));
  std::vector<double> weight_at(doc.tokens.size(), 0.0);
  std::vector<bool> marked(doc.tokens.size(), false);
  for (const auto& tw : weights) {
    if (tw.position >= 0 && static_cast<std::size_t>(tw.position) < doc.tokens.size()) {
      weight_at[static_cast<std::size_t>(tw.position)] = tw.weight;
      marked[static_cast<std::size_t>(tw.position)] = true;
    }
  }
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    out += escape_html(doc.cleaned_text.substr(cursor, t.begin - cursor));
    if (marked[i] && max_abs > 0.0) {
      double w = weight_at[i];
      double opacity = std::abs(w) / max_abs;
      const char* rgb = w > 0.0 ? "49,130,189" : "230,126,34";  // class 1 blue / class 0 orange
      std::ostringstream style;
      style << "background-color: rgba(" << rgb << "," << opacity << ")";
      out += "<span class=\"tok\" style=\"" + style.str() + "\" title=\"weight " +
             std::to_string(w) + "\">" + escape_html(t.surface) + "</span>";
    } else {
      out += escape_html(t.surface);
    }
    cursor = t.end;
  }
  out += escape_html(doc.cleaned_text.substr(cursor));
  return out;
}

const char* kPageStyle =
    "body { font-family: sans-serif; margin: 2em; max-width: 60em; }\n"
    "table { border-collapse: collapse; }\n"
    "td, th { border: 1px solid #999; padding: 0.3em 0.8em; text-align: left; }\n"
    ".sentence { line-height: 1.9; font-size: 1.1em; margin: 1em 0; }\n"
    ".tok { padding: 0.1em 0.15em; border-radius: 0.2em; }\n"
    ".changed { font-weight: bold; }\n";

std::string feature_table(const Explanation& e, const std::array<std::string, 2>& class_names) {
  double total_abs = 0.0;
  for (const auto& tw : e.token_weights) total_abs += std::abs(tw.weight);
  std::string rows;
  for (const auto& tw : e.token_weights) {
    double share = total_abs > 0.0 ? std::abs(tw.weight) / total_abs : 0.0;
    rows += "<tr><td>" + std::to_string(tw.position) + "</td><td>" + escape_html(tw.token) +
            "</td><td>" + std::to_string(tw.weight) + "</td><td>" + format_pct(share) +
            "</td><td>" + escape_html(class_names[tw.weight > 0.0 ? 1 : 0]) + "</td></tr>\n";
  }
  return "<table>\n<tr><th>position</th><th>token</th><th>weight</th>"
         "<th>importance</th><th>pushes toward</th></tr>\n" +
         rows + "</table>\n";
}

}  // namespace

nlohmann::json to_json(const Prediction& p) {
  return nlohmann::json{{"p0", p.p0}, {"p1", p.p1}, {"predicted_class", p.predicted_class}};
}

nlohmann::json to_json(const Substitution& s) {
  return nlohmann::json{{"token_position", s.token_position},
                        {"original", s.original},
                        {"replacement", s.replacement},
                        {"kind", to_string(s.kind)}};
}

nlohmann::json to_json(const AttackResult& r) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : r.substitutions) subs.push_back(to_json(s));
  return nlohmann::json{{"doc_id", r.doc_id},
                        {"status", to_string(r.status)},
                        {"original_text", r.original_text},
                        {"perturbed_text", r.perturbed_text},
                        {"original_pred", to_json(r.original_pred)},
                        {"final_pred", to_json(r.final_pred)},
                        {"substitutions", subs},
                        {"queries", r.queries},
                        {"percent_words_changed", r.percent_words_changed},
                        {"words_in_sentence", r.words_in_sentence},
                        {"truth_label", r.truth_label}};
}

nlohmann::json to_json(const AttackSummary& s) {
  return nlohmann::json{{"n_examples", s.n_examples},
                        {"n_success", s.n_success},
                        {"n_failed", s.n_failed},
                        {"n_skipped", s.n_skipped},
                        {"original_accuracy", s.original_accuracy},
                        {"accuracy_under_attack", s.accuracy_under_attack},
                        {"success_rate", opt_to_json(s.success_rate)},
                        {"avg_percent_words_changed", opt_to_json(s.avg_percent_words_changed)},
                        {"avg_queries", opt_to_json(s.avg_queries)},
                        {"avg_words_per_sentence", s.avg_words_per_sentence}};
}

nlohmann::json to_json(const Explanation& e) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& tw : e.token_weights) {
    features.push_back(nlohmann::json{
        {"position", tw.position}, {"token", tw.token}, {"weight", tw.weight}});
  }
  return nlohmann::json{{"text", e.text},
                        {"target_class", e.target_class},
                        {"prediction", to_json(e.prediction)},
                        {"intercept", e.intercept},
                        {"fidelity_r2", e.fidelity_r2},
                        {"features", features}};
}

nlohmann::json to_json(const AlignedToken& t) {
  return nlohmann::json{{"position", t.position},
                        {"token_before", t.token_before},
                        {"token_after", t.token_after},
                        {"changed", t.changed},
                        {"weight_before", t.weight_before},
                        {"weight_after", t.weight_after}};
}

nlohmann::json to_json(const DriftReport& r) {
  nlohmann::json aligned = nlohmann::json::array();
  for (const auto& t : r.aligned) aligned.push_back(to_json(t));
  return nlohmann::json{
      {"pred_before", to_json(r.pred_before)},
      {"pred_after", to_json(r.pred_after)},
      {"flipped", r.flipped},
      {"confidence_delta", {r.confidence_delta[0], r.confidence_delta[1]}},
      {"topk_jaccard", r.topk_jaccard},
      {"spearman_rho", opt_to_json(r.spearman_rho)},
      {"sign_flips", r.sign_flips},
      {"aligned", aligned},
      {"transition_text", r.transition_text}};
}

std::string escape_html(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

bool html_is_well_formed(const std::string& html) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  const std::size_t n = html.size();
  while (i < n) {
    if (html[i] != '<') {
      ++i;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      std::size_t end = html.find("-->", i + 4);
      if (end == std::string::npos) return false;
      i = end + 3;
      continue;
    }
    if (i + 1 < n && html[i + 1] == '!') {  // doctype
      std::size_t end = html.find('>', i);
      if (end == std::string::npos) return false;
      i = end + 1;
      continue;
    }
    std::size_t end = html.find('>', i);
    if (end == std::string::npos) return false;
    std::string inside = html.substr(i + 1, end - i - 1);
    i = end + 1;
    bool closing = !inside.empty() && inside[0] == '/';
    bool self_closing = !inside.empty() && inside.back() == '/';
    if (closing) {
      std::string name = inside.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      std::string name = inside.substr(0, inside.find_first_of(" \t\n"));
      if (name.empty()) return false;
      stack.push_back(name);
    }
  }
  return stack.empty();
}

std::string html_page(const std::string& title, const std::string& body) {
  std::string html;
  html += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n<title>";
  html += escape_html(title);
  html += "</title>\n<style>\n";
  html += kPageStyle;
  html += "</style>\n</head>\n<body>\n";
  html += body;
  html += "</body>\n</html>\n";
  // emitter self-check: never ship unbalanced markup
  if (!html_is_well_formed(html)) {
    throw std::logic_error("emitted HTML failed the well-formedness self-check");
  }
  return html;
}

std::string render_attack_console(const AttackResult& result, const TokenizedDocument& doc,
                                  const std::array<std::string, 2>& class_names) {
  std::ostringstream os;
  os << "#" << result.doc_id << " " << to_string(result.status) << "  queries=" << result.queries;
  if (result.status != AttackStatus::Skipped) {
    os << "  words_changed=" << format_pct(result.percent_words_changed) << " ("
       << result.substitutions.size() << "/" << result.words_in_sentence << ")";
  }
  os << "\n  " << render_transition(result.original_pred, result.final_pred, class_names);
  if (!result.substitutions.empty()) {
    os << "\n  - " << bracketed_text(doc, result.substitutions, false);
    os << "\n  + " << bracketed_text(doc, result.substitutions, true);
  } else {
    os << "\n    " << result.original_text;
  }
  return os.str();
}

std::string explanation_to_html(const Explanation& explanation,
                                const PreprocessConfig& preprocess,
                                const std::array<std::string, 2>& class_names) {
  const Prediction& p = explanation.prediction;
  std::string body;
  body += "<h1>Explanation</h1>\n";
  body += "<p>prediction: " +
          escape_html(class_names[static_cast<std::size_t>(p.predicted_class)]) + " (" +
          escape_html(class_names[0]) + " " + std::to_string(p.p0) + ", " +
          escape_html(class_names[1]) + " " + std::to_string(p.p1) + ")" +
          " &middot; explained class: " +
          escape_html(class_names[static_cast<std::size_t>(explanation.target_class)]) +
          " &middot; fidelity R&sup2;: " + std::to_string(explanation.fidelity_r2) + "</p>\n";
  body += "<p class=\"sentence\">" +
          highlight_tokens(explanation.text, preprocess, explanation.token_weights) + "</p>\n";
  body += feature_table(explanation, class_names);
  return html_page("Explanation", body);
}

std::string drift_to_html(const Explanation& before, const Explanation& after,
                          const DriftReport& report, const PreprocessConfig& preprocess,
                          const std::array<std::string, 2>& class_names) {
  std::string body;
  body += "<h1>Before vs after attack</h1>\n";
  body += "<p>" + escape_html(report.transition_text) + "</p>\n";
  body += "<h2>Before</h2>\n<p class=\"sentence\">" +
          highlight_tokens(before.text, preprocess, before.token_weights) + "</p>\n";
  body += "<h2>After</h2>\n<p class=\"sentence\">" +
          highlight_tokens(after.text, preprocess, after.token_weights) + "</p>\n";
  body += "<h2>Drift metrics</h2>\n<table>\n";
  body += "<tr><th>flipped</th><td>" + std::string(report.flipped ? "true" : "false") +
          "</td></tr>\n";
  body += "<tr><th>top-K Jaccard</th><td>" + std::to_string(report.topk_jaccard) +
          "</td></tr>\n";
  body += "<tr><th>Spearman rho</th><td>" +
          (report.spearman_rho.has_value() ? std::to_string(*report.spearman_rho)
                                           : std::string("null")) +
          "</td></tr>\n";
  body += "<tr><th>sign flips</th><td>" + std::to_string(report.sign_flips) + "</td></tr>\n";
  body += "<tr><th>confidence delta</th><td>" + escape_html(class_names[0]) + " " +
          std::to_string(report.confidence_delta[0]) + ", " + escape_html(class_names[1]) + " " +
          std::to_string(report.confidence_delta[1]) + "</td></tr>\n";
  body += "</table>\n";
  body += "<h2>Aligned tokens</h2>\n<table>\n"
          "<tr><th>position</th><th>before</th><th>after</th><th>weight before</th>"
          "<th>weight after</th><th>delta</th></tr>\n";
  for (const auto& t : report.aligned) {
    std::string cls = t.changed ? " class=\"changed\"" : "";
    body += "<tr" + cls + "><td>" + std::to_string(t.position) + "</td><td>" +
            escape_html(t.token_before) + "</td><td>" + escape_html(t.token_after) +
            "</td><td>" + std::to_string(t.weight_before) + "</td><td>" +
            std::to_string(t.weight_after) + "</td><td>" +
            std::to_string(t.weight_after - t.weight_before) + "</td></tr>\n";
  }
  body += "</table>\n";
  return html_page("Drift", body);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace textshift
