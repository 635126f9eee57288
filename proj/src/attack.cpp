#include "textshift/attack.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>
#include <stdexcept>

#include "textshift/errors.hpp"
#include "textshift/log.hpp"

namespace textshift {

namespace {

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Stable 64-bit FNV-1a so typo positions are reproducible across platforms.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string match_first_letter_case(const std::string& original, std::string candidate) {
  if (original.empty() || candidate.empty()) return candidate;
  unsigned char first = static_cast<unsigned char>(original[0]);
  if (std::isupper(first) && std::islower(static_cast<unsigned char>(candidate[0]))) {
    candidate[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(candidate[0])));
  }
  return candidate;
}

constexpr std::pair<char, char> kHomoglyphs[] = {{'o', '0'}, {'l', '1'}, {'a', '@'},
                                                 {'e', '3'}, {'i', '1'}, {'s', '5'}};

// descending score, ties by lower token index
std::vector<int> order_by_score(std::vector<std::pair<double, int>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> order;
  order.reserve(scored.size());
  for (const auto& [score, pos] : scored) order.push_back(pos);
  return order;
}

}  // namespace

void AttackConfig::validate() const {
  if (!(max_percent_words > 0.0 && max_percent_words <= 1.0)) {
    throw ConfigError("max_percent_words must be in (0,1]");
  }
  if (candidates_per_word < 1) throw ConfigError("candidates_per_word must be >= 1");
  if (max_queries < 1) throw ConfigError("max_queries must be >= 1");
}

const char* to_string(SubstitutionKind kind) {
  switch (kind) {
    case SubstitutionKind::Synonym: return "synonym";
    case SubstitutionKind::CharSwap: return "char_swap";
    case SubstitutionKind::CharDelete: return "char_delete";
    case SubstitutionKind::CharInsert: return "char_insert";
    case SubstitutionKind::Homoglyph: return "homoglyph";
  }
  return "?";
}

const char* to_string(AttackStatus status) {
  switch (status) {
    case AttackStatus::Success: return "Success";
    case AttackStatus::Failed: return "Failed";
    case AttackStatus::Skipped: return "Skipped";
  }
  return "?";
}

bool attackable_token(const Token& token) {
  if (token.is_stopword) return false;
  bool has_letter = false;
  for (std::size_t i = 0; i < token.surface.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(token.surface[i]);
    if (std::isalpha(c) || c >= 0x80) {
      has_letter = true;
    } else if ((c == '\'' || c == '-') && i > 0 && i + 1 < token.surface.size()) {
      // internal joiner
    } else {
      return false;
    }
  }
  return has_letter;
}

int count_word_tokens(const TokenizedDocument& doc) {
  int n = 0;
  for (const auto& t : doc.tokens) {
    if (is_word_token(t)) ++n;
  }
  return n;
}

std::string apply_substitutions(const TokenizedDocument& doc,
                                const std::vector<Substitution>& substitutions) {
  std::vector<const std::string*> replacement(doc.tokens.size(), nullptr);
  for (const auto& s : substitutions) {
    if (s.token_position < 0 || static_cast<std::size_t>(s.token_position) >= doc.tokens.size()) {
      throw std::runtime_error("substitution position out of range: " +
                               std::to_string(s.token_position));
    }
    replacement[static_cast<std::size_t>(s.token_position)] = &s.replacement;
  }
  std::string out;
  out.reserve(doc.cleaned_text.size() + 16);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    out.append(doc.cleaned_text, cursor, t.begin - cursor);
    out.append(replacement[i] != nullptr ? *replacement[i] : t.surface);
    cursor = t.end;
  }
  out.append(doc.cleaned_text, cursor, doc.cleaned_text.size() - cursor);
  return out;
}

std::string text_without_token(const TokenizedDocument& doc, int drop_position) {
  std::string out;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (static_cast<int>(i) == drop_position) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(doc.tokens[i].surface);
  }
  return out;
}

std::vector<int> rank_word_importance(const TextModel& model, const TokenizedDocument& doc,
                                      int target_class, long max_probes) {
  std::vector<std::pair<double, int>> scored;
  double p_orig = 0.0;
  bool have_orig = false;
  long probes = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (!attackable_token(doc.tokens[i])) continue;
    if (max_probes >= 0 && probes + (have_orig ? 1 : 2) > max_probes) break;
    if (!have_orig) {
      Prediction p = model.predict(doc.cleaned_text);
      p_orig = target_class == 1 ? p.p1 : p.p0;
      have_orig = true;
      ++probes;
    }
    Prediction without = model.predict(text_without_token(doc, static_cast<int>(i)));
    double p_without = target_class == 1 ? without.p1 : without.p0;
    ++probes;
    scored.emplace_back(p_orig - p_without, static_cast<int>(i));
  }
  return order_by_score(std::move(scored));
}

std::vector<CandidateWord> generate_candidates(const Token& token, const EmbeddingStore& store,
                                               const AttackConfig& config) {
  std::vector<CandidateWord> out;
  std::set<std::string> seen;
  seen.insert(token.surface);
  auto add = [&](std::string word, SubstitutionKind kind, double sim) {
    word = match_first_letter_case(token.surface, std::move(word));
    if (word.empty() || word == token.surface) return;
    if (!seen.insert(word).second) return;
    out.push_back({std::move(word), kind, sim});
  };

  for (auto& [word, sim] :
       store.nearest_neighbors(token.normalized, config.candidates_per_word,
                               config.min_embed_sim)) {
    add(word, SubstitutionKind::Synonym, sim);
  }

  if (config.enable_char_level) {
    const std::string base = to_lower(token.surface);
    const std::size_t len = base.size();
    std::mt19937 rng(static_cast<std::uint32_t>(config.seed ^ fnv1a(base)));
    if (len >= 2) {
      std::size_t swap_at = rng() % (len - 1);
      std::string s = base;
      std::swap(s[swap_at], s[swap_at + 1]);
      add(std::move(s), SubstitutionKind::CharSwap, 1.0);

      std::size_t del_at = rng() % len;
      std::string d = base;
      d.erase(del_at, 1);
      add(std::move(d), SubstitutionKind::CharDelete, 1.0);

      std::size_t ins_at = rng() % len;
      std::string ins = base;
      ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(ins_at), base[ins_at]);
      add(std::move(ins), SubstitutionKind::CharInsert, 1.0);
    }
    for (std::size_t i = 0; i < len; ++i) {
      bool applied = false;
      for (const auto& [from, to] : kHomoglyphs) {
        if (base[i] == from) {
          std::string h = base;
          h[i] = to;
          add(std::move(h), SubstitutionKind::Homoglyph, 1.0);
          applied = true;
          break;
        }
      }
      if (applied) break;  // first applicable character only
    }
  }
  return out;
}

ConstraintCheck check_constraints(const TokenizedDocument& doc,
                                  const std::vector<Substitution>& substitutions,
                                  const AttackConfig& config, const EmbeddingStore& store) {
  int words = count_word_tokens(doc);
  if (words > 0 && static_cast<double>(substitutions.size()) / words > config.max_percent_words) {
    return {false, "max_percent_words"};
  }
  std::set<int> positions;
  for (const auto& s : substitutions) {
    if (s.token_position < 0 || static_cast<std::size_t>(s.token_position) >= doc.tokens.size()) {
      return {false, "position out of range"};
    }
    if (!positions.insert(s.token_position).second) {
      return {false, "position substituted twice"};
    }
    const Token& t = doc.tokens[static_cast<std::size_t>(s.token_position)];
    if (t.is_stopword) return {false, "stop-word position"};
    if (!attackable_token(t)) return {false, "ineligible position (punctuation or digits)"};
    if (s.kind == SubstitutionKind::Synonym) {
      std::string a = to_lower(s.original);
      std::string b = to_lower(s.replacement);
      if (!store.contains(a) || !store.contains(b) ||
          store.cosine(a, b) < config.min_embed_sim) {
        return {false, "embedding similarity below min_embed_sim"};
      }
    }
  }
  return {true, ""};
}

AttackResult greedy_attack(const TextModel& model, const TokenizedDocument& doc,
                           int truth_label, const AttackConfig& config,
                           const EmbeddingStore& store) {
  config.validate();
  // Queries are counted locally so the budget stays exact even when other
  // attacks score the same model concurrently; with a single owner the local
  // count equals the model-counter delta.
  long queries = 0;
  auto probe = [&](const std::string& text) {
    ++queries;
    return model.predict(text);
  };
  auto budget_left = [&]() { return queries < config.max_queries; };

  AttackResult result;
  result.doc_id = doc.doc_id;
  result.original_text = doc.cleaned_text;
  result.perturbed_text = doc.cleaned_text;
  result.words_in_sentence = count_word_tokens(doc);
  result.truth_label = truth_label;

  // (1) score the original; an already-misclassified input is skipped
  Prediction original = probe(doc.cleaned_text);
  result.original_pred = original;
  result.final_pred = original;
  if (original.predicted_class != truth_label) {
    result.status = AttackStatus::Skipped;
    result.queries = static_cast<std::uint64_t>(queries);
    return result;
  }

  auto truth_prob = [&](const Prediction& p) { return truth_label == 1 ? p.p1 : p.p0; };

  // (2) rank words by deletion importance. The original is already scored,
  // so each probe here costs one budget unit; no probe starts once spent.
  std::vector<int> ranking;
  {
    std::vector<std::pair<double, int>> scored;
    double p_orig = truth_prob(original);
    for (std::size_t i = 0; i < doc.tokens.size() && budget_left(); ++i) {
      if (!attackable_token(doc.tokens[i])) continue;
      Prediction without = probe(text_without_token(doc, static_cast<int>(i)));
      scored.emplace_back(p_orig - truth_prob(without), static_cast<int>(i));
    }
    ranking = order_by_score(std::move(scored));
  }

  // (3) greedy commitment in rank order
  const int word_count = result.words_in_sentence;
  double current_prob = truth_prob(original);
  bool out_of_budget = !budget_left();
  for (int pos : ranking) {
    if (out_of_budget) break;
    if (word_count > 0 &&
        static_cast<double>(result.substitutions.size() + 1) / word_count >
            config.max_percent_words) {
      break;  // edit cap reached; it can only grow
    }
    const Token& token = doc.tokens[static_cast<std::size_t>(pos)];
    Substitution trial;
    trial.token_position = pos;
    trial.original = token.surface;

    std::optional<Substitution> best;
    Prediction best_pred;
    double best_prob = current_prob;
    for (const auto& candidate : generate_candidates(token, store, config)) {
      trial.replacement = candidate.word;
      trial.kind = candidate.kind;
      std::vector<Substitution> hypothetical = result.substitutions;
      hypothetical.push_back(trial);
      if (!check_constraints(doc, hypothetical, config, store).ok) continue;
      // A replacement must stay one word, or positional alignment breaks.
      {
        TokenizedDocument probe_tok = tokenize(candidate.word, PreprocessConfig{});
        if (probe_tok.tokens.size() != 1 || probe_tok.tokens[0].surface != candidate.word) {
          continue;
        }
      }
      if (!budget_left()) {
        out_of_budget = true;
        break;
      }
      Prediction pred = probe(apply_substitutions(doc, hypothetical));
      double prob = truth_prob(pred);
      if (prob < best_prob) {
        best_prob = prob;
        best = trial;
        best_pred = pred;
      }
    }
    if (best.has_value()) {
      result.substitutions.push_back(*best);
      result.perturbed_text = apply_substitutions(doc, result.substitutions);
      result.final_pred = best_pred;
      current_prob = best_prob;
      if (best_pred.predicted_class != original.predicted_class) {
        result.status = AttackStatus::Success;
        break;
      }
    }
  }

  if (result.status != AttackStatus::Success) result.status = AttackStatus::Failed;
  result.queries = static_cast<std::uint64_t>(queries);
  if (result.words_in_sentence > 0) {
    result.percent_words_changed = static_cast<double>(result.substitutions.size()) /
                                   static_cast<double>(result.words_in_sentence);
  }
  return result;
}

AttackSummary summarize(const std::vector<AttackResult>& results) {
  if (results.empty()) throw std::runtime_error("summarize needs at least one result");
  AttackSummary s;
  s.n_examples = static_cast<int>(results.size());
  double pct_sum = 0.0;
  double query_sum = 0.0;
  double words_sum = 0.0;
  for (const auto& r : results) {
    switch (r.status) {
      case AttackStatus::Success:
        ++s.n_success;
        pct_sum += r.percent_words_changed;
        query_sum += static_cast<double>(r.queries);
        break;
      case AttackStatus::Failed: ++s.n_failed; break;
      case AttackStatus::Skipped: ++s.n_skipped; break;
    }
    words_sum += static_cast<double>(r.words_in_sentence);
  }
  s.original_accuracy =
      static_cast<double>(s.n_examples - s.n_skipped) / static_cast<double>(s.n_examples);
  s.accuracy_under_attack = static_cast<double>(s.n_failed) / static_cast<double>(s.n_examples);
  int decided = s.n_success + s.n_failed;
  if (decided > 0) {
    s.success_rate = static_cast<double>(s.n_success) / static_cast<double>(decided);
  }
  if (s.n_success > 0) {
    s.avg_percent_words_changed = pct_sum / static_cast<double>(s.n_success);
    s.avg_queries = query_sum / static_cast<double>(s.n_success);
  }
  s.avg_words_per_sentence = words_sum / static_cast<double>(s.n_examples);
  return s;
}

}  // namespace textshift
