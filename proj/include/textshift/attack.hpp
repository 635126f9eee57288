#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textshift/corpus.hpp"
#include "textshift/embeddings.hpp"
#include "textshift/model.hpp"

namespace textshift {

struct AttackConfig {
  double max_percent_words = 0.4;  // cap on fraction of words modified
  double min_embed_sim = 0.5;
  int candidates_per_word = 8;
  bool enable_char_level = true;
  int max_queries = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SubstitutionKind { Synonym, CharSwap, CharDelete, CharInsert, Homoglyph };

const char* to_string(SubstitutionKind kind);

struct Substitution {
  int token_position = 0;  // index into the original TokenizedDocument
  std::string original;
  std::string replacement;
  SubstitutionKind kind = SubstitutionKind::Synonym;
};

enum class AttackStatus { Success, Failed, Skipped };

const char* to_string(AttackStatus status);

struct AttackResult {
  int doc_id = -1;
  AttackStatus status = AttackStatus::Skipped;
  std::string original_text;
  std::string perturbed_text;
  Prediction original_pred;
  Prediction final_pred;
  std::vector<Substitution> substitutions;
  std::uint64_t queries = 0;  // model-counter delta for this attack
  double percent_words_changed = 0.0;
  int words_in_sentence = 0;  // punctuation-only tokens excluded
  int truth_label = 0;
};

struct AttackSummary {
  int n_examples = 0;
  int n_success = 0;
  int n_failed = 0;
  int n_skipped = 0;
  double original_accuracy = 0.0;
  double accuracy_under_attack = 0.0;
  std::optional<double> success_rate;              // null when no decided attacks
  std::optional<double> avg_percent_words_changed; // over successes
  std::optional<double> avg_queries;               // over successes
  double avg_words_per_sentence = 0.0;             // over all examples
};

// True for tokens the attack may touch: not a stop word, and a purely
// alphabetic word (letters plus internal apostrophes/hyphens; bytes >= 0x80
// count as letters). Digits and punctuation are never attacked.
bool attackable_token(const Token& token);

// Deletion-based importance: score_i = p_orig(target) - p_without_i(target),
// one probe per eligible token, sorted descending with ties by lower index.
// max_probes < 0 means unlimited; when the budget runs out the remaining
// positions are left unscored and dropped.
std::vector<int> rank_word_importance(const TextModel& model, const TokenizedDocument& doc,
                                      int target_class, long max_probes = -1);

struct CandidateWord {
  std::string word;
  SubstitutionKind kind = SubstitutionKind::Synonym;
  double similarity = 1.0;  // embedding cosine for synonyms, 1.0 otherwise
};

// Synonyms from the store (nearest_neighbors of the normalized form), then
// deterministic char-level typos seeded from (config.seed, token text):
// adjacent swap, delete, duplicate-insert (each needs length >= 2) and the
// first applicable homoglyph o->0 l->1 a->@ e->3 i->1 s->5. The original and
// duplicates are removed; the original's first-letter casing is preserved.
std::vector<CandidateWord> generate_candidates(const Token& token, const EmbeddingStore& store,
                                               const AttackConfig& config);

struct ConstraintCheck {
  bool ok = true;
  std::string reason;
};

// Enforces the edit budget (|subs| / word count <= max_percent_words), the
// stop-word/punctuation exclusion, the synonym similarity floor, and the
// one-substitution-per-position rule.
ConstraintCheck check_constraints(const TokenizedDocument& doc,
                                  const std::vector<Substitution>& substitutions,
                                  const AttackConfig& config, const EmbeddingStore& store);

// Greedy score-based search: probe the original (skip if already wrong),
// rank words by deletion importance, then per position commit the candidate
// with the largest strict decrease in the truth-class probability until the
// prediction flips or a budget/cap/exhaustion stop. Every predict() counts
// toward max_queries; no probe starts once the budget is spent.
AttackResult greedy_attack(const TextModel& model, const TokenizedDocument& doc,
                           int truth_label, const AttackConfig& config,
                           const EmbeddingStore& store);

// Corpus-level metrics; throws on empty input.
AttackSummary summarize(const std::vector<AttackResult>& results);

// Number of non-punctuation tokens.
int count_word_tokens(const TokenizedDocument& doc);

// The document text with token surfaces replaced at substituted positions,
// inter-token gaps preserved.
std::string apply_substitutions(const TokenizedDocument& doc,
                                const std::vector<Substitution>& substitutions);

// Probe text with token `drop_position` deleted: remaining surfaces joined
// by single spaces (the same convention explanation masking uses).
std::string text_without_token(const TokenizedDocument& doc, int drop_position);

}  // namespace textshift
