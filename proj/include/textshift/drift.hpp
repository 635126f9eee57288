#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "textshift/attack.hpp"
#include "textshift/explain.hpp"
#include "textshift/model.hpp"

namespace textshift {

struct AlignedToken {
  int position = 0;
  std::string token_before;
  std::string token_after;
  bool changed = false;
  double weight_before = 0.0;  // 0 outside the explanation's top-K
  double weight_after = 0.0;
};

struct DriftReport {
  Prediction pred_before;
  Prediction pred_after;
  bool flipped = false;
  std::array<double, 2> confidence_delta{0.0, 0.0};  // after - before per class
  double topk_jaccard = 1.0;
  std::optional<double> spearman_rho;  // null when < 2 shared ranked positions
  int sign_flips = 0;
  std::vector<AlignedToken> aligned;
  std::string transition_text;
};

// Positional 1:1 alignment over the original token sequence; changed flags
// come from the substitution record, never from string diffing. Throws on an
// out-of-range substitution position.
std::vector<AlignedToken> align(const TokenizedDocument& doc_before,
                                const std::vector<Substitution>& substitutions);

// Both explanations must target the same class (the pipeline stores both
// against class 1). Jaccard is over top-K position sets; Spearman is over
// |weight| ranks of positions in both top-K sets (average ranks on ties);
// sign flips count aligned tokens with strictly opposite signs and both
// |weight| > 1e-9.
DriftReport compare(const Explanation& expl_before, const Explanation& expl_after,
                    const Prediction& pred_before, const Prediction& pred_after,
                    std::vector<AlignedToken> aligned,
                    const std::array<std::string, 2>& class_names = {"Negative", "Positive"});

// `[[<Name> (<p%>)]] to [[<Name> (<p%>)]]` with each side's argmax class and
// its probability rounded to the nearest integer percent.
std::string render_transition(const Prediction& pred_before, const Prediction& pred_after,
                              const std::array<std::string, 2>& class_names);

}  // namespace textshift
