#include "textshift/drift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace textshift {

namespace {

// Average ranks (1 = largest value), ties share the mean rank.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

// Pearson correlation of the two rank vectors; identical vectors are perfect
// agreement even when all ranks tie.
std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2) return std::nullopt;
  std::vector<double> ra = average_ranks(a);
  std::vector<double> rb = average_ranks(b);
  if (ra == rb) return 1.0;
  const double n = static_cast<double>(ra.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) return std::nullopt;
  return cov / std::sqrt(va * vb);
}

}  // namespace

std::vector<AlignedToken> align(const TokenizedDocument& doc_before,
                                const std::vector<Substitution>& substitutions) {
  std::vector<AlignedToken> aligned;
  aligned.reserve(doc_before.tokens.size());
  for (std::size_t i = 0; i < doc_before.tokens.size(); ++i) {
    AlignedToken t;
    t.position = static_cast<int>(i);
    t.token_before = doc_before.tokens[i].surface;
    t.token_after = t.token_before;
    aligned.push_back(std::move(t));
  }
  for (const auto& s : substitutions) {
    if (s.token_position < 0 ||
        static_cast<std::size_t>(s.token_position) >= aligned.size()) {
      throw std::runtime_error("substitution position out of range: " +
                               std::to_string(s.token_position));
    }
    AlignedToken& t = aligned[static_cast<std::size_t>(s.token_position)];
    t.token_after = s.replacement;
    t.changed = true;
  }
  return aligned;
}

std::string render_transition(const Prediction& pred_before, const Prediction& pred_after,
                              const std::array<std::string, 2>& class_names) {
  auto side = [&](const Prediction& p) {
    double prob = p.predicted_class == 1 ? p.p1 : p.p0;
    long pct = std::lround(prob * 100.0);
    return "[[" + class_names[static_cast<std::size_t>(p.predicted_class)] + " (" +
           std::to_string(pct) + "%)]]";
  };
  return side(pred_before) + " to " + side(pred_after);
}

DriftReport compare(const Explanation& expl_before, const Explanation& expl_after,
                    const Prediction& pred_before, const Prediction& pred_after,
                    std::vector<AlignedToken> aligned,
                    const std::array<std::string, 2>& class_names) {
  DriftReport report;
  report.pred_before = pred_before;
  report.pred_after = pred_after;
  report.flipped = pred_before.predicted_class != pred_after.predicted_class;
  report.confidence_delta = {pred_after.p0 - pred_before.p0, pred_after.p1 - pred_before.p1};
  report.transition_text = render_transition(pred_before, pred_after, class_names);

  std::map<int, double> before_w;
  std::map<int, double> after_w;
  for (const auto& tw : expl_before.token_weights) before_w[tw.position] = tw.weight;
  for (const auto& tw : expl_after.token_weights) after_w[tw.position] = tw.weight;

  for (auto& t : aligned) {
    auto itb = before_w.find(t.position);
    if (itb != before_w.end()) t.weight_before = itb->second;
    auto ita = after_w.find(t.position);
    if (ita != after_w.end()) t.weight_after = ita->second;
    bool both = std::abs(t.weight_before) > 1e-9 && std::abs(t.weight_after) > 1e-9;
    if (both && ((t.weight_before > 0.0) != (t.weight_after > 0.0))) ++report.sign_flips;
  }

  std::set<int> set_b;
  std::set<int> set_a;
  for (const auto& [pos, w] : before_w) set_b.insert(pos);
  for (const auto& [pos, w] : after_w) set_a.insert(pos);
  std::vector<int> shared;
  std::set_intersection(set_b.begin(), set_b.end(), set_a.begin(), set_a.end(),
                        std::back_inserter(shared));
  std::size_t union_size = set_b.size() + set_a.size() - shared.size();
  report.topk_jaccard =
      union_size == 0 ? 1.0 : static_cast<double>(shared.size()) / static_cast<double>(union_size);

  std::vector<double> mag_before;
  std::vector<double> mag_after;
  for (int pos : shared) {
    mag_before.push_back(std::abs(before_w[pos]));
    mag_after.push_back(std::abs(after_w[pos]));
  }
  report.spearman_rho = spearman(mag_before, mag_after);

  report.aligned = std::move(aligned);
  return report;
}

}  // namespace textshift
