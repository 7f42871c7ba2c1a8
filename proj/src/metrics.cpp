#include "proteus/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace proteus {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("auc: score/label length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos = 0.0;
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Midrank of the tie block, 1-based: (i+1 + j) / 2. Kept doubled to stay exact.
    const double midrank2 = static_cast<double>(i + 1 + j);
    for (std::size_t m = i; m < j; ++m) {
      if (labels[order[m]]) {
        pos += 1.0;
        rank_sum += midrank2;
      }
    }
    i = j;
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) throw Error("auc: labels contain a single class");
  const double u2 = rank_sum - pos * (pos + 1.0);
  return u2 / (2.0 * pos * neg);
}

std::optional<double> weighted_auc(std::span<const double> scores, std::span<const int> labels,
                                   std::span<const std::size_t> order, std::span<const int> weights) {
  double pos_total = 0.0;
  double neg_total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos_total : neg_total) += weights[i];
  if (pos_total == 0.0 || neg_total == 0.0) return std::nullopt;

  // Sweep ascending; each positive beats the negatives already passed and ties half of its block.
  double wins = 0.0;
  double neg_below = 0.0;
  const std::size_t n = order.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    double block_pos = 0.0;
    double block_neg = 0.0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      const std::size_t r = order[j];
      (labels[r] ? block_pos : block_neg) += weights[r];
      ++j;
    }
    wins += block_pos * (neg_below + 0.5 * block_neg);
    neg_below += block_neg;
    i = j;
  }
  return wins / (pos_total * neg_total);
}

FeaturePr feature_pr(std::span<const std::size_t> gold, std::span<const std::size_t> explanation) {
  if (gold.empty()) throw Error("feature_pr: gold feature set is empty");
  std::vector<std::size_t> s(gold.begin(), gold.end());
  std::vector<std::size_t> e(explanation.begin(), explanation.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  std::vector<std::size_t> common;
  std::set_intersection(s.begin(), s.end(), e.begin(), e.end(), std::back_inserter(common));

  FeaturePr out;
  out.recall = static_cast<double>(common.size()) / static_cast<double>(s.size());
  if (e.empty()) {
    out.precision_undefined = true;
  } else {
    out.precision = static_cast<double>(common.size()) / static_cast<double>(e.size());
  }
  return out;
}

ConflictSets conflicts(std::span<const int> detector_labels, std::span<const int> surrogate_labels) {
  if (detector_labels.size() != surrogate_labels.size()) throw Error("conflicts: label length mismatch");
  ConflictSets out;
  for (std::size_t i = 0; i < detector_labels.size(); ++i) {
    const bool d = detector_labels[i] != 0;
    const bool s = surrogate_labels[i] != 0;
    if (d && !s) out.anc.push_back(i);
    if (!d && s) out.nac.push_back(i);
  }
  return out;
}

DiscoveryRates discovery_rates(const ConflictSets& sets, std::span<const int> gold_labels) {
  auto check = [&](std::size_t i) {
    if (i >= gold_labels.size()) throw Error("discovery_rates: sample id outside the gold labels");
  };
  DiscoveryRates out;
  if (!sets.anc.empty()) {
    std::size_t normals = 0;
    for (std::size_t i : sets.anc) {
      check(i);
      normals += gold_labels[i] == 0;
    }
    out.tnd = static_cast<double>(normals) / static_cast<double>(sets.anc.size());
  }
  if (!sets.nac.empty()) {
    std::size_t anomalies = 0;
    for (std::size_t i : sets.nac) {
      check(i);
      anomalies += gold_labels[i] != 0;
    }
    out.tad = static_cast<double>(anomalies) / static_cast<double>(sets.nac.size());
  }
  return out;
}

std::string to_string(BiasVariant v) {
  switch (v) {
    case BiasVariant::BbcGroup: return "BBC+GROUP";
    case BiasVariant::CvGroup: return "CV+GROUP";
    case BiasVariant::BbcNoGroup: return "BBC+NOGROUP";
    case BiasVariant::CvNoGroup: return "CV+NOGROUP";
  }
  return "unknown";
}

std::vector<BiasSummary> bias_summary(std::span<const BiasRecord> records) {
  std::vector<BiasSummary> out;
  for (BiasVariant v : kBiasVariants) {
    BiasSummary s;
    s.variant = v;
    double sum = 0.0;
    for (const auto& r : records) {
      if (r.variant != v) continue;
      const double diff = r.train_estimate - r.test_auc;
      s.rss += diff * diff;
      sum += diff;
      ++s.count;
    }
    if (s.count == 0) throw Error("bias_summary: no record for variant " + to_string(v));
    s.mean_bias = sum / static_cast<double>(s.count);
    out.push_back(s);
  }
  return out;
}

}  // namespace proteus
