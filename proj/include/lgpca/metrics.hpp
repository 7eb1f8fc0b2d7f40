#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgpca {

// One probe's gallery ranking, ascending distance.
struct RankingResult {
  std::string probe_label;
  std::vector<std::string> ordered_gallery_labels;
};

// Verification scores: genuine = probe vs same identity, impostor = probe vs
// every other identity. Acceptance rule is distance < threshold.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;  // % impostor scores accepted
  double frr = 0.0;  // % genuine scores rejected
};

struct EvalReport {
  std::vector<double> cmc;             // cmc[k-1] = % correct within rank k
  double first1 = 0.0;                 // %
  std::map<int, double> rank_to_reach; // {95..100}% -> rank as % of gallery size
  double cum100 = 0.0;                 // %
  double cmca = 0.0;                   // [0, 1e4]
  double eer = 0.0;                    // %
  double roca = 0.0;                   // [0, 1e4]
  std::vector<RocPoint> roc;
};

// CMC curve and its scalar summaries. Every probe's identity must appear
// exactly once in its ranking.
inline EvalReport cmc_curve(const std::vector<RankingResult>& results) {
  if (results.empty()) throw std::invalid_argument("cmc_curve: no rankings");
  const size_t G = results[0].ordered_gallery_labels.size();
  std::vector<size_t> hits(G, 0);  // hits[k-1] = probes with correct rank == k
  for (const auto& r : results) {
    if (r.ordered_gallery_labels.size() != G)
      throw std::invalid_argument("cmc_curve: inconsistent gallery sizes");
    auto it = std::find(r.ordered_gallery_labels.begin(), r.ordered_gallery_labels.end(),
                        r.probe_label);
    if (it == r.ordered_gallery_labels.end())
      throw std::invalid_argument("cmc_curve: probe identity '" + r.probe_label +
                                  "' not enrolled");
    ++hits[static_cast<size_t>(it - r.ordered_gallery_labels.begin())];
  }
  EvalReport rep;
  rep.cmc.resize(G);
  size_t cum = 0;
  for (size_t k = 0; k < G; ++k) {
    cum += hits[k];
    rep.cmc[k] = 100.0 * static_cast<double>(cum) / results.size();
  }
  rep.first1 = rep.cmc[0];
  for (int p : {95, 96, 97, 98, 99, 100}) {
    size_t k = 0;
    while (k < G && rep.cmc[k] < p) ++k;
    // rank as % of gallery size; unreachable targets report 100% + sentinel
    rep.rank_to_reach[p] = (k < G) ? 100.0 * static_cast<double>(k + 1) / G : 100.0;
  }
  rep.cum100 = rep.rank_to_reach[100];
  double area = 0.0;
  for (size_t k = 0; k < G; ++k) area += (100.0 - rep.cmc[k]) * (100.0 / G);
  rep.cmca = area;
  return rep;
}

namespace detail {

inline double far_at(const ScoreSet& s, double tau) {
  size_t n = 0;
  for (double v : s.impostor)
    if (v < tau) ++n;
  return 100.0 * n / s.impostor.size();
}

inline double frr_at(const ScoreSet& s, double tau) {
  size_t n = 0;
  for (double v : s.genuine)
    if (v >= tau) ++n;
  return 100.0 * n / s.genuine.size();
}

}  // namespace detail

// ROC sweep over all distinct scores plus midpoints (plus sentinels outside
// the range), reduced to the best achievable FRR per FAR level. EER is the
// linear interpolation of the curve's crossing with FAR == FRR; ROCA is the
// trapezoidal area under FRR(FAR).
inline EvalReport roc_curve(const ScoreSet& s) {
  if (s.genuine.empty() || s.impostor.empty())
    throw std::invalid_argument("roc_curve: empty genuine or impostor set");

  std::vector<double> all;
  all.reserve(s.genuine.size() + s.impostor.size());
  all.insert(all.end(), s.genuine.begin(), s.genuine.end());
  all.insert(all.end(), s.impostor.begin(), s.impostor.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> taus;
  taus.push_back(all.front() - 1.0);
  for (size_t i = 0; i < all.size(); ++i) {
    taus.push_back(all[i]);
    if (i + 1 < all.size()) taus.push_back((all[i] + all[i + 1]) / 2.0);
  }
  taus.push_back(all.back() + 1.0);

  EvalReport rep;
  // best (lowest) FRR per FAR level, keeping the first threshold achieving it
  std::map<double, RocPoint> best;
  for (double t : taus) {
    RocPoint p{t, detail::far_at(s, t), detail::frr_at(s, t)};
    auto it = best.find(p.far);
    if (it == best.end() || p.frr < it->second.frr) best[p.far] = p;
  }
  for (const auto& [far, p] : best) rep.roc.push_back(p);

  // EER: crossing of FRR(FAR) with the diagonal
  double eer = 100.0;
  for (size_t i = 0; i + 1 < rep.roc.size(); ++i) {
    double f1 = rep.roc[i].far, r1 = rep.roc[i].frr;
    double f2 = rep.roc[i + 1].far, r2 = rep.roc[i + 1].frr;
    double d1 = r1 - f1, d2 = r2 - f2;
    if (d1 == 0.0) {
      eer = f1;
      break;
    }
    if (d1 > 0.0 && d2 <= 0.0) {
      double t = d1 / (d1 - d2);
      eer = f1 + t * (f2 - f1);
      break;
    }
  }
  if (rep.roc.back().frr == rep.roc.back().far && eer == 100.0) eer = rep.roc.back().far;
  rep.eer = eer;

  double area = 0.0;
  for (size_t i = 0; i + 1 < rep.roc.size(); ++i)
    area += (rep.roc[i + 1].far - rep.roc[i].far) * (rep.roc[i].frr + rep.roc[i + 1].frr) / 2.0;
  rep.roca = area;
  return rep;
}

}  // namespace lgpca
