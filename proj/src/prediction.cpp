#include "corrnet/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "corrnet/counts.hpp"
#include "corrnet/rng.hpp"

namespace corrnet {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ER:
      return "er";
    case ModelKind::SBM:
      return "sbm";
    case ModelKind::DCSBM:
      return "dcsbm";
    case ModelKind::CorrER:
      return "corr-er";
    case ModelKind::CorrSBM:
      return "corr-sbm";
    case ModelKind::CorrDCSBM:
      return "corr-dcsbm";
  }
  return "unknown";
}

std::optional<ModelKind> model_kind_from_string(std::string_view name) {
  if (name == "er") return ModelKind::ER;
  if (name == "sbm") return ModelKind::SBM;
  if (name == "dcsbm") return ModelKind::DCSBM;
  if (name == "corr-er") return ModelKind::CorrER;
  if (name == "corr-sbm") return ModelKind::CorrSBM;
  if (name == "corr-dcsbm") return ModelKind::CorrDCSBM;
  return std::nullopt;
}

namespace {

constexpr std::uint64_t kStreamKfold = 20;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Conditional second-layer probability under a correlated pair model.
double er_conditional(const CorrERParams& er, bool a) {
  if (a) return er.p1 > 0.0 ? er.q / er.p1 : er.p2;
  return er.p1 < 1.0 ? (er.p2 - er.q) / (1.0 - er.p1) : er.p2;
}

}  // namespace

ScoreResult ScoringModel::score_pair(std::int32_t i, std::int32_t j,
                                     bool first_layer_edge) const {
  const auto r = partition_.block(i);
  const auto s = partition_.block(j);
  switch (kind_) {
    case ModelKind::ER:
      return {clamp01(er.p2), false};
    case ModelKind::SBM: {
      if (sbm && sbm->fitted(r, s)) return {clamp01(sbm->p2(r, s)), false};
      return {clamp01(er.p2), true};
    }
    case ModelKind::DCSBM: {
      if (mono_fitted.size() > 0 && mono_fitted(r, s)) {
        const double y = theta2[i] * theta2[j];
        return {clamp01(y * mono_p2(r, s)), false};
      }
      return {clamp01(er.p2), true};
    }
    case ModelKind::CorrER: {
      const bool degenerate = first_layer_edge ? !(er.p1 > 0.0)
                                               : !(er.p1 < 1.0);
      return {clamp01(er_conditional(er, first_layer_edge)), degenerate};
    }
    case ModelKind::CorrSBM: {
      if (sbm && sbm->fitted(r, s)) {
        const double p1 = sbm->p1(r, s);
        if (first_layer_edge ? p1 > 0.0 : p1 < 1.0) {
          const double c = first_layer_edge
                               ? sbm->q(r, s) / p1
                               : (sbm->p2(r, s) - sbm->q(r, s)) / (1.0 - p1);
          return {clamp01(c), false};
        }
      }
      return {clamp01(er_conditional(er, first_layer_edge)), true};
    }
    case ModelKind::CorrDCSBM: {
      if (dcsbm && dcsbm->base.fitted(r, s)) {
        const double x = dcsbm->theta1[i] * dcsbm->theta1[j];
        const double y = dcsbm->theta2[i] * dcsbm->theta2[j];
        double p1 = clamp01(x * dcsbm->base.p1(r, s));
        double p2 = clamp01(y * dcsbm->base.p2(r, s));
        double q = std::clamp(std::sqrt(x * y) * dcsbm->base.q(r, s),
                              std::max(0.0, p1 + p2 - 1.0), std::min(p1, p2));
        if (first_layer_edge ? p1 > 0.0 : p1 < 1.0) {
          const double c = first_layer_edge ? q / p1 : (p2 - q) / (1.0 - p1);
          return {clamp01(c), false};
        }
      }
      return {clamp01(er_conditional(er, first_layer_edge)), true};
    }
  }
  fail(Err::InfeasibleParams, "unknown model kind");
}

ScoringModel fit_for_prediction(const MultilayerNetwork& net,
                                const BlockPartition& partition, int layer_a,
                                int layer_b, const PairMask& mask,
                                ModelKind kind) {
  if (partition.size() != net.num_nodes())
    fail(Err::PartitionMismatch, "partition length does not match node count");
  ScoringModel model(kind, partition);
  model.er = fit_corr_er(global_cooccurrence(net, layer_a, layer_b, mask));
  switch (kind) {
    case ModelKind::ER:
    case ModelKind::CorrER:
      break;
    case ModelKind::SBM:
    case ModelKind::CorrSBM:
      model.sbm =
          fit_corr_sbm(bundle_cooccurrence(net, partition, layer_a, layer_b,
                                           mask));
      break;
    case ModelKind::DCSBM: {
      // Pure single-layer degree-corrected estimate of the held-out layer.
      model.theta2 = masked_normalized_degrees(net, layer_b, mask).theta;
      const Eigen::MatrixXd tp =
          bundle_theta_pair_sums(net, partition, model.theta2, mask);
      const BundleCounts counts =
          bundle_cooccurrence(net, partition, layer_a, layer_b, mask);
      const auto k = partition.k();
      model.mono_p2 = Eigen::MatrixXd::Zero(k, k);
      model.mono_fitted = BoolGrid::Constant(k, k, false);
      for (std::int32_t r = 0; r < k; ++r)
        for (std::int32_t s = 0; s < k; ++s) {
          const auto& cell = counts.at(r, s);
          const double m2 =
              static_cast<double>(cell.e11) + static_cast<double>(cell.e01);
          if (tp(r, s) > 0.0) {
            model.mono_p2(r, s) = m2 / tp(r, s);
            model.mono_fitted(r, s) = true;
          }
        }
      break;
    }
    case ModelKind::CorrDCSBM: {
      const NormalizedDegrees ta = normalized_degrees(net, layer_a);
      const NormalizedDegrees tb =
          masked_normalized_degrees(net, layer_b, mask);
      const BundleCounts counts =
          bundle_cooccurrence(net, partition, layer_a, layer_b, mask);
      const DegreeCorrectionSums sums = degree_correction_sums(
          net, partition, layer_a, layer_b, ta, tb, mask);
      model.dcsbm = fit_corr_dcsbm_approx(counts, sums, ta, tb);
      break;
    }
  }
  return model;
}

bool positive_rho_ordering(const ScoringModel& model) {
  const auto check = [](double p1, double p2, double q) {
    if (!(p1 > 0.0 && p1 < 1.0)) return true;  // one conditional undefined
    return q / p1 >= (p2 - q) / (1.0 - p1) - 1e-12;
  };
  switch (model.kind()) {
    case ModelKind::CorrER: {
      if (!model.er.rho || *model.er.rho <= 0.0) return true;
      return check(model.er.p1, model.er.p2, model.er.q);
    }
    case ModelKind::CorrSBM:
    case ModelKind::CorrDCSBM: {
      const CorrSBMParams* table =
          model.sbm ? &*model.sbm : model.dcsbm ? &model.dcsbm->base : nullptr;
      if (!table) return true;
      for (std::int32_t r = 0; r < table->k; ++r)
        for (std::int32_t s = 0; s < table->k; ++s)
          if (table->fitted(r, s) && table->rho_defined(r, s) &&
              table->rho(r, s) > 0.0 &&
              !check(table->p1(r, s), table->p2(r, s), table->q(r, s)))
            return false;
      return true;
    }
    default:
      return true;  // single-layer scores do not condition on the first layer
  }
}

std::vector<std::vector<std::int64_t>> kfold_split(std::int64_t total_pairs,
                                                   int kfolds,
                                                   std::uint64_t seed) {
  if (kfolds < 2) fail(Err::TooFewPairs, "cross-validation needs k >= 2");
  if (total_pairs < kfolds)
    fail(Err::TooFewPairs, "fewer pairs than folds (" +
                               std::to_string(total_pairs) + " < " +
                               std::to_string(kfolds) + ")");
  std::vector<std::int64_t> order(static_cast<std::size_t>(total_pairs));
  std::iota(order.begin(), order.end(), std::int64_t{0});
  SequentialRng rng(seed, kStreamKfold);
  deterministic_shuffle(order, rng);
  std::vector<std::vector<std::int64_t>> folds(
      static_cast<std::size_t>(kfolds));
  for (int f = 0; f < kfolds; ++f) {
    const auto begin = static_cast<std::size_t>(
        total_pairs * static_cast<std::int64_t>(f) / kfolds);
    const auto end = static_cast<std::size_t>(
        total_pairs * static_cast<std::int64_t>(f + 1) / kfolds);
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                order.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(fold.begin(), fold.end());
  }
  return folds;
}

namespace {

struct RankedOutcomes {
  std::int64_t pos = 0;
  std::int64_t neg = 0;
  // Per distinct score, descending: positives and negatives in the group.
  std::vector<std::pair<std::int64_t, std::int64_t>> groups;
};

RankedOutcomes rank_outcomes(const std::vector<double>& scores,
                             const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size())
    fail(Err::DimensionMismatch, "scores and labels differ in length");
  if (scores.empty()) fail(Err::EmptyInput, "no scored pairs");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  RankedOutcomes out;
  for (std::size_t t = 0; t < idx.size();) {
    std::size_t u = t;
    std::int64_t p = 0, n = 0;
    while (u < idx.size() && scores[idx[u]] == scores[idx[t]]) {
      if (labels[idx[u]]) ++p; else ++n;
      ++u;
    }
    out.groups.emplace_back(p, n);
    out.pos += p;
    out.neg += n;
    t = u;
  }
  if (out.pos == 0 || out.neg == 0)
    fail(Err::OneClassOnly, "ROC analysis needs both outcome classes");
  return out;
}

}  // namespace

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<std::uint8_t>& labels) {
  const RankedOutcomes r = rank_outcomes(scores, labels);
  RocCurve out;
  out.points.reserve(r.groups.size() + 1);
  out.points.push_back({0.0, 0.0});
  double tp = 0.0, fp = 0.0, auc = 0.0;
  const double P = static_cast<double>(r.pos);
  const double N = static_cast<double>(r.neg);
  for (const auto& [p, n] : r.groups) {
    const double tp2 = tp + static_cast<double>(p);
    const double fp2 = fp + static_cast<double>(n);
    auc += (fp2 - fp) / N * (tp + tp2) / (2.0 * P);
    tp = tp2;
    fp = fp2;
    out.points.push_back({fp / N, tp / P});
  }
  out.auc = auc;
  return out;
}

double roc_auc(const std::vector<double>& scores,
               const std::vector<std::uint8_t>& labels) {
  return roc_curve(scores, labels).auc;
}

PrCurve pr_curve(const std::vector<double>& scores,
                 const std::vector<std::uint8_t>& labels) {
  const RankedOutcomes r = rank_outcomes(scores, labels);
  PrCurve out;
  out.points.reserve(r.groups.size() + 1);
  const double P = static_cast<double>(r.pos);
  double tp = 0.0, fp = 0.0;
  bool first = true;
  double prev_recall = 0.0, prev_precision = 1.0, aupr = 0.0;
  for (const auto& [p, n] : r.groups) {
    tp += static_cast<double>(p);
    fp += static_cast<double>(n);
    const double recall = tp / P;
    const double precision = tp / (tp + fp);
    if (first) {
      out.points.push_back({0.0, precision});
      prev_precision = precision;
      first = false;
    }
    aupr += (recall - prev_recall) * (precision + prev_precision) / 2.0;
    out.points.push_back({recall, precision});
    prev_recall = recall;
    prev_precision = precision;
  }
  out.aupr = aupr;
  return out;
}

double er_conditional_auc(const CorrERParams& params) {
  const double p1 = params.p1, p2 = params.p2, q = params.q;
  if (!feasible_corr_er(p1, p2, q))
    fail(Err::InfeasibleParams, "parameters outside the feasible region");
  if (!(p2 > 0.0 && p2 < 1.0))
    fail(Err::OneClassOnly, "second layer is almost surely one class");
  const double s1 = er_conditional(params, true);
  const double s0 = er_conditional(params, false);
  const double pa1 = q / p2;                  // P(a = 1 | b = 1)
  const double pa0 = (p1 - q) / (1.0 - p2);   // P(a = 1 | b = 0)
  if (s1 == s0) return 0.5;
  const double win = s1 > s0 ? pa1 * (1.0 - pa0) : (1.0 - pa1) * pa0;
  const double tie = pa1 * pa0 + (1.0 - pa1) * (1.0 - pa0);
  return win + 0.5 * tie;
}

PredictionReport cross_validate(const MultilayerNetwork& net,
                                const BlockPartition& partition, int layer_a,
                                int layer_b,
                                const std::vector<ModelKind>& kinds,
                                int kfolds, std::uint64_t seed) {
  if (kinds.empty()) fail(Err::EmptyInput, "no models requested");
  if (partition.size() != net.num_nodes())
    fail(Err::PartitionMismatch, "partition length does not match node count");
  net.layer(layer_a);  // validate both layer indices up front
  net.layer(layer_b);
  const std::int64_t total = net.pair_count();
  const auto folds = kfold_split(total, kfolds, seed);

  PredictionReport report;
  report.kfolds = kfolds;
  report.seed = seed;
  for (const auto& fold : folds)
    report.fold_sizes.push_back(static_cast<std::int64_t>(fold.size()));

  const auto n = net.num_nodes();
  const auto& domain = net.domain();

  struct Accum {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    ModelCvResult res;
  };
  std::vector<Accum> acc(kinds.size());
  for (std::size_t m = 0; m < kinds.size(); ++m) acc[m].res.kind = kinds[m];

  std::vector<std::int64_t> keys;
  std::vector<std::int32_t> pi, pj;
  std::vector<std::uint8_t> a_edge, b_edge;
  for (int f = 0; f < kfolds; ++f) {
    const auto& fold = folds[static_cast<std::size_t>(f)];
    keys.clear();
    pi.clear();
    pj.clear();
    a_edge.clear();
    b_edge.clear();
    for (const std::int64_t t : fold) {
      const auto [i, j] = domain.pair_at(n, t);
      const std::int64_t key = domain.key_of(n, i, j);
      keys.push_back(key);
      pi.push_back(i);
      pj.push_back(j);
      a_edge.push_back(net.layer(layer_a).has(key) ? 1 : 0);
      b_edge.push_back(net.layer(layer_b).has(key) ? 1 : 0);
    }
    const PairMask mask(keys);
    for (std::size_t m = 0; m < kinds.size(); ++m) {
      auto& a = acc[m];
      std::vector<double> fold_scores;
      fold_scores.reserve(keys.size());
      std::int64_t fold_fallback = 0;
      try {
        const ScoringModel model = fit_for_prediction(
            net, partition, layer_a, layer_b, mask, kinds[m]);
        for (std::size_t t = 0; t < keys.size(); ++t) {
          const ScoreResult sr =
              model.score_pair(pi[t], pj[t], a_edge[t] != 0);
          fold_scores.push_back(sr.score);
          if (sr.fallback) ++fold_fallback;
        }
      } catch (const ModelError& e) {
        a.res.skipped_folds += 1;
        a.res.fold_auc.push_back(std::numeric_limits<double>::quiet_NaN());
        report.warnings.push_back("fold " + std::to_string(f + 1) + ": " +
                                  to_string(kinds[m]) +
                                  " fit skipped (" + e.what() + ")");
        continue;
      }
      a.res.scored_pairs += static_cast<std::int64_t>(fold_scores.size());
      a.res.fallback_pairs += fold_fallback;
      try {
        a.res.fold_auc.push_back(roc_auc(fold_scores, b_edge));
      } catch (const ModelError&) {
        a.res.fold_auc.push_back(std::numeric_limits<double>::quiet_NaN());
        report.warnings.push_back("fold " + std::to_string(f + 1) + ": " +
                                  to_string(kinds[m]) +
                                  " AUC undefined (single class)");
      }
      a.scores.insert(a.scores.end(), fold_scores.begin(), fold_scores.end());
      a.labels.insert(a.labels.end(), b_edge.begin(), b_edge.end());
    }
  }

  for (auto& a : acc) {
    if (a.scores.empty())
      fail(Err::NonConvergence,
           "every fold failed for model " + to_string(a.res.kind));
    a.res.roc = roc_curve(a.scores, a.labels);
    a.res.pr = pr_curve(a.scores, a.labels);
    report.models.push_back(std::move(a.res));
  }
  return report;
}

}  // namespace corrnet
