// Cross-validated edge prediction: hide part of the second layer, fit on
// what remains, score the hidden pairs, and rank models by ROC/PR area.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrnet/estimators.hpp"
#include "corrnet/network.hpp"

namespace corrnet {

// Single-layer baselines score the held-out layer from its own fit alone;
// the correlated variants condition on the observed first layer.
enum class ModelKind { ER, SBM, DCSBM, CorrER, CorrSBM, CorrDCSBM };

std::string to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view name);

struct ScoreResult {
  double score = 0.0;
  bool fallback = false;  // bundle missing or conditional undefined
};

// Everything needed to score pairs after a training fit. The global
// correlated fit is always present: it backs the ER kinds and is the
// fallback for bundles that cannot be scored.
class ScoringModel {
 public:
  ScoringModel(ModelKind kind, BlockPartition partition)
      : kind_(kind), partition_(std::move(partition)) {}

  ModelKind kind() const { return kind_; }
  const BlockPartition& partition() const { return partition_; }

  // Probability that the pair (i, j) carries a second-layer edge, given
  // whether it carries a first-layer edge. Always in [0, 1].
  ScoreResult score_pair(std::int32_t i, std::int32_t j,
                         bool first_layer_edge) const;

  CorrERParams er;
  std::optional<CorrSBMParams> sbm;      // SBM and CorrSBM kinds
  std::optional<CorrDCSBMParams> dcsbm;  // CorrDCSBM kind
  Eigen::MatrixXd mono_p2;               // DCSBM kind: m2 / theta2 pair sum
  BoolGrid mono_fitted;
  Eigen::VectorXd theta2;                // DCSBM kind propensities

 private:
  ModelKind kind_;
  BlockPartition partition_;
};

// Fits `kind` on the observed pairs only. The first layer is fully
// observed; the mask hides second-layer entries, so propensities for the
// held-out layer come from masked degrees rescaled by each node's observed
// pair fraction.
ScoringModel fit_for_prediction(const MultilayerNetwork& net,
                                const BlockPartition& partition, int layer_a,
                                int layer_b, const PairMask& mask,
                                ModelKind kind);

// For every fitted bundle with positive correlation, the edge-conditional
// score must be at least the gap-conditional score. True for ML fits by
// construction; exposed as a checkable invariant.
bool positive_rho_ordering(const ScoringModel& model);

// Shuffles all pair indices and cuts them into kfolds blocks whose sizes
// differ by at most one. The folds partition [0, total_pairs) exactly;
// each fold is returned sorted. Throws TooFewPairs when total_pairs is
// less than kfolds.
std::vector<std::vector<std::int64_t>> kfold_split(std::int64_t total_pairs,
                                                   int kfolds,
                                                   std::uint64_t seed);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) to (1,1), tied scores grouped
  double auc = 0.0;              // trapezoidal; equals Mann-Whitney with
                                 // ties counted half
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // starts at recall 0 with the precision of
                                // the top score group
  double aupr = 0.0;
};

// Throws OneClassOnly unless both labels occur.
RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<std::uint8_t>& labels);
double roc_auc(const std::vector<double>& scores,
               const std::vector<std::uint8_t>& labels);
PrCurve pr_curve(const std::vector<double>& scores,
                 const std::vector<std::uint8_t>& labels);

// Expected AUC of the two-value conditional scorer when pairs truly follow
// (p1, p2, q): a closed-form reference for the correlated pair model.
// Exactly 1/2 at q = p1 p2.
double er_conditional_auc(const CorrERParams& params);

struct ModelCvResult {
  ModelKind kind = ModelKind::ER;
  RocCurve roc;                    // pooled over all completed folds
  PrCurve pr;
  std::vector<double> fold_auc;    // NaN where a fold was skipped or
                                   // single-class
  std::int64_t scored_pairs = 0;
  std::int64_t fallback_pairs = 0;
  int skipped_folds = 0;
};

struct PredictionReport {
  int kfolds = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> fold_sizes;
  std::vector<ModelCvResult> models;
  std::vector<std::string> warnings;
};

// K-fold protocol: every pair lands in exactly one test fold; its
// second-layer entry is hidden there and used only as the evaluation
// label. Folds whose training fit degenerates are skipped with a warning.
PredictionReport cross_validate(const MultilayerNetwork& net,
                                const BlockPartition& partition, int layer_a,
                                int layer_b,
                                const std::vector<ModelKind>& kinds,
                                int kfolds, std::uint64_t seed);

}  // namespace corrnet
