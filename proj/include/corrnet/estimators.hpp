// Maximum-likelihood fits for correlated two-layer Bernoulli models.
//
// Every model assigns each node pair a joint distribution over the four
// edge outcomes: P(1,1) = q, P(1,0) = p1 - q, P(0,1) = p2 - q and
// P(0,0) = 1 - p1 - p2 + q, with feasibility 0 <= q <= min(p1, p2) and
// p1 + p2 <= 1 + q. Block models replicate this per edge bundle (r, s);
// degree-corrected variants scale the marginals by theta_i theta_j and the
// joint cell by sqrt of the four theta factors.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>

#include "corrnet/counts.hpp"
#include "corrnet/network.hpp"

namespace corrnet {

struct CorrERParams {
  double p1 = 0.0;
  double p2 = 0.0;
  double q = 0.0;
  // Empty when either layer is empty or complete (zero marginal variance).
  std::optional<double> rho;
};

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Per-bundle fit status for degree-corrected estimates.
enum class BundleFitStatus {
  Converged,           // Newton refinement reached tolerance
  Boundary,            // a count cell is zero: closed-form estimate is exact
  FallbackZerothOrder  // refinement failed; zeroth-order estimates returned
};

struct CorrSBMParams {
  std::int32_t k = 0;
  bool canonical = false;  // undirected unipartite: symmetric matrices
  Eigen::MatrixXd p1, p2, q;
  Eigen::MatrixXd rho;       // meaningful only where rho_defined
  BoolGrid rho_defined;
  BoolGrid fitted;           // bundle had at least one observed pair

  CorrERParams bundle(std::int32_t r, std::int32_t s) const;
};

struct CorrDCSBMParams {
  CorrSBMParams base;  // propensity matrices and bundle-level correlations
  Eigen::VectorXd theta1, theta2;
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic> status;  // BundleFitStatus

  BundleFitStatus bundle_status(std::int32_t r, std::int32_t s) const {
    return static_cast<BundleFitStatus>(
        base.canonical && r > s ? status(s, r) : status(r, s));
  }
  bool all_converged_or_boundary() const {
    for (std::int32_t r = 0; r < base.k; ++r)
      for (std::int32_t s = 0; s < base.k; ++s)
        if (base.fitted(r, s) &&
            bundle_status(r, s) == BundleFitStatus::FallbackZerothOrder)
          return false;
    return true;
  }
};

// Closed-form ML estimates from joint counts: p1 = (e11+e10)/T,
// p2 = (e11+e01)/T, q = e11/T. Throws EmptyInput when T = 0.
CorrERParams fit_corr_er(const PairCounts& counts);

// ML correlation from counts; empty when a layer is empty or complete.
// Identical to fit_corr_er(counts).rho, and invariant under any partition
// of the pairs into bundles (it only sees the global counts).
std::optional<double> effective_correlation(const PairCounts& counts);

// Pearson correlation of the two Bernoulli margins implied by (p1, p2, q).
// Throws DegenerateMarginal when p1 or p2 is 0 or 1.
double pearson_from_params(double p1, double p2, double q);

// True when (p1, p2, q) lies in the closed feasibility region.
bool feasible_corr_er(double p1, double p2, double q);

// Per-bundle closed-form fits. Bundles without observed pairs are left
// unfitted. Throws EmptyInput when no bundle has pairs.
CorrSBMParams fit_corr_sbm(const BundleCounts& counts);

// Approximate degree-corrected fit: per bundle, damped Newton on the
// first-order stationarity system, initialized at the zeroth-order (SBM)
// estimates. Residuals are measured per observed pair; convergence demands
// an infinity norm <= 1e-10 within cap iterations. Bundles where Newton
// fails keep the zeroth-order estimates and are flagged.
CorrDCSBMParams fit_corr_dcsbm_approx(const BundleCounts& counts,
                                      const DegreeCorrectionSums& sums,
                                      const NormalizedDegrees& theta_a,
                                      const NormalizedDegrees& theta_b);

// Exact degree-corrected fit: per bundle, Newton ascent of the full
// log-likelihood over observed pairs (concave in (p1, p2, q)), initialized
// at the approximate solution projected into the pair-level feasible set.
// Cost is one pass over all observed pairs per iteration.
CorrDCSBMParams fit_corr_dcsbm_full(const MultilayerNetwork& net,
                                    const BlockPartition& partition,
                                    int layer_a, int layer_b,
                                    const NormalizedDegrees& theta_a,
                                    const NormalizedDegrees& theta_b,
                                    const PairMask& mask);

enum class PairCorrelationMode { Exact, FirstOrder, IndependentCase };

// Pair-level correlation varrho_ij implied by a degree-corrected fit.
// FirstOrder evaluates the expansion around theta products of 1 and falls
// back to Exact when any of its denominators (q - p1 p2, 1 - p1, 1 - p2)
// is of the same order as the expansion parameter. IndependentCase requires
// q = p1 p2 per bundle.
double pair_correlation(const CorrDCSBMParams& params,
                        const BlockPartition& partition, std::int32_t i,
                        std::int32_t j, PairCorrelationMode mode);

struct FisherReport {
  std::array<double, 3> estimate;                  // p1, p2, q
  std::array<double, 3> variance;                  // diagonal of inverse info
  std::array<std::array<double, 2>, 3> ci95;       // estimate +- 1.96 sigma
  Eigen::Matrix3d covariance;
};

// Observed-information variance estimates for the CorrER fit: the Fisher
// information of the four-cell likelihood at `params`, scaled by num_pairs,
// inverted. CI width is 2 * 1.96 * sqrt(variance), so it shrinks like
// 1/sqrt(num_pairs) ~ 1/N for two-layer networks on N nodes.
FisherReport er_fisher_variance(const CorrERParams& params,
                                std::int64_t num_pairs);

}  // namespace corrnet
