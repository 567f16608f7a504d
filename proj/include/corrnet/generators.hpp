// Samplers for correlated two-layer models and the synthetic benchmark.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "corrnet/edge_domain.hpp"
#include "corrnet/estimators.hpp"
#include "corrnet/network.hpp"

namespace corrnet {

// Draws both layers in one pass, one uniform per pair: the four joint
// outcomes have probabilities q, p1-q, p2-q, 1-p1-p2+q. Throws
// InfeasibleParams outside the feasible region.
MultilayerNetwork sample_corr_er(std::int32_t n, const EdgeDomain& domain,
                                 const CorrERParams& params,
                                 std::uint64_t seed);

// Equivalent distribution sampled sequentially: layer 1 from its marginal,
// layer 2 from the conditionals q/p1 and (p2-q)/(1-p1). Uses a separate
// substream per layer.
MultilayerNetwork sample_corr_er_sequential(std::int32_t n,
                                            const EdgeDomain& domain,
                                            const CorrERParams& params,
                                            std::uint64_t seed);

// Per-bundle generalization. Every pair's bundle must be fitted and
// feasible.
MultilayerNetwork sample_corr_sbm(std::int32_t n, const EdgeDomain& domain,
                                  const BlockPartition& partition,
                                  const CorrSBMParams& params,
                                  std::uint64_t seed);

enum class InfeasiblePairPolicy {
  Error,          // throw PairProbabilityOverflow on any infeasible pair
  ClampAndCount,  // project the pair's cell probabilities and count it
};

struct DcSampleResult {
  MultilayerNetwork net;
  std::int64_t clamped_pairs = 0;
};

// Degree-corrected sampler: pair-level probabilities are
// p1 theta1_i theta1_j, p2 theta2_i theta2_j and q sqrt of the product of
// both theta products. Large propensities can push a pair outside the
// feasible region; `policy` decides whether that is an error.
DcSampleResult sample_corr_dcsbm(std::int32_t n, const EdgeDomain& domain,
                                 const BlockPartition& partition,
                                 const CorrDCSBMParams& params,
                                 std::uint64_t seed,
                                 InfeasiblePairPolicy policy);

// Joint probability with the requested Pearson correlation:
// q = rho * sqrt(p1 (1-p1) p2 (1-p2)) + p1 p2. Throws DegenerateMarginal
// for marginals outside (0, 1) and InfeasibleRho for |rho| > 1. The result
// may still violate the feasibility box; callers clamp or reject.
double q_from_rho(double p1, double p2, double rho);

enum class BenchmarkVariant { CorrER, CorrSBM, CorrDCSBM };

std::string to_string(BenchmarkVariant v);
std::optional<BenchmarkVariant> benchmark_variant_from_string(
    std::string_view name);

struct BenchmarkConfig {
  std::int32_t N = 400;     // nodes
  std::int32_t n_c = 4;     // planted communities
  double mu = 0.3;          // mixing: fraction of degree leaving the block
  double rho = 0.5;         // target interlayer correlation
  double eta_k = -2.5;      // degree exponent
  double k_min = 4.0;       // degree lower cutoff
  double k_max = 20.0;      // degree upper cutoff
  double dirichlet_concentration = 5.0;  // community size spread
  BenchmarkVariant variant = BenchmarkVariant::CorrSBM;
  std::uint64_t seed = 1;
};

struct GeneratedInstance {
  MultilayerNetwork net;  // layer "1" planted, layer "2" correlated
  BlockPartition partition;
  Eigen::VectorXd degrees;  // planted degree sequence
  // Bundle tables actually used to draw layer 2: 1 x 1 for the CorrER
  // variant, n_c x n_c otherwise.
  Eigen::MatrixXd p1, p2, q;
  std::int64_t clamped_pairs = 0;  // layer-2 conditionals projected
  std::uint64_t seed = 0;
};

// Planted-partition benchmark: Dirichlet community sizes, truncated
// power-law degrees, a degree-corrected planted layer, then a second layer
// drawn conditionally so the pair achieves the target correlation under
// the chosen model family. Negative rho is rejected for the
// degree-corrected variant (its second layer would need the complement
// graph, which has no degree-corrected form).
GeneratedInstance make_benchmark(const BenchmarkConfig& cfg);

}  // namespace corrnet
