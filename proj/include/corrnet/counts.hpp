// Sufficient statistics for correlated two-layer models.
//
// For an ordered layer pair (a, b) and each node pair in the domain, the
// joint outcome falls in one of four cells: both layers carry the edge
// (e11), only a (e10), only b (e01), or neither (e00). Counts are taken
// over observed pairs only; hidden pairs are excluded from every cell.
//
// Counting runs in O(m_a + m_b + K^2 + H + N) where H is the number of
// hidden pairs: absent-absent cells are never enumerated, they follow by
// subtraction from per-bundle pair totals computed from block sizes.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "corrnet/network.hpp"

namespace corrnet {

struct PairCounts {
  std::int64_t e11 = 0;
  std::int64_t e10 = 0;
  std::int64_t e01 = 0;
  std::int64_t e00 = 0;

  std::int64_t total() const { return e11 + e10 + e01 + e00; }
  bool operator==(const PairCounts&) const = default;
};

// Per-bundle joint counts. For undirected unipartite domains bundles are
// unordered block pairs and only slots with r <= s are populated (accessors
// fold (r, s) onto (min, max)). Directed and bipartite domains keep ordered
// bundles; for bipartite, r is the left node's block and s the right's.
class BundleCounts {
 public:
  BundleCounts(std::int32_t k, bool canonical);

  std::int32_t k() const { return k_; }
  bool canonical() const { return canonical_; }
  // True when (r, s) addresses a populated slot (not a mirror).
  bool stored(std::int32_t r, std::int32_t s) const {
    return !canonical_ || r <= s;
  }

  const PairCounts& at(std::int32_t r, std::int32_t s) const {
    return cells_[slot(r, s)];
  }
  PairCounts& at(std::int32_t r, std::int32_t s) { return cells_[slot(r, s)]; }

  // Observed pair count of the bundle (block-size total minus hidden pairs).
  std::int64_t pairs(std::int32_t r, std::int32_t s) const {
    return pairs_[slot(r, s)];
  }
  std::int64_t& pairs(std::int32_t r, std::int32_t s) {
    return pairs_[slot(r, s)];
  }

  // Sum over stored bundles; reproduces the global counts.
  PairCounts aggregate() const;

 private:
  std::size_t slot(std::int32_t r, std::int32_t s) const;

  std::int32_t k_;
  bool canonical_;
  std::vector<PairCounts> cells_;
  std::vector<std::int64_t> pairs_;
};

// Degree-correction aggregates entering the approximate likelihood
// equations, with eps^l_ij = theta^l_i theta^l_j - 1:
//   g10 = sum over observed (1,0) pairs of (eps^b - eps^a)
//   g01 = sum over observed (0,1) pairs of (eps^a - eps^b)
//   f1  = sum over observed (0,0) pairs of eps^a
//   f2  = sum over observed (0,0) pairs of eps^b
struct DcBundle {
  double g10 = 0.0;
  double g01 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

class DegreeCorrectionSums {
 public:
  DegreeCorrectionSums(std::int32_t k, bool canonical);

  std::int32_t k() const { return k_; }
  bool canonical() const { return canonical_; }
  bool stored(std::int32_t r, std::int32_t s) const {
    return !canonical_ || r <= s;
  }
  const DcBundle& at(std::int32_t r, std::int32_t s) const {
    return cells_[slot(r, s)];
  }
  DcBundle& at(std::int32_t r, std::int32_t s) { return cells_[slot(r, s)]; }

 private:
  std::size_t slot(std::int32_t r, std::int32_t s) const;

  std::int32_t k_;
  bool canonical_;
  std::vector<DcBundle> cells_;
};

PairCounts global_cooccurrence(const MultilayerNetwork& net, int layer_a,
                               int layer_b, const PairMask& mask);

BundleCounts bundle_cooccurrence(const MultilayerNetwork& net,
                                 const BlockPartition& partition, int layer_a,
                                 int layer_b, const PairMask& mask);

DegreeCorrectionSums degree_correction_sums(const MultilayerNetwork& net,
                                            const BlockPartition& partition,
                                            int layer_a, int layer_b,
                                            const NormalizedDegrees& theta_a,
                                            const NormalizedDegrees& theta_b,
                                            const PairMask& mask);

// Observed per-bundle sums of theta_i * theta_j, from per-block totals with
// hidden pairs subtracted. Mirrored across the diagonal for canonical
// domains. Used by degree-corrected propensity fits.
Eigen::MatrixXd bundle_theta_pair_sums(const MultilayerNetwork& net,
                                       const BlockPartition& partition,
                                       const Eigen::VectorXd& theta,
                                       const PairMask& mask);

// Observed pair totals per bundle (same mirroring convention).
Eigen::MatrixXd bundle_pair_totals(const MultilayerNetwork& net,
                                   const BlockPartition& partition,
                                   const PairMask& mask);

}  // namespace corrnet
