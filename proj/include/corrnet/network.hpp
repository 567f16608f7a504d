// Multilayer networks over a shared node set, block partitions, normalized
// degrees, and pair masks for holdout protocols.
//
// Layers store canonical, deduplicated, sorted edge lists plus a hash set
// for O(1) membership tests. All types are immutable after construction and
// safe to share across threads.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "corrnet/edge_domain.hpp"
#include "corrnet/error.hpp"

namespace corrnet {

using Edge = std::pair<std::int32_t, std::int32_t>;
using EdgeList = std::vector<Edge>;

class Layer {
 public:
  Layer() = default;
  Layer(EdgeList edges, std::unordered_set<std::int64_t> keys)
      : edges_(std::move(edges)), keys_(std::move(keys)) {}

  // Canonical edges in ascending key order.
  const EdgeList& edges() const { return edges_; }
  std::int64_t edge_count() const {
    return static_cast<std::int64_t>(edges_.size());
  }
  bool has(std::int64_t key) const { return keys_.count(key) != 0; }

 private:
  EdgeList edges_;
  std::unordered_set<std::int64_t> keys_;
};

class MultilayerNetwork {
 public:
  // Validates every pair against the domain, canonicalizes, deduplicates,
  // and sorts. Layer names default to "1", "2", ...
  MultilayerNetwork(std::int32_t n, EdgeDomain domain,
                    std::vector<EdgeList> layers,
                    std::vector<std::string> layer_names = {});

  std::int32_t num_nodes() const { return n_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  const EdgeDomain& domain() const { return domain_; }
  std::int64_t pair_count() const { return pair_count_; }

  const Layer& layer(int l) const {
    check_layer(l);
    return layers_[static_cast<std::size_t>(l)];
  }
  const std::string& layer_name(int l) const {
    check_layer(l);
    return layer_names_[static_cast<std::size_t>(l)];
  }
  // Index of the layer with this name, or -1.
  int layer_index(const std::string& name) const;

  std::int64_t key(std::int32_t i, std::int32_t j) const {
    const auto [a, b] = domain_.canonical(i, j);
    return domain_.key_of(n_, a, b);
  }

 private:
  void check_layer(int l) const {
    if (l < 0 || l >= num_layers())
      fail(Err::LayerIndexOutOfRange,
           "layer " + std::to_string(l) + " of " +
               std::to_string(num_layers()));
  }

  std::int32_t n_;
  EdgeDomain domain_;
  std::int64_t pair_count_;
  std::vector<Layer> layers_;
  std::vector<std::string> layer_names_;
};

MultilayerNetwork build_network(std::int32_t n, const EdgeDomain& domain,
                                std::vector<EdgeList> layers,
                                std::vector<std::string> layer_names = {});

class BlockPartition {
 public:
  // Labels are dense block ids in [0, k).
  BlockPartition(std::vector<std::int32_t> labels, std::int32_t k);

  static BlockPartition single_block(std::int32_t n) {
    return BlockPartition(std::vector<std::int32_t>(n, 0), 1);
  }

  std::int32_t k() const { return k_; }
  std::int32_t size() const { return static_cast<std::int32_t>(labels_.size()); }
  std::int32_t block(std::int32_t i) const {
    return labels_[static_cast<std::size_t>(i)];
  }
  const std::vector<std::int32_t>& labels() const { return labels_; }

 private:
  std::vector<std::int32_t> labels_;
  std::int32_t k_;
};

// Set of hidden pairs over a domain; everything not hidden is observed.
// Hidden keys are stored both sorted (for deterministic iteration) and
// hashed (for O(1) membership).
class PairMask {
 public:
  PairMask() = default;  // full observation
  explicit PairMask(std::vector<std::int64_t> hidden_keys);

  static PairMask full() { return PairMask(); }

  bool hides(std::int64_t key) const {
    return !hidden_set_.empty() && hidden_set_.count(key) != 0;
  }
  std::int64_t hidden_count() const {
    return static_cast<std::int64_t>(hidden_sorted_.size());
  }
  const std::vector<std::int64_t>& hidden_sorted() const {
    return hidden_sorted_;
  }

 private:
  std::vector<std::int64_t> hidden_sorted_;
  std::unordered_set<std::int64_t> hidden_set_;
};

// Per-layer degree propensities theta_i = d_i / <d>, where d_i counts edge
// endpoints at i and the mean runs over all nodes of the relevant side
// (left and right separately for bipartite domains). Isolated nodes keep
// theta = 0 and are listed in `isolated`.
struct NormalizedDegrees {
  Eigen::VectorXd theta;
  std::vector<std::int32_t> isolated;
};

NormalizedDegrees normalized_degrees(const MultilayerNetwork& net, int layer);

// Degrees restricted to observed pairs and rescaled by each node's observed
// pair fraction (d_i / frac_i) before normalization, so partially hidden
// nodes are not biased low. With a full mask this equals normalized_degrees.
NormalizedDegrees masked_normalized_degrees(const MultilayerNetwork& net,
                                            int layer, const PairMask& mask);

}  // namespace corrnet
