#include "corrnet/network.hpp"

#include <algorithm>
#include <numeric>

namespace corrnet {

MultilayerNetwork::MultilayerNetwork(std::int32_t n, EdgeDomain domain,
                                     std::vector<EdgeList> layers,
                                     std::vector<std::string> layer_names)
    : n_(n), domain_(domain) {
  domain_.validate(n_);
  pair_count_ = domain_.size(n_);
  if (!layer_names.empty() && layer_names.size() != layers.size())
    fail(Err::DimensionMismatch, "layer name count does not match layers");
  layers_.reserve(layers.size());
  for (auto& raw : layers) {
    std::unordered_set<std::int64_t> keys;
    keys.reserve(raw.size() * 2);
    EdgeList canon;
    canon.reserve(raw.size());
    for (const auto& [i, j] : raw) {
      domain_.validate_pair(n_, i, j);
      const auto pair = domain_.canonical(i, j);
      if (keys.insert(domain_.key_of(n_, pair.first, pair.second)).second)
        canon.push_back(pair);
    }
    std::sort(canon.begin(), canon.end());
    layers_.emplace_back(std::move(canon), std::move(keys));
  }
  if (layer_names.empty()) {
    layer_names_.reserve(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l)
      layer_names_.push_back(std::to_string(l + 1));
  } else {
    layer_names_ = std::move(layer_names);
  }
}

int MultilayerNetwork::layer_index(const std::string& name) const {
  for (int l = 0; l < num_layers(); ++l)
    if (layer_names_[static_cast<std::size_t>(l)] == name) return l;
  return -1;
}

MultilayerNetwork build_network(std::int32_t n, const EdgeDomain& domain,
                                std::vector<EdgeList> layers,
                                std::vector<std::string> layer_names) {
  return MultilayerNetwork(n, domain, std::move(layers),
                           std::move(layer_names));
}

BlockPartition::BlockPartition(std::vector<std::int32_t> labels,
                               std::int32_t k)
    : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) fail(Err::DimensionMismatch, "partition needs k >= 1");
  for (const auto label : labels_)
    if (label < 0 || label >= k_)
      fail(Err::PartitionMismatch,
           "block label " + std::to_string(label) + " outside [0, " +
               std::to_string(k_) + ")");
}

PairMask::PairMask(std::vector<std::int64_t> hidden_keys)
    : hidden_sorted_(std::move(hidden_keys)) {
  std::sort(hidden_sorted_.begin(), hidden_sorted_.end());
  hidden_sorted_.erase(
      std::unique(hidden_sorted_.begin(), hidden_sorted_.end()),
      hidden_sorted_.end());
  hidden_set_.reserve(hidden_sorted_.size() * 2);
  hidden_set_.insert(hidden_sorted_.begin(), hidden_sorted_.end());
}

namespace {

// Endpoint-count degrees: undirected self-edges contribute 2, directed
// edges contribute 1 at each endpoint.
std::vector<double> endpoint_degrees(const MultilayerNetwork& net, int layer) {
  std::vector<double> d(static_cast<std::size_t>(net.num_nodes()), 0.0);
  for (const auto& [i, j] : net.layer(layer).edges()) {
    d[static_cast<std::size_t>(i)] += 1.0;
    d[static_cast<std::size_t>(j)] += 1.0;
  }
  return d;
}

NormalizedDegrees normalize_per_side(const MultilayerNetwork& net,
                                     std::vector<double> d) {
  const auto n = static_cast<std::size_t>(net.num_nodes());
  const auto& domain = net.domain();
  NormalizedDegrees out;
  out.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  const auto normalize = [&](std::size_t begin, std::size_t end) {
    if (begin == end) return;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += d[i];
    if (sum <= 0.0)
      fail(Err::EmptyLayer, "layer has no observed edges on one node side");
    const double mean = sum / static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i)
      out.theta[static_cast<Eigen::Index>(i)] = d[i] / mean;
  };

  if (domain.bipartite()) {
    const auto left = static_cast<std::size_t>(domain.left_count);
    normalize(0, left);
    normalize(left, n);
  } else {
    normalize(0, n);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] == 0.0) out.isolated.push_back(static_cast<std::int32_t>(i));
  return out;
}

}  // namespace

NormalizedDegrees normalized_degrees(const MultilayerNetwork& net, int layer) {
  return normalize_per_side(net, endpoint_degrees(net, layer));
}

NormalizedDegrees masked_normalized_degrees(const MultilayerNetwork& net,
                                            int layer, const PairMask& mask) {
  const auto n = static_cast<std::size_t>(net.num_nodes());
  std::vector<double> d = endpoint_degrees(net, layer);
  if (mask.hidden_count() == 0) return normalize_per_side(net, std::move(d));

  const auto& domain = net.domain();
  const auto& lay = net.layer(layer);
  std::vector<std::int64_t> hidden_at(n, 0);
  for (const auto key : mask.hidden_sorted()) {
    const auto [i, j] = domain.pair_of_key(net.num_nodes(), key);
    domain.validate_pair(net.num_nodes(), i, j);
    hidden_at[static_cast<std::size_t>(i)] += 1;
    if (j != i) hidden_at[static_cast<std::size_t>(j)] += 1;
    if (lay.has(key)) {
      // Remove the hidden edge's endpoint contributions.
      d[static_cast<std::size_t>(i)] -= 1.0;
      d[static_cast<std::size_t>(j)] -= 1.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t total =
        incident_pair_count(domain, net.num_nodes(),
                            static_cast<std::int64_t>(i));
    const std::int64_t observed = total - hidden_at[i];
    if (observed <= 0) {
      d[i] = 0.0;  // fully hidden node: flagged as isolated downstream
      continue;
    }
    d[i] *= static_cast<double>(total) / static_cast<double>(observed);
  }
  return normalize_per_side(net, std::move(d));
}

}  // namespace corrnet
