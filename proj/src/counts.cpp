#include "corrnet/counts.hpp"

#include <string>

namespace corrnet {

namespace {

std::size_t fold_slot(std::int32_t k, bool canonical, std::int32_t r,
                      std::int32_t s) {
  if (r < 0 || r >= k || s < 0 || s >= k)
    fail(Err::DimensionMismatch,
         "bundle (" + std::to_string(r) + ", " + std::to_string(s) +
             ") outside a " + std::to_string(k) + "-block partition");
  if (canonical && r > s) std::swap(r, s);
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(k) +
         static_cast<std::size_t>(s);
}

void check_partition(const MultilayerNetwork& net,
                     const BlockPartition& partition) {
  if (partition.size() != net.num_nodes())
    fail(Err::PartitionMismatch,
         "partition covers " + std::to_string(partition.size()) +
             " nodes, network has " + std::to_string(net.num_nodes()));
}

void check_theta(const MultilayerNetwork& net, const Eigen::VectorXd& theta) {
  if (theta.size() != net.num_nodes())
    fail(Err::DimensionMismatch, "theta length does not match node count");
}

// Per-block node totals, side-aware for bipartite domains.
struct BlockTotals {
  std::int32_t k = 0;
  bool bipartite = false;
  std::vector<std::int64_t> all;    // unipartite counts
  std::vector<std::int64_t> left;   // bipartite side counts
  std::vector<std::int64_t> right;
};

BlockTotals block_totals(const MultilayerNetwork& net,
                         const BlockPartition& partition) {
  BlockTotals t;
  t.k = partition.k();
  t.bipartite = net.domain().bipartite();
  if (t.bipartite) {
    t.left.assign(static_cast<std::size_t>(t.k), 0);
    t.right.assign(static_cast<std::size_t>(t.k), 0);
  } else {
    t.all.assign(static_cast<std::size_t>(t.k), 0);
  }
  for (std::int32_t i = 0; i < net.num_nodes(); ++i) {
    const auto g = static_cast<std::size_t>(partition.block(i));
    if (t.bipartite) {
      (net.domain().is_left(i) ? t.left : t.right)[g] += 1;
    } else {
      t.all[g] += 1;
    }
  }
  return t;
}

// Domain pairs inside bundle (r, s), before masking.
std::int64_t full_bundle_pairs(const EdgeDomain& domain, const BlockTotals& t,
                               std::int32_t r, std::int32_t s) {
  if (t.bipartite)
    return t.left[static_cast<std::size_t>(r)] *
           t.right[static_cast<std::size_t>(s)];
  const std::int64_t nr = t.all[static_cast<std::size_t>(r)];
  const std::int64_t ns = t.all[static_cast<std::size_t>(s)];
  if (domain.directed)
    return r == s ? (domain.self_edges ? nr * nr : nr * (nr - 1)) : nr * ns;
  if (r == s)
    return domain.self_edges ? nr * (nr + 1) / 2 : nr * (nr - 1) / 2;
  return nr * ns;  // unordered cross-block pairs, counted once at r < s
}

// Per-block theta totals (sum and sum of squares), side-aware.
struct ThetaTotals {
  std::vector<double> sum, sq;          // unipartite
  std::vector<double> left_sum;         // bipartite
  std::vector<double> right_sum;
};

ThetaTotals theta_totals(const MultilayerNetwork& net,
                         const BlockPartition& partition,
                         const Eigen::VectorXd& theta) {
  ThetaTotals t;
  const auto k = static_cast<std::size_t>(partition.k());
  if (net.domain().bipartite()) {
    t.left_sum.assign(k, 0.0);
    t.right_sum.assign(k, 0.0);
  } else {
    t.sum.assign(k, 0.0);
    t.sq.assign(k, 0.0);
  }
  for (std::int32_t i = 0; i < net.num_nodes(); ++i) {
    const auto g = static_cast<std::size_t>(partition.block(i));
    const double v = theta[i];
    if (net.domain().bipartite()) {
      (net.domain().is_left(i) ? t.left_sum : t.right_sum)[g] += v;
    } else {
      t.sum[g] += v;
      t.sq[g] += v * v;
    }
  }
  return t;
}

// Sum of theta_i * theta_j over all domain pairs in bundle (r, s).
double full_theta_pairs(const EdgeDomain& domain, const ThetaTotals& t,
                        std::int32_t r, std::int32_t s) {
  if (domain.bipartite())
    return t.left_sum[static_cast<std::size_t>(r)] *
           t.right_sum[static_cast<std::size_t>(s)];
  const double T_r = t.sum[static_cast<std::size_t>(r)];
  const double T_s = t.sum[static_cast<std::size_t>(s)];
  if (domain.directed) {
    if (r != s) return T_r * T_s;
    return domain.self_edges ? T_r * T_r
                             : T_r * T_r - t.sq[static_cast<std::size_t>(r)];
  }
  if (r == s) {
    const double Q_r = t.sq[static_cast<std::size_t>(r)];
    return domain.self_edges ? (T_r * T_r + Q_r) / 2.0
                             : (T_r * T_r - Q_r) / 2.0;
  }
  return T_r * T_s;
}

}  // namespace

BundleCounts::BundleCounts(std::int32_t k, bool canonical)
    : k_(k), canonical_(canonical) {
  if (k < 1) fail(Err::DimensionMismatch, "bundle table needs k >= 1");
  cells_.resize(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  pairs_.resize(cells_.size(), 0);
}

std::size_t BundleCounts::slot(std::int32_t r, std::int32_t s) const {
  return fold_slot(k_, canonical_, r, s);
}

PairCounts BundleCounts::aggregate() const {
  PairCounts total;
  for (std::int32_t r = 0; r < k_; ++r)
    for (std::int32_t s = canonical_ ? r : 0; s < k_; ++s) {
      const auto& c = at(r, s);
      total.e11 += c.e11;
      total.e10 += c.e10;
      total.e01 += c.e01;
      total.e00 += c.e00;
    }
  return total;
}

DegreeCorrectionSums::DegreeCorrectionSums(std::int32_t k, bool canonical)
    : k_(k), canonical_(canonical) {
  if (k < 1) fail(Err::DimensionMismatch, "bundle table needs k >= 1");
  cells_.resize(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
}

std::size_t DegreeCorrectionSums::slot(std::int32_t r, std::int32_t s) const {
  return fold_slot(k_, canonical_, r, s);
}

PairCounts global_cooccurrence(const MultilayerNetwork& net, int layer_a,
                               int layer_b, const PairMask& mask) {
  const auto& a = net.layer(layer_a);
  const auto& b = net.layer(layer_b);
  const auto n = net.num_nodes();
  const auto& domain = net.domain();

  std::int64_t hidden = 0;
  for (const auto key : mask.hidden_sorted()) {
    const auto [i, j] = domain.pair_of_key(n, key);
    domain.validate_pair(n, i, j);
    ++hidden;
  }

  PairCounts c;
  std::int64_t m_a = 0;
  for (const auto& [i, j] : a.edges()) {
    const auto key = domain.key_of(n, i, j);
    if (mask.hides(key)) continue;
    ++m_a;
    if (b.has(key)) ++c.e11;
  }
  std::int64_t m_b = 0;
  for (const auto& [i, j] : b.edges()) {
    const auto key = domain.key_of(n, i, j);
    if (mask.hides(key)) continue;
    ++m_b;
  }
  c.e10 = m_a - c.e11;
  c.e01 = m_b - c.e11;
  c.e00 = (net.pair_count() - hidden) - c.e11 - c.e10 - c.e01;
  return c;
}

BundleCounts bundle_cooccurrence(const MultilayerNetwork& net,
                                 const BlockPartition& partition, int layer_a,
                                 int layer_b, const PairMask& mask) {
  check_partition(net, partition);
  const auto& a = net.layer(layer_a);
  const auto& b = net.layer(layer_b);
  const auto n = net.num_nodes();
  const auto& domain = net.domain();
  const bool canonical = !domain.directed && !domain.bipartite();

  BundleCounts out(partition.k(), canonical);
  const auto totals = block_totals(net, partition);
  for (std::int32_t r = 0; r < out.k(); ++r)
    for (std::int32_t s = canonical ? r : 0; s < out.k(); ++s)
      out.pairs(r, s) = full_bundle_pairs(domain, totals, r, s);

  for (const auto key : mask.hidden_sorted()) {
    const auto [i, j] = domain.pair_of_key(n, key);
    domain.validate_pair(n, i, j);
    out.pairs(partition.block(i), partition.block(j)) -= 1;
  }

  for (const auto& [i, j] : a.edges()) {
    const auto key = domain.key_of(n, i, j);
    if (mask.hides(key)) continue;
    auto& cell = out.at(partition.block(i), partition.block(j));
    if (b.has(key))
      ++cell.e11;
    else
      ++cell.e10;
  }
  for (const auto& [i, j] : b.edges()) {
    const auto key = domain.key_of(n, i, j);
    if (mask.hides(key) || a.has(key)) continue;
    ++out.at(partition.block(i), partition.block(j)).e01;
  }
  for (std::int32_t r = 0; r < out.k(); ++r)
    for (std::int32_t s = canonical ? r : 0; s < out.k(); ++s) {
      auto& cell = out.at(r, s);
      cell.e00 = out.pairs(r, s) - cell.e11 - cell.e10 - cell.e01;
      if (cell.e00 < 0)
        fail(Err::InfeasibleBundle,
             "negative absent-absent count in bundle (" + std::to_string(r) +
                 ", " + std::to_string(s) + ")");
    }
  return out;
}

DegreeCorrectionSums degree_correction_sums(const MultilayerNetwork& net,
                                            const BlockPartition& partition,
                                            int layer_a, int layer_b,
                                            const NormalizedDegrees& theta_a,
                                            const NormalizedDegrees& theta_b,
                                            const PairMask& mask) {
  check_partition(net, partition);
  check_theta(net, theta_a.theta);
  check_theta(net, theta_b.theta);
  const auto& a = net.layer(layer_a);
  const auto& b = net.layer(layer_b);
  const auto n = net.num_nodes();
  const auto& domain = net.domain();
  const bool canonical = !domain.directed && !domain.bipartite();
  const auto k = partition.k();
  const auto& ta = theta_a.theta;
  const auto& tb = theta_b.theta;

  DegreeCorrectionSums out(k, canonical);

  // Full-domain aggregates per bundle.
  const auto bt = block_totals(net, partition);
  const auto tt_a = theta_totals(net, partition, ta);
  const auto tt_b = theta_totals(net, partition, tb);

  // Hidden-pair and observed-pair corrections, accumulated per slot.
  std::vector<double> hid_a(
      static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0.0);
  std::vector<double> hid_b(hid_a.size(), 0.0);
  std::vector<double> sub_a(hid_a.size(), 0.0);
  std::vector<double> sub_b(hid_a.size(), 0.0);
  std::vector<std::int64_t> hid_cnt(hid_a.size(), 0);
  const auto slot_of = [&](std::int32_t i, std::int32_t j) {
    return fold_slot(k, canonical, partition.block(i), partition.block(j));
  };

  for (const auto key : mask.hidden_sorted()) {
    const auto [i, j] = domain.pair_of_key(n, key);
    domain.validate_pair(n, i, j);
    const auto slot = slot_of(i, j);
    hid_a[slot] += ta[i] * ta[j];
    hid_b[slot] += tb[i] * tb[j];
    hid_cnt[slot] += 1;
  }

  // Pairs touching an edge in either layer contribute to g-sums and are
  // removed from the complement that yields the f-sums.
  for (const auto& [i, j] : a.edges()) {
    const auto key = domain.key_of(n, i, j);
    if (mask.hides(key)) continue;
    const auto slot = slot_of(i, j);
    const double eps_a = ta[i] * ta[j] - 1.0;
    const double eps_b = tb[i] * tb[j] - 1.0;
    sub_a[slot] += eps_a;
    sub_b[slot] += eps_b;
    if (!b.has(key)) {
      auto& cell = out.at(partition.block(i), partition.block(j));
      cell.g10 += eps_b - eps_a;
    }
  }
  for (const auto& [i, j] : b.edges()) {
    const auto key = domain.key_of(n, i, j);
    if (mask.hides(key) || a.has(key)) continue;
    const auto slot = slot_of(i, j);
    const double eps_a = ta[i] * ta[j] - 1.0;
    const double eps_b = tb[i] * tb[j] - 1.0;
    sub_a[slot] += eps_a;
    sub_b[slot] += eps_b;
    out.at(partition.block(i), partition.block(j)).g01 += eps_a - eps_b;
  }

  for (std::int32_t r = 0; r < k; ++r)
    for (std::int32_t s = canonical ? r : 0; s < k; ++s) {
      const auto slot = fold_slot(k, canonical, r, s);
      const double pairs_obs = static_cast<double>(
          full_bundle_pairs(domain, bt, r, s) - hid_cnt[slot]);
      const double eps_sum_a =
          (full_theta_pairs(domain, tt_a, r, s) - hid_a[slot]) - pairs_obs;
      const double eps_sum_b =
          (full_theta_pairs(domain, tt_b, r, s) - hid_b[slot]) - pairs_obs;
      auto& cell = out.at(r, s);
      cell.f1 = eps_sum_a - sub_a[slot];
      cell.f2 = eps_sum_b - sub_b[slot];
    }
  return out;
}

Eigen::MatrixXd bundle_theta_pair_sums(const MultilayerNetwork& net,
                                       const BlockPartition& partition,
                                       const Eigen::VectorXd& theta,
                                       const PairMask& mask) {
  check_partition(net, partition);
  check_theta(net, theta);
  const auto n = net.num_nodes();
  const auto& domain = net.domain();
  const bool canonical = !domain.directed && !domain.bipartite();
  const auto k = partition.k();

  const auto tt = theta_totals(net, partition, theta);
  Eigen::MatrixXd out(k, k);
  for (std::int32_t r = 0; r < k; ++r)
    for (std::int32_t s = 0; s < k; ++s)
      out(r, s) = canonical && r > s ? 0.0 : full_theta_pairs(domain, tt, r, s);

  for (const auto key : mask.hidden_sorted()) {
    const auto [i, j] = domain.pair_of_key(n, key);
    domain.validate_pair(n, i, j);
    auto r = partition.block(i);
    auto s = partition.block(j);
    if (canonical && r > s) std::swap(r, s);
    out(r, s) -= theta[i] * theta[j];
  }
  if (canonical)
    for (std::int32_t r = 0; r < k; ++r)
      for (std::int32_t s = 0; s < r; ++s) out(r, s) = out(s, r);
  return out;
}

Eigen::MatrixXd bundle_pair_totals(const MultilayerNetwork& net,
                                   const BlockPartition& partition,
                                   const PairMask& mask) {
  check_partition(net, partition);
  const auto n = net.num_nodes();
  const auto& domain = net.domain();
  const bool canonical = !domain.directed && !domain.bipartite();
  const auto k = partition.k();

  const auto bt = block_totals(net, partition);
  Eigen::MatrixXd out(k, k);
  for (std::int32_t r = 0; r < k; ++r)
    for (std::int32_t s = 0; s < k; ++s)
      out(r, s) = canonical && r > s
                      ? 0.0
                      : static_cast<double>(full_bundle_pairs(domain, bt, r, s));

  for (const auto key : mask.hidden_sorted()) {
    const auto [i, j] = domain.pair_of_key(n, key);
    domain.validate_pair(n, i, j);
    auto r = partition.block(i);
    auto s = partition.block(j);
    if (canonical && r > s) std::swap(r, s);
    out(r, s) -= 1.0;
  }
  if (canonical)
    for (std::int32_t r = 0; r < k; ++r)
      for (std::int32_t s = 0; s < r; ++s) out(r, s) = out(s, r);
  return out;
}

}  // namespace corrnet
