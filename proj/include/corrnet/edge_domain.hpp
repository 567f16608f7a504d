// Pair domains for multilayer network models.
//
// A domain fixes which node pairs may carry an edge: directed or undirected,
// with or without self-edges, unipartite or bipartite. Pairs are addressed
// by a dense linear index in [0, size) so samplers and fold splitters can
// enumerate or hash them without materializing the pair set. Bipartite
// domains place the left side at node indices [0, left_count) and the right
// side at [left_count, n); their pairs are canonicalized as (left, right)
// and directedness does not change the pair set.

#pragma once

#include <cstdint>
#include <utility>

#include "corrnet/error.hpp"

namespace corrnet {

struct EdgeDomain {
  bool directed = false;
  bool self_edges = false;
  // Number of left-side nodes for bipartite domains; -1 marks unipartite.
  std::int64_t left_count = -1;

  bool bipartite() const { return left_count >= 0; }

  static EdgeDomain undirected() { return {false, false, -1}; }
  static EdgeDomain directed_simple() { return {true, false, -1}; }
  static EdgeDomain undirected_with_self() { return {false, true, -1}; }
  static EdgeDomain directed_with_self() { return {true, true, -1}; }
  static EdgeDomain bipartite_domain(std::int64_t left) {
    if (left < 0) fail(Err::DimensionMismatch, "negative left side");
    return {false, false, left};
  }

  // Throws on internally inconsistent descriptors (self-edges in a bipartite
  // domain, or a left side larger than the node set).
  void validate(std::int64_t n) const;

  std::int64_t size(std::int64_t n) const;

  bool is_left(std::int64_t i) const { return i < left_count; }

  // Maps an incident pair to its stored orientation: (min, max) for
  // undirected unipartite pairs, (left, right) for bipartite pairs,
  // unchanged for directed pairs. Does not validate.
  std::pair<std::int32_t, std::int32_t> canonical(std::int32_t i,
                                                  std::int32_t j) const;

  // Throws OutOfRangeNode / SelfEdgeForbidden / BipartiteViolation.
  void validate_pair(std::int64_t n, std::int64_t i, std::int64_t j) const;

  // Linear index of a canonical pair; inverse of pair_at.
  std::int64_t index_of(std::int64_t n, std::int64_t i, std::int64_t j) const;
  std::pair<std::int32_t, std::int32_t> pair_at(std::int64_t n,
                                                std::int64_t index) const;

  // Dense hash key for a canonical pair: i * n + j.
  std::int64_t key_of(std::int64_t n, std::int64_t i, std::int64_t j) const {
    return i * n + j;
  }
  std::pair<std::int32_t, std::int32_t> pair_of_key(std::int64_t n,
                                                    std::int64_t key) const {
    return {static_cast<std::int32_t>(key / n),
            static_cast<std::int32_t>(key % n)};
  }

  bool operator==(const EdgeDomain&) const = default;
};

// Free-function form of EdgeDomain::size.
std::int64_t edge_domain_size(const EdgeDomain& domain, std::int64_t n);

// Number of domain pairs incident to node i (used for masked degree
// rescaling). Self pairs count once.
std::int64_t incident_pair_count(const EdgeDomain& domain, std::int64_t n,
                                 std::int64_t i);

}  // namespace corrnet
