#include "corrnet/edge_domain.hpp"

#include <cmath>
#include <string>

namespace corrnet {

void EdgeDomain::validate(std::int64_t n) const {
  if (n < 0) fail(Err::DimensionMismatch, "negative node count");
  if (bipartite()) {
    if (self_edges)
      fail(Err::BipartiteViolation, "bipartite domains forbid self-edges");
    if (left_count > n)
      fail(Err::DimensionMismatch,
           "left side (" + std::to_string(left_count) +
               ") exceeds node count (" + std::to_string(n) + ")");
  }
}

std::int64_t EdgeDomain::size(std::int64_t n) const {
  validate(n);
  if (bipartite()) return left_count * (n - left_count);
  if (directed) return self_edges ? n * n : n * (n - 1);
  return self_edges ? n * (n + 1) / 2 : n * (n - 1) / 2;
}

std::pair<std::int32_t, std::int32_t> EdgeDomain::canonical(
    std::int32_t i, std::int32_t j) const {
  if (bipartite()) return is_left(i) ? std::pair{i, j} : std::pair{j, i};
  if (!directed && i > j) return {j, i};
  return {i, j};
}

void EdgeDomain::validate_pair(std::int64_t n, std::int64_t i,
                               std::int64_t j) const {
  if (i < 0 || i >= n || j < 0 || j >= n)
    fail(Err::OutOfRangeNode, "pair (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ") outside [0, " +
                                  std::to_string(n) + ")");
  if (i == j && !self_edges)
    fail(Err::SelfEdgeForbidden, "self-edge at node " + std::to_string(i));
  if (bipartite() && is_left(i) == is_left(j))
    fail(Err::BipartiteViolation, "pair (" + std::to_string(i) + ", " +
                                      std::to_string(j) +
                                      ") has both endpoints on one side");
}

std::int64_t EdgeDomain::index_of(std::int64_t n, std::int64_t i,
                                  std::int64_t j) const {
  if (bipartite()) {
    // i on the left, j on the right.
    return i * (n - left_count) + (j - left_count);
  }
  if (directed) {
    if (self_edges) return i * n + j;
    return i * (n - 1) + (j > i ? j - 1 : j);
  }
  if (self_edges) {
    // Upper triangle including the diagonal, i <= j.
    return i * n - i * (i - 1) / 2 + (j - i);
  }
  // Upper triangle excluding the diagonal, i < j.
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

namespace {

// Row start of the strict upper triangle: r(i) = i*n - i(i+1)/2.
std::int64_t strict_row_start(std::int64_t n, std::int64_t i) {
  return i * n - i * (i + 1) / 2;
}
// Row start of the inclusive upper triangle: r(i) = i*n - i(i-1)/2.
std::int64_t incl_row_start(std::int64_t n, std::int64_t i) {
  return i * n - i * (i - 1) / 2;
}

}  // namespace

std::pair<std::int32_t, std::int32_t> EdgeDomain::pair_at(
    std::int64_t n, std::int64_t index) const {
  if (bipartite()) {
    const std::int64_t right = n - left_count;
    return {static_cast<std::int32_t>(index / right),
            static_cast<std::int32_t>(left_count + index % right)};
  }
  if (directed) {
    if (self_edges)
      return {static_cast<std::int32_t>(index / n),
              static_cast<std::int32_t>(index % n)};
    const std::int64_t i = index / (n - 1);
    const std::int64_t r = index % (n - 1);
    return {static_cast<std::int32_t>(i),
            static_cast<std::int32_t>(r >= i ? r + 1 : r)};
  }
  // Invert the triangular row offsets: start from the sqrt estimate, then
  // correct by +-1 steps (the estimate is off by at most one row).
  if (self_edges) {
    std::int64_t i = static_cast<std::int64_t>(
        n + 0.5 - std::sqrt((n + 0.5) * (n + 0.5) - 2.0 * index));
    if (i < 0) i = 0;
    if (i > n - 1) i = n - 1;
    while (i > 0 && incl_row_start(n, i) > index) --i;
    while (i < n - 1 && incl_row_start(n, i + 1) <= index) ++i;
    const std::int64_t j = i + (index - incl_row_start(n, i));
    return {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)};
  }
  std::int64_t i = static_cast<std::int64_t>(
      n - 0.5 - std::sqrt((n - 0.5) * (n - 0.5) - 2.0 * index));
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  while (i > 0 && strict_row_start(n, i) > index) --i;
  while (i < n - 2 && strict_row_start(n, i + 1) <= index) ++i;
  const std::int64_t j = i + 1 + (index - strict_row_start(n, i));
  return {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)};
}

std::int64_t edge_domain_size(const EdgeDomain& domain, std::int64_t n) {
  return domain.size(n);
}

std::int64_t incident_pair_count(const EdgeDomain& domain, std::int64_t n,
                                 std::int64_t i) {
  if (domain.bipartite())
    return domain.is_left(i) ? n - domain.left_count : domain.left_count;
  const std::int64_t others = n - 1;
  if (domain.directed) return 2 * others + (domain.self_edges ? 1 : 0);
  return others + (domain.self_edges ? 1 : 0);
}

}  // namespace corrnet
