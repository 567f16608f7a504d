#include "corrnet/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "corrnet/counts.hpp"
#include "corrnet/rng.hpp"

namespace corrnet {

namespace {

// Substream layout shared by all samplers: pair draws are addressed by the
// pair's linear index, so outputs do not depend on iteration order.
constexpr std::uint64_t kStreamLayer1 = 0;
constexpr std::uint64_t kStreamLayer2 = 1;
constexpr std::uint64_t kStreamSizes = 10;
constexpr std::uint64_t kStreamDegrees = 11;

void require_feasible(const CorrERParams& p, const std::string& what) {
  if (!feasible_corr_er(p.p1, p.p2, p.q))
    fail(Err::InfeasibleParams, what + " parameters (p1 = " +
                                    std::to_string(p.p1) +
                                    ", p2 = " + std::to_string(p.p2) +
                                    ", q = " + std::to_string(p.q) +
                                    ") are outside the feasible region");
}

// One uniform decides the joint outcome: the cumulative cell boundaries
// are q, p1, p1 + p2 - q.
void sample_joint(double u, double p1, double p2, double q, bool& a, bool& b) {
  if (u < q) {
    a = b = true;
  } else if (u < p1) {
    a = true;
    b = false;
  } else if (u < p1 + p2 - q) {
    a = false;
    b = true;
  } else {
    a = b = false;
  }
}

MultilayerNetwork two_layers(std::int32_t n, const EdgeDomain& domain,
                             EdgeList ea, EdgeList eb) {
  return MultilayerNetwork(n, domain, {std::move(ea), std::move(eb)});
}

}  // namespace

MultilayerNetwork sample_corr_er(std::int32_t n, const EdgeDomain& domain,
                                 const CorrERParams& params,
                                 std::uint64_t seed) {
  domain.validate(n);
  require_feasible(params, "correlated pair");
  const CounterRng rng(seed, kStreamLayer1);
  const std::int64_t total = domain.size(n);
  EdgeList ea, eb;
  for (std::int64_t t = 0; t < total; ++t) {
    bool a, b;
    sample_joint(rng.uniform(static_cast<std::uint64_t>(t)), params.p1,
                 params.p2, params.q, a, b);
    if (!a && !b) continue;
    const auto [i, j] = domain.pair_at(n, t);
    if (a) ea.emplace_back(i, j);
    if (b) eb.emplace_back(i, j);
  }
  return two_layers(n, domain, std::move(ea), std::move(eb));
}

MultilayerNetwork sample_corr_er_sequential(std::int32_t n,
                                            const EdgeDomain& domain,
                                            const CorrERParams& params,
                                            std::uint64_t seed) {
  domain.validate(n);
  require_feasible(params, "correlated pair");
  const CounterRng rng1(seed, kStreamLayer1);
  const CounterRng rng2(seed, kStreamLayer2);
  const double p1 = params.p1, p2 = params.p2, q = params.q;
  const double on_edge = p1 > 0.0 ? q / p1 : 0.0;
  const double on_gap = p1 < 1.0 ? (p2 - q) / (1.0 - p1) : 0.0;
  const std::int64_t total = domain.size(n);
  EdgeList ea, eb;
  for (std::int64_t t = 0; t < total; ++t) {
    const auto c = static_cast<std::uint64_t>(t);
    const bool a = rng1.uniform(c) < p1;
    const bool b = rng2.uniform(c) < (a ? on_edge : on_gap);
    if (!a && !b) continue;
    const auto [i, j] = domain.pair_at(n, t);
    if (a) ea.emplace_back(i, j);
    if (b) eb.emplace_back(i, j);
  }
  return two_layers(n, domain, std::move(ea), std::move(eb));
}

MultilayerNetwork sample_corr_sbm(std::int32_t n, const EdgeDomain& domain,
                                  const BlockPartition& partition,
                                  const CorrSBMParams& params,
                                  std::uint64_t seed) {
  domain.validate(n);
  if (partition.size() != n)
    fail(Err::PartitionMismatch, "partition length does not match node count");
  if (partition.k() != params.k)
    fail(Err::DimensionMismatch, "parameter table does not match partition");
  for (std::int32_t r = 0; r < params.k; ++r)
    for (std::int32_t s = 0; s < params.k; ++s)
      if (params.fitted(r, s) &&
          !feasible_corr_er(params.p1(r, s), params.p2(r, s), params.q(r, s)))
        fail(Err::InfeasibleParams,
             "bundle (" + std::to_string(r) + ", " + std::to_string(s) +
                 ") parameters are outside the feasible region");
  const CounterRng rng(seed, kStreamLayer1);
  const std::int64_t total = domain.size(n);
  EdgeList ea, eb;
  for (std::int64_t t = 0; t < total; ++t) {
    const auto [i, j] = domain.pair_at(n, t);
    const auto r = partition.block(i);
    const auto s = partition.block(j);
    if (!params.fitted(r, s))
      fail(Err::MissingBundleFit, "no parameters for bundle (" +
                                      std::to_string(r) + ", " +
                                      std::to_string(s) + ")");
    bool a, b;
    sample_joint(rng.uniform(static_cast<std::uint64_t>(t)), params.p1(r, s),
                 params.p2(r, s), params.q(r, s), a, b);
    if (a) ea.emplace_back(i, j);
    if (b) eb.emplace_back(i, j);
  }
  return two_layers(n, domain, std::move(ea), std::move(eb));
}

namespace {

// Projects pair-level cell probabilities into the feasible box. Returns
// true when the raw values had to move.
bool clamp_pair_probs(double& p1, double& p2, double& q) {
  const double rp1 = p1, rp2 = p2, rq = q;
  p1 = std::clamp(p1, 0.0, 1.0);
  p2 = std::clamp(p2, 0.0, 1.0);
  const double lo = std::max(0.0, p1 + p2 - 1.0);
  const double hi = std::min(p1, p2);
  q = std::clamp(q, lo, hi);
  return p1 != rp1 || p2 != rp2 || q != rq;
}

}  // namespace

DcSampleResult sample_corr_dcsbm(std::int32_t n, const EdgeDomain& domain,
                                 const BlockPartition& partition,
                                 const CorrDCSBMParams& params,
                                 std::uint64_t seed,
                                 InfeasiblePairPolicy policy) {
  domain.validate(n);
  if (partition.size() != n)
    fail(Err::PartitionMismatch, "partition length does not match node count");
  if (partition.k() != params.base.k)
    fail(Err::DimensionMismatch, "parameter table does not match partition");
  if (params.theta1.size() != n || params.theta2.size() != n)
    fail(Err::DimensionMismatch, "theta length does not match node count");
  const CounterRng rng(seed, kStreamLayer1);
  const std::int64_t total = domain.size(n);
  EdgeList ea, eb;
  std::int64_t clamped = 0;
  for (std::int64_t t = 0; t < total; ++t) {
    const auto [i, j] = domain.pair_at(n, t);
    const auto r = partition.block(i);
    const auto s = partition.block(j);
    if (!params.base.fitted(r, s))
      fail(Err::MissingBundleFit, "no parameters for bundle (" +
                                      std::to_string(r) + ", " +
                                      std::to_string(s) + ")");
    const double x = params.theta1[i] * params.theta1[j];
    const double y = params.theta2[i] * params.theta2[j];
    double p1 = x * params.base.p1(r, s);
    double p2 = y * params.base.p2(r, s);
    double q = std::sqrt(x * y) * params.base.q(r, s);
    if (clamp_pair_probs(p1, p2, q)) {
      if (policy == InfeasiblePairPolicy::Error)
        fail(Err::PairProbabilityOverflow,
             "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                 ") has propensity-scaled probabilities outside the feasible "
                 "region");
      ++clamped;
    }
    bool a, b;
    sample_joint(rng.uniform(static_cast<std::uint64_t>(t)), p1, p2, q, a, b);
    if (a) ea.emplace_back(i, j);
    if (b) eb.emplace_back(i, j);
  }
  return {two_layers(n, domain, std::move(ea), std::move(eb)), clamped};
}

double q_from_rho(double p1, double p2, double rho) {
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0))
    fail(Err::DegenerateMarginal,
         "q_from_rho requires marginal probabilities strictly inside (0, 1)");
  if (!(rho >= -1.0 && rho <= 1.0))
    fail(Err::InfeasibleRho, "correlation must lie in [-1, 1]");
  return rho * std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2)) + p1 * p2;
}

std::string to_string(BenchmarkVariant v) {
  switch (v) {
    case BenchmarkVariant::CorrER:
      return "corr-er";
    case BenchmarkVariant::CorrSBM:
      return "corr-sbm";
    case BenchmarkVariant::CorrDCSBM:
      return "corr-dcsbm";
  }
  return "unknown";
}

std::optional<BenchmarkVariant> benchmark_variant_from_string(
    std::string_view name) {
  if (name == "corr-er") return BenchmarkVariant::CorrER;
  if (name == "corr-sbm") return BenchmarkVariant::CorrSBM;
  if (name == "corr-dcsbm") return BenchmarkVariant::CorrDCSBM;
  return std::nullopt;
}

namespace {

// Standard normal via Box-Muller on two counter draws.
double normal_draw(SequentialRng& rng) {
  const double u1 = std::max(rng.uniform(), 0x1.0p-53);
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Marsaglia-Tsang gamma sampler (shape alpha, unit scale).
double gamma_draw(SequentialRng& rng, double alpha) {
  if (alpha < 1.0) {
    const double u = std::max(rng.uniform(), 0x1.0p-53);
    return gamma_draw(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal_draw(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = std::max(rng.uniform(), 0x1.0p-53);
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

// Community sizes: Dirichlet weights rounded by largest remainder, then
// topped up so every block keeps at least one node.
std::vector<std::int32_t> community_sizes(std::int32_t N, std::int32_t k,
                                          double concentration,
                                          std::uint64_t seed) {
  SequentialRng rng(seed, kStreamSizes);
  std::vector<double> w(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (auto& v : w) {
    v = gamma_draw(rng, concentration);
    sum += v;
  }
  std::vector<std::int32_t> sizes(static_cast<std::size_t>(k));
  std::vector<std::pair<double, std::int32_t>> frac;
  std::int32_t assigned = 0;
  for (std::int32_t r = 0; r < k; ++r) {
    const double target = w[static_cast<std::size_t>(r)] / sum *
                          static_cast<double>(N);
    sizes[static_cast<std::size_t>(r)] =
        static_cast<std::int32_t>(std::floor(target));
    assigned += sizes[static_cast<std::size_t>(r)];
    frac.emplace_back(target - std::floor(target), r);
  }
  std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::int32_t t = 0; t < N - assigned; ++t)
    sizes[static_cast<std::size_t>(
        frac[static_cast<std::size_t>(t)].second)] += 1;
  for (std::int32_t r = 0; r < k; ++r)
    while (sizes[static_cast<std::size_t>(r)] < 1) {
      const auto big = std::max_element(sizes.begin(), sizes.end());
      *big -= 1;
      sizes[static_cast<std::size_t>(r)] += 1;
    }
  return sizes;
}

// Truncated power-law degree by inverse CDF of k^eta on [k_min, k_max].
double powerlaw_degree(double u, double eta, double kmin, double kmax) {
  if (eta == -1.0)
    return std::exp(std::log(kmin) + u * (std::log(kmax) - std::log(kmin)));
  const double a = std::pow(kmin, eta + 1.0);
  const double b = std::pow(kmax, eta + 1.0);
  return std::pow(a + u * (b - a), 1.0 / (eta + 1.0));
}

void validate_benchmark_config(const BenchmarkConfig& cfg) {
  if (cfg.N < 2) fail(Err::InfeasibleParams, "benchmark needs N >= 2");
  if (cfg.n_c < 1 || cfg.n_c > cfg.N)
    fail(Err::InfeasibleParams, "community count must lie in [1, N]");
  if (!(cfg.mu >= 0.0 && cfg.mu <= 1.0))
    fail(Err::InfeasibleParams, "mixing parameter must lie in [0, 1]");
  if (!(cfg.rho >= -1.0 && cfg.rho <= 1.0))
    fail(Err::InfeasibleRho, "target correlation must lie in [-1, 1]");
  if (!(cfg.k_min > 0.0) || cfg.k_max < cfg.k_min)
    fail(Err::InfeasibleParams, "degree cutoffs need 0 < k_min <= k_max");
  if (cfg.k_max > static_cast<double>(cfg.N - 1))
    fail(Err::InfeasibleParams, "k_max cannot exceed N - 1");
  if (!(cfg.dirichlet_concentration > 0.0))
    fail(Err::InfeasibleParams, "Dirichlet concentration must be positive");
  if (cfg.variant == BenchmarkVariant::CorrDCSBM && cfg.rho < 0.0)
    fail(Err::NegativeRhoDCSBM,
         "negative target correlation has no degree-corrected second layer; "
         "use the corr-er or corr-sbm variant");
}

}  // namespace

GeneratedInstance make_benchmark(const BenchmarkConfig& cfg) {
  validate_benchmark_config(cfg);
  const EdgeDomain domain = EdgeDomain::undirected();
  const std::int32_t N = cfg.N;

  const auto sizes =
      community_sizes(N, cfg.n_c, cfg.dirichlet_concentration, cfg.seed);
  std::vector<std::int32_t> labels(static_cast<std::size_t>(N));
  {
    std::int32_t node = 0;
    for (std::int32_t r = 0; r < cfg.n_c; ++r)
      for (std::int32_t t = 0; t < sizes[static_cast<std::size_t>(r)]; ++t)
        labels[static_cast<std::size_t>(node++)] = r;
  }
  BlockPartition partition(labels, cfg.n_c);

  Eigen::VectorXd degrees(N);
  {
    const CounterRng rng(cfg.seed, kStreamDegrees);
    for (std::int32_t i = 0; i < N; ++i)
      degrees[i] = powerlaw_degree(rng.uniform(static_cast<std::uint64_t>(i)),
                                   cfg.eta_k, cfg.k_min, cfg.k_max);
  }
  const double S = degrees.sum();
  Eigen::VectorXd block_degree = Eigen::VectorXd::Zero(cfg.n_c);
  for (std::int32_t i = 0; i < N; ++i) block_degree[labels[(std::size_t)i]] +=
      degrees[i];

  // Planted layer: lambda_ij = mu k_i k_j / S plus, within a community c,
  // (1 - mu) k_i k_j / S_c, capped at one.
  const std::int64_t total = domain.size(N);
  EdgeList planted;
  {
    const CounterRng rng(cfg.seed, kStreamLayer1);
    for (std::int64_t t = 0; t < total; ++t) {
      const auto [i, j] = domain.pair_at(N, t);
      double lambda = cfg.mu * degrees[i] * degrees[j] / S;
      if (labels[(std::size_t)i] == labels[(std::size_t)j])
        lambda += (1.0 - cfg.mu) * degrees[i] * degrees[j] /
                  block_degree[labels[(std::size_t)i]];
      lambda = std::min(lambda, 1.0);
      if (rng.uniform(static_cast<std::uint64_t>(t)) < lambda)
        planted.emplace_back(i, j);
    }
  }
  MultilayerNetwork layer1(N, domain, {planted});

  // Monolayer fit of the planted layer at the granularity of the variant.
  const bool flip = cfg.rho < 0.0;
  const std::int32_t kfit = cfg.variant == BenchmarkVariant::CorrER ? 1
                                                                    : cfg.n_c;
  const BlockPartition fit_part = cfg.variant == BenchmarkVariant::CorrER
                                      ? BlockPartition::single_block(N)
                                      : partition;
  Eigen::MatrixXd p1(kfit, kfit), p2(kfit, kfit), q(kfit, kfit);
  Eigen::VectorXd theta = Eigen::VectorXd::Ones(N);
  const PairMask no_mask{};
  {
    Eigen::MatrixXd edges = Eigen::MatrixXd::Zero(kfit, kfit);
    for (const auto& [i, j] : layer1.layer(0).edges()) {
      const auto r = fit_part.block(i);
      const auto s = fit_part.block(j);
      edges(r, s) += 1.0;
      if (r != s) edges(s, r) += 1.0;
    }
    Eigen::MatrixXd denom;
    if (cfg.variant == BenchmarkVariant::CorrDCSBM) {
      theta = normalized_degrees(layer1, 0).theta;
      denom = bundle_theta_pair_sums(layer1, fit_part, theta, no_mask);
    } else {
      denom = bundle_pair_totals(layer1, fit_part, no_mask);
    }
    for (std::int32_t r = 0; r < kfit; ++r)
      for (std::int32_t s = 0; s < kfit; ++s) {
        const double d = denom(r, s);
        const double v = d > 0.0 ? edges(r, s) / d : 0.0;
        p1(r, s) = v;
        p2(r, s) = flip ? 1.0 - v : v;
        if (v > 0.0 && v < 1.0 && p2(r, s) > 0.0 && p2(r, s) < 1.0) {
          const double lo = std::max(0.0, p1(r, s) + p2(r, s) - 1.0);
          const double hi = std::min(p1(r, s), p2(r, s));
          q(r, s) = std::clamp(q_from_rho(p1(r, s), p2(r, s), cfg.rho), lo,
                               hi);
        } else {
          q(r, s) = p1(r, s) * p2(r, s);  // degenerate bundle: independent
        }
      }
  }

  // Second layer, conditional on the realized first layer.
  EdgeList second;
  std::int64_t clamped = 0;
  {
    const CounterRng rng(cfg.seed, kStreamLayer2);
    const bool dc = cfg.variant == BenchmarkVariant::CorrDCSBM;
    for (std::int64_t t = 0; t < total; ++t) {
      const auto [i, j] = domain.pair_at(N, t);
      const auto r = fit_part.block(i);
      const auto s = fit_part.block(j);
      double p1ij = p1(r, s), p2ij = p2(r, s), qij = q(r, s);
      if (dc) {
        const double x = theta[i] * theta[j];
        p1ij *= x;
        p2ij *= x;
        qij *= x;
        if (clamp_pair_probs(p1ij, p2ij, qij)) ++clamped;
      }
      const bool a = layer1.layer(0).has(layer1.key(i, j));
      double cond;
      if (a) {
        cond = p1ij > 0.0 ? qij / p1ij : p2ij;
      } else {
        cond = p1ij < 1.0 ? (p2ij - qij) / (1.0 - p1ij) : p2ij;
      }
      if (rng.uniform(static_cast<std::uint64_t>(t)) < cond)
        second.emplace_back(i, j);
    }
  }

  GeneratedInstance out{
      MultilayerNetwork(N, domain, {planted, std::move(second)}),
      partition,
      std::move(degrees),
      std::move(p1),
      std::move(p2),
      std::move(q),
      clamped,
      cfg.seed};
  return out;
}

}  // namespace corrnet
