#include "corrnet/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace corrnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_counts(const PairCounts& c) {
  if (c.e11 < 0 || c.e10 < 0 || c.e01 < 0 || c.e00 < 0)
    fail(Err::DimensionMismatch, "negative joint count");
}

// ML correlation from joint counts (the counts form of the Pearson
// correlation of the fitted margins). Empty when a layer is empty or
// complete within the observed pairs.
std::optional<double> rho_from_counts(const PairCounts& c) {
  const double m1 = static_cast<double>(c.e11 + c.e10);
  const double m2 = static_cast<double>(c.e11 + c.e01);
  const double a0 = static_cast<double>(c.e01 + c.e00);  // pairs without a
  const double b0 = static_cast<double>(c.e10 + c.e00);  // pairs without b
  if (m1 == 0.0 || m2 == 0.0 || a0 == 0.0 || b0 == 0.0) return std::nullopt;
  const double num = static_cast<double>(c.e00) * static_cast<double>(c.e11) -
                     static_cast<double>(c.e10) * static_cast<double>(c.e01);
  return num / std::sqrt(m1 * m2 * a0 * b0);
}

}  // namespace

CorrERParams fit_corr_er(const PairCounts& counts) {
  check_counts(counts);
  const std::int64_t T = counts.total();
  if (T <= 0) fail(Err::EmptyInput, "no observed pairs");
  CorrERParams p;
  p.p1 = static_cast<double>(counts.e11 + counts.e10) / static_cast<double>(T);
  p.p2 = static_cast<double>(counts.e11 + counts.e01) / static_cast<double>(T);
  p.q = static_cast<double>(counts.e11) / static_cast<double>(T);
  p.rho = rho_from_counts(counts);
  return p;
}

std::optional<double> effective_correlation(const PairCounts& counts) {
  check_counts(counts);
  if (counts.total() <= 0) fail(Err::EmptyInput, "no observed pairs");
  return rho_from_counts(counts);
}

double pearson_from_params(double p1, double p2, double q) {
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0))
    fail(Err::DegenerateMarginal,
         "correlation undefined for marginal probabilities 0 or 1");
  return (q - p1 * p2) / std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
}

bool feasible_corr_er(double p1, double p2, double q) {
  return p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0 && q >= 0.0 &&
         q <= p1 && q <= p2 && p1 + p2 <= 1.0 + q;
}

CorrERParams CorrSBMParams::bundle(std::int32_t r, std::int32_t s) const {
  if (r < 0 || r >= k || s < 0 || s >= k)
    fail(Err::DimensionMismatch, "bundle index outside partition");
  if (!fitted(r, s))
    fail(Err::MissingBundleFit, "bundle (" + std::to_string(r) + ", " +
                                    std::to_string(s) +
                                    ") has no observed pairs");
  CorrERParams out{p1(r, s), p2(r, s), q(r, s), std::nullopt};
  if (rho_defined(r, s)) out.rho = rho(r, s);
  return out;
}

namespace {

CorrSBMParams empty_sbm(std::int32_t k, bool canonical) {
  CorrSBMParams p;
  p.k = k;
  p.canonical = canonical;
  p.p1 = Eigen::MatrixXd::Constant(k, k, kNaN);
  p.p2 = Eigen::MatrixXd::Constant(k, k, kNaN);
  p.q = Eigen::MatrixXd::Constant(k, k, kNaN);
  p.rho = Eigen::MatrixXd::Constant(k, k, kNaN);
  p.rho_defined = BoolGrid::Constant(k, k, false);
  p.fitted = BoolGrid::Constant(k, k, false);
  return p;
}

void store_bundle(CorrSBMParams& out, std::int32_t r, std::int32_t s,
                  double p1, double p2, double q,
                  const std::optional<double>& rho) {
  const auto put = [&](std::int32_t rr, std::int32_t ss) {
    out.p1(rr, ss) = p1;
    out.p2(rr, ss) = p2;
    out.q(rr, ss) = q;
    out.fitted(rr, ss) = true;
    if (rho) {
      out.rho(rr, ss) = *rho;
      out.rho_defined(rr, ss) = true;
    }
  };
  put(r, s);
  if (out.canonical && r != s) put(s, r);
}

}  // namespace

CorrSBMParams fit_corr_sbm(const BundleCounts& counts) {
  CorrSBMParams out = empty_sbm(counts.k(), counts.canonical());
  bool any = false;
  for (std::int32_t r = 0; r < counts.k(); ++r)
    for (std::int32_t s = counts.canonical() ? r : 0; s < counts.k(); ++s) {
      const auto& cell = counts.at(r, s);
      check_counts(cell);
      const std::int64_t T = cell.total();
      if (T <= 0) continue;
      any = true;
      const double dT = static_cast<double>(T);
      store_bundle(out, r, s,
                   static_cast<double>(cell.e11 + cell.e10) / dT,
                   static_cast<double>(cell.e11 + cell.e01) / dT,
                   static_cast<double>(cell.e11) / dT, rho_from_counts(cell));
    }
  if (!any) fail(Err::EmptyInput, "no bundle has observed pairs");
  return out;
}

// ---------------------------------------------------------------------------
// Approximate degree-corrected fit.

namespace {

// Normalized per-pair sufficient statistics of one bundle.
struct BundleStats {
  double e11, e10, e01, e00;  // counts / T
  double g10, g01, f1, f2;    // degree-correction sums / T
};

// Stationarity residual of the first-order likelihood, per observed pair.
Eigen::Vector3d dc_residual(const BundleStats& st, const Eigen::Vector3d& v) {
  const double p1 = v[0], p2 = v[1], q = v[2];
  const double A = p1 - q, B = p2 - q, D = 1.0 - p1 - p2 + q;
  const double T1 = 1.0 - p2 + q / 2.0, T2 = p2 - q / 2.0;
  const double U1 = p1 - q / 2.0, U2 = 1.0 - p1 + q / 2.0;
  const double W = st.f1 * (1.0 + p1 - p2) + st.f2 * (1.0 - p1 + p2);
  Eigen::Vector3d r;
  r[0] = st.e10 / A - st.e00 / D + 0.5 * st.g10 * q / (A * A) -
         (st.f1 * T1 + st.f2 * T2) / (D * D);
  r[1] = st.e01 / B - st.e00 / D + 0.5 * st.g01 * q / (B * B) -
         (st.f1 * U1 + st.f2 * U2) / (D * D);
  r[2] = st.e11 / q - st.e10 / A - st.e01 / B + st.e00 / D -
         0.5 * st.g10 * p1 / (A * A) - 0.5 * st.g01 * p2 / (B * B) +
         0.5 * W / (D * D);
  return r;
}

Eigen::Matrix3d dc_jacobian(const BundleStats& st, const Eigen::Vector3d& v) {
  const double p1 = v[0], p2 = v[1], q = v[2];
  const double A = v[0] - q, B = v[1] - q, D = 1.0 - p1 - p2 + q;
  const double A2 = A * A, A3 = A2 * A;
  const double B2 = B * B, B3 = B2 * B;
  const double D2 = D * D, D3 = D2 * D;
  const double T1 = 1.0 - p2 + q / 2.0, T2 = p2 - q / 2.0;
  const double U1 = p1 - q / 2.0, U2 = 1.0 - p1 + q / 2.0;
  const double FT = st.f1 * T1 + st.f2 * T2;
  const double FU = st.f1 * U1 + st.f2 * U2;
  const double dF = st.f1 - st.f2;
  const double W = st.f1 * (1.0 + p1 - p2) + st.f2 * (1.0 - p1 + p2);
  Eigen::Matrix3d J;
  J(0, 0) = -st.e10 / A2 - st.e00 / D2 - st.g10 * q / A3 - 2.0 * FT / D3;
  J(0, 1) = -st.e00 / D2 + dF / D2 - 2.0 * FT / D3;
  J(0, 2) = st.e10 / A2 + st.e00 / D2 +
            0.5 * st.g10 * (1.0 / A2 + 2.0 * q / A3) - 0.5 * dF / D2 +
            2.0 * FT / D3;
  J(1, 0) = -st.e00 / D2 - dF / D2 - 2.0 * FU / D3;
  J(1, 1) = -st.e01 / B2 - st.e00 / D2 - st.g01 * q / B3 - 2.0 * FU / D3;
  J(1, 2) = st.e01 / B2 + st.e00 / D2 +
            0.5 * st.g01 * (1.0 / B2 + 2.0 * q / B3) + 0.5 * dF / D2 +
            2.0 * FU / D3;
  J(2, 0) = st.e10 / A2 + st.e00 / D2 - 0.5 * st.g10 / A2 +
            st.g10 * p1 / A3 + 0.5 * dF / D2 + W / D3;
  J(2, 1) = st.e01 / B2 + st.e00 / D2 - 0.5 * st.g01 / B2 +
            st.g01 * p2 / B3 - 0.5 * dF / D2 + W / D3;
  J(2, 2) = -st.e11 / (q * q) - st.e10 / A2 - st.e01 / B2 - st.e00 / D2 -
            st.g10 * p1 / A3 - st.g01 * p2 / B3 - W / D3;
  return J;
}

bool dc_interior(const Eigen::Vector3d& v) {
  const double p1 = v[0], p2 = v[1], q = v[2];
  return q > 0.0 && p1 - q > 0.0 && p2 - q > 0.0 && 1.0 - p1 - p2 + q > 0.0;
}

constexpr double kDcTol = 1e-10;
constexpr int kDcMaxIter = 100;

// Damped Newton refinement. Returns true on convergence; v holds the last
// accepted iterate either way.
bool dc_newton(const BundleStats& st, Eigen::Vector3d& v) {
  Eigen::Vector3d r = dc_residual(st, v);
  double norm = r.cwiseAbs().maxCoeff();
  for (int iter = 0; iter < kDcMaxIter; ++iter) {
    if (norm <= kDcTol) return true;
    const Eigen::Matrix3d J = dc_jacobian(st, v);
    const Eigen::Vector3d step = J.partialPivLu().solve(-r);
    if (!step.allFinite()) return false;
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= 1e-12) {
      const Eigen::Vector3d w = v + lambda * step;
      if (dc_interior(w)) {
        const Eigen::Vector3d rw = dc_residual(st, w);
        const double wnorm = rw.cwiseAbs().maxCoeff();
        if (std::isfinite(wnorm) && wnorm <= (1.0 - 1e-4 * lambda) * norm) {
          v = w;
          r = rw;
          norm = wnorm;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return norm <= kDcTol;
  }
  return norm <= kDcTol;
}

std::optional<double> propensity_rho(double p1, double p2, double q) {
  if (p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0)
    return (q - p1 * p2) / std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
  return std::nullopt;
}

CorrDCSBMParams empty_dcsbm(std::int32_t k, bool canonical,
                            const NormalizedDegrees& theta_a,
                            const NormalizedDegrees& theta_b) {
  CorrDCSBMParams out;
  out.base = empty_sbm(k, canonical);
  out.theta1 = theta_a.theta;
  out.theta2 = theta_b.theta;
  out.status = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic>::Constant(
      k, k, static_cast<int>(BundleFitStatus::Boundary));
  return out;
}

void store_dc_bundle(CorrDCSBMParams& out, std::int32_t r, std::int32_t s,
                     const Eigen::Vector3d& v, BundleFitStatus status) {
  store_bundle(out.base, r, s, v[0], v[1], v[2],
               propensity_rho(v[0], v[1], v[2]));
  out.status(r, s) = static_cast<int>(status);
  if (out.base.canonical && r != s) out.status(s, r) = static_cast<int>(status);
}

}  // namespace

CorrDCSBMParams fit_corr_dcsbm_approx(const BundleCounts& counts,
                                      const DegreeCorrectionSums& sums,
                                      const NormalizedDegrees& theta_a,
                                      const NormalizedDegrees& theta_b) {
  if (sums.k() != counts.k() || sums.canonical() != counts.canonical())
    fail(Err::DimensionMismatch,
         "degree-correction sums do not match the bundle table");
  CorrDCSBMParams out =
      empty_dcsbm(counts.k(), counts.canonical(), theta_a, theta_b);
  bool any = false;
  for (std::int32_t r = 0; r < counts.k(); ++r)
    for (std::int32_t s = counts.canonical() ? r : 0; s < counts.k(); ++s) {
      const auto& cell = counts.at(r, s);
      check_counts(cell);
      const std::int64_t T = cell.total();
      if (T <= 0) continue;
      any = true;
      const double dT = static_cast<double>(T);
      Eigen::Vector3d v(
          static_cast<double>(cell.e11 + cell.e10) / dT,
          static_cast<double>(cell.e11 + cell.e01) / dT,
          static_cast<double>(cell.e11) / dT);
      if (cell.e11 == 0 || cell.e10 == 0 || cell.e01 == 0 || cell.e00 == 0) {
        // Zeroth-order solution sits on the feasibility boundary; the
        // refinement system is singular there and the closed form stands.
        store_dc_bundle(out, r, s, v, BundleFitStatus::Boundary);
        continue;
      }
      const auto& dc = sums.at(r, s);
      const BundleStats st{static_cast<double>(cell.e11) / dT,
                           static_cast<double>(cell.e10) / dT,
                           static_cast<double>(cell.e01) / dT,
                           static_cast<double>(cell.e00) / dT,
                           dc.g10 / dT,
                           dc.g01 / dT,
                           dc.f1 / dT,
                           dc.f2 / dT};
      Eigen::Vector3d refined = v;
      if (dc_newton(st, refined)) {
        store_dc_bundle(out, r, s, refined, BundleFitStatus::Converged);
      } else {
        store_dc_bundle(out, r, s, v, BundleFitStatus::FallbackZerothOrder);
      }
    }
  if (!any) fail(Err::EmptyInput, "no bundle has observed pairs");
  return out;
}

// ---------------------------------------------------------------------------
// Full degree-corrected likelihood.

namespace {

// Pair-level data of one bundle, grouped by joint outcome. Constants that
// only shift the likelihood are dropped: the (1,1) cells contribute
// e11 * log q, the (1,0) cells log(p1 - c q) with c = sqrt(y/x), the (0,1)
// cells log(p2 - c q) with c = sqrt(x/y), and the (0,0) cells
// log(1 - x p1 - y p2 + z q), where x and y are the two theta products and
// z = sqrt(x y).
struct FullBundleData {
  std::int64_t n11 = 0;
  std::vector<double> c10, c01;
  std::vector<double> x00, y00, z00;
  std::int64_t pairs() const {
    return n11 + static_cast<std::int64_t>(c10.size() + c01.size() +
                                           x00.size());
  }
};

double full_loglik(const FullBundleData& d, const Eigen::Vector3d& v) {
  const double p1 = v[0], p2 = v[1], q = v[2];
  if (q <= 0.0 && d.n11 > 0) return -std::numeric_limits<double>::infinity();
  double L = d.n11 > 0 ? static_cast<double>(d.n11) * std::log(q) : 0.0;
  for (const double c : d.c10) {
    const double arg = p1 - c * q;
    if (arg <= 0.0) return -std::numeric_limits<double>::infinity();
    L += std::log(arg);
  }
  for (const double c : d.c01) {
    const double arg = p2 - c * q;
    if (arg <= 0.0) return -std::numeric_limits<double>::infinity();
    L += std::log(arg);
  }
  for (std::size_t t = 0; t < d.x00.size(); ++t) {
    const double arg = 1.0 - d.x00[t] * p1 - d.y00[t] * p2 + d.z00[t] * q;
    if (arg <= 0.0) return -std::numeric_limits<double>::infinity();
    L += std::log(arg);
  }
  return L;
}

void full_grad_hess(const FullBundleData& d, const Eigen::Vector3d& v,
                    Eigen::Vector3d& g, Eigen::Matrix3d& H) {
  const double p1 = v[0], p2 = v[1], q = v[2];
  g.setZero();
  H.setZero();
  if (d.n11 > 0) {
    g[2] += static_cast<double>(d.n11) / q;
    H(2, 2) -= static_cast<double>(d.n11) / (q * q);
  }
  for (const double c : d.c10) {
    const double inv = 1.0 / (p1 - c * q);
    const double inv2 = inv * inv;
    g[0] += inv;
    g[2] -= c * inv;
    H(0, 0) -= inv2;
    H(0, 2) += c * inv2;
    H(2, 2) -= c * c * inv2;
  }
  for (const double c : d.c01) {
    const double inv = 1.0 / (p2 - c * q);
    const double inv2 = inv * inv;
    g[1] += inv;
    g[2] -= c * inv;
    H(1, 1) -= inv2;
    H(1, 2) += c * inv2;
    H(2, 2) -= c * c * inv2;
  }
  for (std::size_t t = 0; t < d.x00.size(); ++t) {
    const double x = d.x00[t], y = d.y00[t], z = d.z00[t];
    const double inv = 1.0 / (1.0 - x * p1 - y * p2 + z * q);
    const double inv2 = inv * inv;
    g[0] -= x * inv;
    g[1] -= y * inv;
    g[2] += z * inv;
    H(0, 0) -= x * x * inv2;
    H(0, 1) -= x * y * inv2;
    H(0, 2) += x * z * inv2;
    H(1, 1) -= y * y * inv2;
    H(1, 2) += y * z * inv2;
    H(2, 2) -= z * z * inv2;
  }
  H(1, 0) = H(0, 1);
  H(2, 0) = H(0, 2);
  H(2, 1) = H(1, 2);
}

// Shrinks the starting point into the open pair-level feasible set.
Eigen::Vector3d project_feasible(const FullBundleData& d, Eigen::Vector3d v,
                                 std::int32_t r, std::int32_t s) {
  const auto bundle_name = "(" + std::to_string(r) + ", " + std::to_string(s) +
                           ")";
  if (v[2] <= 0.0) v[2] = 1e-12;
  double cmax = 0.0;
  for (const double c : d.c10) cmax = std::max(cmax, c);
  if (cmax > 0.0 && v[2] >= v[0] / cmax) v[2] = 0.95 * v[0] / cmax;
  cmax = 0.0;
  for (const double c : d.c01) cmax = std::max(cmax, c);
  if (cmax > 0.0 && v[2] >= v[1] / cmax) v[2] = 0.95 * v[1] / cmax;
  for (int attempt = 0; attempt < 200; ++attempt) {
    if (std::isfinite(full_loglik(d, v))) return v;
    v *= 0.9;  // the origin is strictly feasible for the (0,0) constraints
  }
  fail(Err::InfeasibleStart,
       "no interior starting point for bundle " + bundle_name);
}

constexpr int kFullMaxIter = 200;

Eigen::Vector3d full_newton(const FullBundleData& d, Eigen::Vector3d v,
                            std::int32_t r, std::int32_t s) {
  const double scale = static_cast<double>(std::max<std::int64_t>(
      d.pairs(), 1));
  const double gtol = 1e-9 * scale;
  double L = full_loglik(d, v);
  Eigen::Vector3d g;
  Eigen::Matrix3d H;
  for (int iter = 0; iter < kFullMaxIter; ++iter) {
    full_grad_hess(d, v, g, H);
    if (g.cwiseAbs().maxCoeff() <= gtol) return v;
    Eigen::Vector3d step = H.partialPivLu().solve(-g);
    if (!step.allFinite() || g.dot(step) <= 0.0)
      step = g / scale;  // fall back to scaled ascent direction
    double lambda = 1.0;
    bool accepted = false;
    const double slope = g.dot(step);
    while (lambda >= 1e-14) {
      const Eigen::Vector3d w = v + lambda * step;
      const double Lw = full_loglik(d, w);
      if (std::isfinite(Lw) && Lw >= L + 1e-4 * lambda * slope) {
        v = w;
        L = Lw;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // No ascent left at line-search resolution: accept if the gradient
      // is small relative to machine precision at this likelihood scale.
      if (g.cwiseAbs().maxCoeff() <= 1e-6 * scale) return v;
      fail(Err::NonConvergence, "full-likelihood ascent stalled in bundle (" +
                                    std::to_string(r) + ", " +
                                    std::to_string(s) + ")");
    }
  }
  full_grad_hess(d, v, g, H);
  if (g.cwiseAbs().maxCoeff() <= 1e-6 * scale) return v;
  fail(Err::NonConvergence,
       "full-likelihood fit did not converge in bundle (" + std::to_string(r) +
           ", " + std::to_string(s) + ")");
}

}  // namespace

CorrDCSBMParams fit_corr_dcsbm_full(const MultilayerNetwork& net,
                                    const BlockPartition& partition,
                                    int layer_a, int layer_b,
                                    const NormalizedDegrees& theta_a,
                                    const NormalizedDegrees& theta_b,
                                    const PairMask& mask) {
  const BundleCounts counts =
      bundle_cooccurrence(net, partition, layer_a, layer_b, mask);
  const DegreeCorrectionSums sums = degree_correction_sums(
      net, partition, layer_a, layer_b, theta_a, theta_b, mask);
  CorrDCSBMParams init =
      fit_corr_dcsbm_approx(counts, sums, theta_a, theta_b);

  // Group observed pairs by bundle.
  const auto k = partition.k();
  const bool canonical = counts.canonical();
  const auto n = net.num_nodes();
  const auto& domain = net.domain();
  const auto& a = net.layer(layer_a);
  const auto& b = net.layer(layer_b);
  const auto& ta = theta_a.theta;
  const auto& tb = theta_b.theta;
  std::vector<FullBundleData> data(
      static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  const auto slot = [&](std::int32_t i, std::int32_t j) {
    auto r = partition.block(i);
    auto s = partition.block(j);
    if (canonical && r > s) std::swap(r, s);
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(k) +
           static_cast<std::size_t>(s);
  };
  const std::int64_t total = net.pair_count();
  for (std::int64_t t = 0; t < total; ++t) {
    const auto [i, j] = domain.pair_at(n, t);
    const auto key = domain.key_of(n, i, j);
    if (mask.hides(key)) continue;
    auto& d = data[slot(i, j)];
    const bool a1 = a.has(key);
    const bool a2 = b.has(key);
    const double x = ta[i] * ta[j];
    const double y = tb[i] * tb[j];
    if (a1 && a2) {
      d.n11 += 1;
    } else if (a1) {
      d.c10.push_back(std::sqrt(y / x));
    } else if (a2) {
      d.c01.push_back(std::sqrt(x / y));
    } else {
      d.x00.push_back(x);
      d.y00.push_back(y);
      d.z00.push_back(std::sqrt(x * y));
    }
  }

  CorrDCSBMParams out = empty_dcsbm(k, canonical, theta_a, theta_b);
  for (std::int32_t r = 0; r < k; ++r)
    for (std::int32_t s = canonical ? r : 0; s < k; ++s) {
      const auto& cell = counts.at(r, s);
      if (cell.total() <= 0) continue;
      Eigen::Vector3d v(init.base.p1(r, s), init.base.p2(r, s),
                        init.base.q(r, s));
      if (cell.e11 == 0 || cell.e10 == 0 || cell.e01 == 0 || cell.e00 == 0) {
        // Interior stationarity does not hold with an empty outcome cell;
        // keep the closed-form boundary estimates.
        store_dc_bundle(out, r, s, v, BundleFitStatus::Boundary);
        continue;
      }
      const auto& d =
          data[static_cast<std::size_t>(r) * static_cast<std::size_t>(k) +
               static_cast<std::size_t>(s)];
      v = project_feasible(d, v, r, s);
      v = full_newton(d, v, r, s);
      store_dc_bundle(out, r, s, v, BundleFitStatus::Converged);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Pair-level correlations.

double pair_correlation(const CorrDCSBMParams& params,
                        const BlockPartition& partition, std::int32_t i,
                        std::int32_t j, PairCorrelationMode mode) {
  if (i < 0 || j < 0 || i >= partition.size() || j >= partition.size())
    fail(Err::OutOfRangeNode, "pair endpoint outside the partition");
  if (params.theta1.size() != partition.size() ||
      params.theta2.size() != partition.size())
    fail(Err::DimensionMismatch, "theta length does not match partition");
  const auto r = partition.block(i);
  const auto s = partition.block(j);
  const CorrERParams bundle = params.base.bundle(r, s);
  const double p1 = bundle.p1, p2 = bundle.p2, q = bundle.q;
  const double x = params.theta1[i] * params.theta1[j];
  const double y = params.theta2[i] * params.theta2[j];

  const auto exact = [&]() {
    const double p1ij = x * p1;
    const double p2ij = y * p2;
    const double qij = std::sqrt(x * y) * q;
    const double var1 = p1ij * (1.0 - p1ij);
    const double var2 = p2ij * (1.0 - p2ij);
    if (var1 <= 0.0 || var2 <= 0.0)
      fail(Err::DegeneratePairVariance,
           "pair-level marginal has zero variance");
    return (qij - p1ij * p2ij) / std::sqrt(var1 * var2);
  };

  switch (mode) {
    case PairCorrelationMode::Exact:
      return exact();
    case PairCorrelationMode::FirstOrder: {
      const double eps1 = x - 1.0;
      const double eps2 = y - 1.0;
      const double dq = q - p1 * p2;
      if (p1 <= 0.0 || p1 >= 1.0 || p2 <= 0.0 || p2 >= 1.0 || dq == 0.0)
        return exact();
      const double t1 = 0.5 * eps1 * p1 / (1.0 - p1);
      const double t2 = 0.5 * eps2 * p2 / (1.0 - p2);
      const double t3 = 0.5 * (eps1 + eps2) * p1 * p2 / dq;
      // First-order corrections approaching unit size signal a denominator
      // of the same order as the expansion parameter.
      if (std::abs(t1) >= 0.5 || std::abs(t2) >= 0.5 || std::abs(t3) >= 0.5)
        return exact();
      const double rho = pearson_from_params(p1, p2, q);
      return rho * (1.0 + t1 + t2 - t3);
    }
    case PairCorrelationMode::IndependentCase: {
      if (std::abs(q - p1 * p2) > 1e-12)
        fail(Err::InfeasibleParams,
             "independent-case correlation requires q = p1 * p2");
      if (p1 <= 0.0 || p1 >= 1.0 || p2 <= 0.0 || p2 >= 1.0)
        fail(Err::DegeneratePairVariance,
             "pair-level marginal has zero variance");
      const double eps1 = x - 1.0;
      const double eps2 = y - 1.0;
      return -0.5 * (eps1 + eps2) * std::sqrt(p1 / (1.0 - p1)) *
             std::sqrt(p2 / (1.0 - p2));
    }
  }
  fail(Err::InfeasibleParams, "unknown pair correlation mode");
}

// ---------------------------------------------------------------------------
// Fisher information.

FisherReport er_fisher_variance(const CorrERParams& params,
                                std::int64_t num_pairs) {
  if (num_pairs <= 0) fail(Err::EmptyInput, "Fisher variance needs pairs");
  const double p1 = params.p1, p2 = params.p2, q = params.q;
  const double cells[4] = {q, p1 - q, p2 - q, 1.0 - p1 - p2 + q};
  for (const double c : cells)
    if (!(c > 0.0))
      fail(Err::SingularInformation,
           "Fisher information singular at boundary parameters");
  static const Eigen::Vector3d grads[4] = {
      {0.0, 0.0, 1.0}, {1.0, 0.0, -1.0}, {0.0, 1.0, -1.0}, {-1.0, -1.0, 1.0}};
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  for (int c = 0; c < 4; ++c)
    info += grads[c] * grads[c].transpose() / cells[c];
  info *= static_cast<double>(num_pairs);

  const Eigen::LLT<Eigen::Matrix3d> llt(info);
  if (llt.info() != Eigen::Success)
    fail(Err::SingularInformation, "Fisher information not invertible");
  const Eigen::Matrix3d cov = llt.solve(Eigen::Matrix3d::Identity());

  FisherReport out;
  out.estimate = {p1, p2, q};
  out.covariance = cov;
  constexpr double z95 = 1.96;
  for (int t = 0; t < 3; ++t) {
    const double var = cov(t, t);
    if (!(var > 0.0))
      fail(Err::SingularInformation, "non-positive Fisher variance");
    out.variance[static_cast<std::size_t>(t)] = var;
    const double half = z95 * std::sqrt(var);
    out.ci95[static_cast<std::size_t>(t)] = {
        out.estimate[static_cast<std::size_t>(t)] - half,
        out.estimate[static_cast<std::size_t>(t)] + half};
  }
  return out;
}

}  // namespace corrnet
