// Acceptance gate: end-to-end checks of estimation, generation and
// prediction against pinned numerical targets. Each criterion prints
// exactly one PASS / FAIL / SKIP line with the measured values behind the
// verdict; the process exits nonzero iff any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corrnet/counts.hpp"
#include "corrnet/error.hpp"
#include "corrnet/estimators.hpp"
#include "corrnet/generators.hpp"
#include "corrnet/io.hpp"
#include "corrnet/network.hpp"
#include "corrnet/prediction.hpp"
#include "corrnet/rng.hpp"

namespace {

using namespace corrnet;
using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

std::string fmt_s(double seconds) { return fmt(seconds, 3) + "s"; }

struct Outcome {
  bool pass = false;
  bool skip = false;
  std::string detail;
  std::vector<std::string> notes;
};

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

const ModelCvResult& result_for(const PredictionReport& rep, ModelKind kind) {
  for (const auto& m : rep.models)
    if (m.kind == kind) return m;
  throw std::runtime_error("model kind missing from report");
}

// Criterion 1: closed-form estimates recover known parameters and the
// information-based intervals have the right coverage and width scaling.
Outcome criterion1() {
  const auto t0 = Clock::now();
  const CorrERParams truth{0.1, 0.085, 0.05, std::nullopt};
  const std::array<double, 3> tval{truth.p1, truth.p2, truth.q};
  const std::vector<std::int32_t> sizes{250, 500, 1000, 2000};
  const int reps = 100;
  const EdgeDomain domain = EdgeDomain::undirected();

  int min_cover = reps;
  std::vector<double> log_n, log_w;
  for (const auto n : sizes) {
    std::array<int, 3> cover{0, 0, 0};
    double width_sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto seed = static_cast<std::uint64_t>(n) * 1009u + rep;
      const auto net = sample_corr_er(n, domain, truth, seed);
      const auto counts = global_cooccurrence(net, 0, 1, PairMask::full());
      const auto fit = fit_corr_er(counts);
      const auto fisher = er_fisher_variance(fit, counts.total());
      for (int t = 0; t < 3; ++t) {
        const double lo = fisher.ci95[static_cast<std::size_t>(t)][0];
        const double hi = fisher.ci95[static_cast<std::size_t>(t)][1];
        if (tval[static_cast<std::size_t>(t)] >= lo &&
            tval[static_cast<std::size_t>(t)] <= hi)
          ++cover[static_cast<std::size_t>(t)];
        width_sum += hi - lo;
      }
    }
    for (const auto c : cover) min_cover = std::min(min_cover, c);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_w.push_back(std::log(width_sum / (3.0 * reps)));
  }
  const double slope = ls_slope(log_n, log_w);
  const double secs = elapsed(t0);

  Outcome out;
  out.pass = min_cover >= 90 && std::abs(slope + 1.0) <= 0.15 && secs <= 120.0;
  out.detail = "per-parameter coverage >= " + std::to_string(min_cover) + "/" +
               std::to_string(reps) +
               " over N in {250,500,1000,2000} (need >= 90), ci width slope " +
               fmt(slope) + " vs -1 +- 0.15, " + fmt_s(secs) + " <= 120s";
  return out;
}

// Criterion 2: bundle counts aggregate to the global counts, so the
// effective correlation is invariant under any block partition.
Outcome criterion2() {
  SequentialRng rng(20260819);
  const EdgeDomain domain = EdgeDomain::undirected();
  int cells_mismatch = 0, undefined = 0;
  double max_delta = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto n = static_cast<std::int32_t>(40 + rng.below(61));
    const double p1 = 0.05 + 0.4 * rng.uniform();
    const double p2 = 0.05 + 0.4 * rng.uniform();
    const double hi = std::min(p1, p2);
    const double q = hi * (0.1 + 0.8 * rng.uniform());
    const auto net = sample_corr_er(n, domain, {p1, p2, q, std::nullopt},
                                    5000u + static_cast<std::uint64_t>(i));
    const auto k = static_cast<std::int32_t>(1 + rng.below(6));
    std::vector<std::int32_t> labels(static_cast<std::size_t>(n));
    for (auto& b : labels) b = static_cast<std::int32_t>(rng.below(k));
    const BlockPartition part(labels, k);

    const auto bundles = bundle_cooccurrence(net, part, 0, 1, PairMask::full());
    const auto agg = bundles.aggregate();
    const auto glob = global_cooccurrence(net, 0, 1, PairMask::full());
    if (agg.e11 != glob.e11 || agg.e10 != glob.e10 || agg.e01 != glob.e01 ||
        agg.e00 != glob.e00)
      ++cells_mismatch;
    const auto ra = effective_correlation(agg);
    const auto rg = fit_corr_er(glob).rho;
    if (!ra.has_value() || !rg.has_value()) {
      ++undefined;
      continue;
    }
    max_delta = std::max(max_delta, std::abs(*ra - *rg));
  }
  Outcome out;
  out.pass = cells_mismatch == 0 && undefined == 0 && max_delta <= 1e-12;
  out.detail =
      "50 random networks x partitions with K in [1,6]: " +
      std::to_string(cells_mismatch) + " count mismatches, " +
      std::to_string(undefined) + " undefined correlations, max |rho_bundles" +
      " - rho_global| = " + fmt(max_delta, 3) + " <= 1e-12";
  return out;
}

// Criterion 3: on the block benchmark the conditional scorer's pooled AUC
// tracks the closed-form value (1 + |rho|) / 2 across the rho range.
Outcome criterion3() {
  const auto t0 = Clock::now();
  const std::vector<double> rhos{-0.8, -0.4, 0.0, 0.4, 0.8};
  bool all_ok = true;
  std::string parts;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    BenchmarkConfig cfg;
    cfg.N = 2000;
    cfg.mu = 0.3;
    cfg.rho = rhos[i];
    cfg.variant = BenchmarkVariant::CorrSBM;
    cfg.seed = 3100u + static_cast<std::uint64_t>(i);
    const auto inst = make_benchmark(cfg);
    const auto rep = cross_validate(inst.net, inst.partition, 0, 1,
                                    {ModelKind::CorrER}, 5, 771);
    const double auc = result_for(rep, ModelKind::CorrER).roc.auc;
    const double target = (1.0 + std::abs(rhos[i])) / 2.0;
    const bool ok = std::abs(auc - target) <= 0.03;
    all_ok = all_ok && ok;
    if (!parts.empty()) parts += ", ";
    parts += "rho " + fmt(rhos[i], 2) + ": " + fmt(auc) + "/" + fmt(target, 3);
  }
  const double secs = elapsed(t0);
  Outcome out;
  out.pass = all_ok && secs <= 600.0;
  out.detail = "corr-er pooled auc vs (1+|rho|)/2 +- 0.03 at N=2000: " + parts +
               "; " + fmt_s(secs) + " <= 600s";
  return out;
}

// Criterion 4: degree-corrected benchmark ranks the model family as
// expected, with pooled AUCs near their pinned values.
Outcome criterion4() {
  BenchmarkConfig cfg;
  cfg.N = 2000;
  cfg.n_c = 5;
  cfg.mu = 0.3;
  cfg.rho = 0.5;
  cfg.eta_k = -2.0;
  cfg.k_min = 10.0;
  cfg.k_max = 50.0;
  cfg.variant = BenchmarkVariant::CorrDCSBM;
  cfg.seed = 4100;
  const auto inst = make_benchmark(cfg);
  const auto rep = cross_validate(inst.net, inst.partition, 0, 1,
                                  {ModelKind::DCSBM, ModelKind::CorrER,
                                   ModelKind::CorrSBM, ModelKind::CorrDCSBM},
                                  5, 772);
  // Configuration-model variant: the degree-corrected fit on a single block.
  const auto rep_cm =
      cross_validate(inst.net, BlockPartition::single_block(cfg.N), 0, 1,
                     {ModelKind::CorrDCSBM}, 5, 772);

  const double a_mono = result_for(rep, ModelKind::DCSBM).roc.auc;
  const double a_er = result_for(rep, ModelKind::CorrER).roc.auc;
  const double a_sbm = result_for(rep, ModelKind::CorrSBM).roc.auc;
  const double a_dc = result_for(rep, ModelKind::CorrDCSBM).roc.auc;
  const double a_cm = result_for(rep_cm, ModelKind::CorrDCSBM).roc.auc;

  const bool bands = std::abs(a_mono - 0.83) <= 0.04 &&
                     std::abs(a_er - 0.76) <= 0.04 &&
                     std::abs(a_sbm - 0.89) <= 0.04 &&
                     std::abs(a_dc - 0.91) <= 0.04 &&
                     std::abs(a_cm - 0.83) <= 0.04;
  const bool order = a_dc >= a_sbm && a_sbm > a_mono;
  Outcome out;
  out.pass = bands && order;
  out.detail = "pooled auc +- 0.04: dcsbm " + fmt(a_mono) + " (0.83), corr-er " +
               fmt(a_er) + " (0.76), corr-sbm " + fmt(a_sbm) +
               " (0.89), corr-dcsbm " + fmt(a_dc) +
               " (0.91), corr-cm (single block) " + fmt(a_cm) +
               " (0.83); ordering corr-dcsbm >= corr-sbm > dcsbm " +
               (order ? "holds" : "violated");
  return out;
}

// Criterion 5: correlation extremes. Perfectly correlated layers are
// predicted almost perfectly; independent layers leave the conditional
// scorer at chance and the correlated block model at its monolayer value.
Outcome criterion5() {
  BenchmarkConfig cfg;
  cfg.N = 2000;
  cfg.mu = 0.3;
  cfg.variant = BenchmarkVariant::CorrSBM;

  cfg.rho = 1.0;
  cfg.seed = 5100;
  const auto inst1 = make_benchmark(cfg);
  const auto rep1 = cross_validate(inst1.net, inst1.partition, 0, 1,
                                   {ModelKind::CorrER, ModelKind::CorrSBM}, 5,
                                   773);
  const double er1 = result_for(rep1, ModelKind::CorrER).roc.auc;
  const double sbm1 = result_for(rep1, ModelKind::CorrSBM).roc.auc;

  cfg.rho = 0.0;
  cfg.seed = 5200;
  const auto inst0 = make_benchmark(cfg);
  const auto rep0 = cross_validate(
      inst0.net, inst0.partition, 0, 1,
      {ModelKind::SBM, ModelKind::CorrER, ModelKind::CorrSBM}, 5, 774);
  const double er0 = result_for(rep0, ModelKind::CorrER).roc.auc;
  const double sbm0 = result_for(rep0, ModelKind::CorrSBM).roc.auc;
  const double mono0 = result_for(rep0, ModelKind::SBM).roc.auc;

  const bool ok1 = er1 >= 0.999 && sbm1 >= 0.999;
  const bool ok0 = std::abs(er0 - 0.5) <= 0.02 && std::abs(sbm0 - mono0) <= 0.02;
  Outcome out;
  out.pass = ok1 && ok0;
  out.detail = "rho 1: corr-er " + fmt(er1, 5) + ", corr-sbm " + fmt(sbm1, 5) +
               " >= 0.999; rho 0: corr-er " + fmt(er0) +
               " in 0.5 +- 0.02, |corr-sbm - sbm| = " + fmt(std::abs(sbm0 - mono0), 3) +
               " <= 0.02";
  return out;
}

// Criterion 6: at fixed rho the edge-correlation advantage over the purely
// structural fit shrinks as mixing rises and block structure fades.
Outcome criterion6() {
  const std::array<double, 2> mus{0.3, 0.8};
  std::array<double, 2> gap_sbm{}, gap_dc{};
  for (std::size_t i = 0; i < mus.size(); ++i) {
    BenchmarkConfig cfg;
    cfg.N = 2000;
    cfg.mu = mus[i];
    cfg.rho = 0.5;
    cfg.variant = BenchmarkVariant::CorrSBM;
    cfg.seed = 6100u + static_cast<std::uint64_t>(i);
    const auto inst = make_benchmark(cfg);
    const auto rep = cross_validate(inst.net, inst.partition, 0, 1,
                                    {ModelKind::CorrER, ModelKind::CorrSBM}, 5,
                                    775);
    gap_sbm[i] = result_for(rep, ModelKind::CorrSBM).roc.auc -
                 result_for(rep, ModelKind::CorrER).roc.auc;

    BenchmarkConfig dcfg;
    dcfg.N = 2000;
    dcfg.n_c = 5;
    dcfg.mu = mus[i];
    dcfg.rho = 0.5;
    dcfg.eta_k = -2.0;
    dcfg.k_min = 10.0;
    dcfg.k_max = 50.0;
    dcfg.variant = BenchmarkVariant::CorrDCSBM;
    dcfg.seed = 6200u + static_cast<std::uint64_t>(i);
    const auto dinst = make_benchmark(dcfg);
    const auto rep_dc = cross_validate(dinst.net, dinst.partition, 0, 1,
                                       {ModelKind::CorrDCSBM}, 5, 776);
    const auto rep_cm =
        cross_validate(dinst.net, BlockPartition::single_block(dcfg.N), 0, 1,
                       {ModelKind::CorrDCSBM}, 5, 776);
    gap_dc[i] = result_for(rep_dc, ModelKind::CorrDCSBM).roc.auc -
                result_for(rep_cm, ModelKind::CorrDCSBM).roc.auc;
  }
  Outcome out;
  out.pass = gap_sbm[1] < gap_sbm[0] && gap_dc[1] < gap_dc[0];
  out.detail = "auc gaps at rho 0.5, mu 0.3 -> 0.8: corr-sbm - corr-er " +
               fmt(gap_sbm[0], 3) + " -> " + fmt(gap_sbm[1], 3) +
               ", corr-dcsbm - corr-cm " + fmt(gap_dc[0], 3) + " -> " +
               fmt(gap_dc[1], 3) + " (both must shrink)";
  return out;
}

// Criterion 7: the first-order degree-corrected fit matches the full
// likelihood fit on a narrow degree band, degrades on a wide band with an
// overestimation bias for the largest parameters, and is much faster.
struct DcComparison {
  double max_rel = 0.0;
  double t_approx = 0.0;
  double t_full = 0.0;
  // (full value, approx value) sorted by full value, largest first.
  std::vector<std::pair<double, double>> by_size;
};

DcComparison compare_dc_fits(const BenchmarkConfig& cfg) {
  const auto inst = make_benchmark(cfg);
  // Planted propensities: the comparison probes the likelihood
  // approximation at the configured degree band, not realized-degree noise.
  NormalizedDegrees theta;
  theta.theta = inst.degrees / inst.degrees.mean();
  const auto& theta1 = theta;
  const auto& theta2 = theta;
  const auto mask = PairMask::full();

  CorrDCSBMParams approx;
  double t_approx = std::numeric_limits<double>::infinity();
  for (int run = 0; run < 3; ++run) {
    const auto t0 = Clock::now();
    const auto bundles = bundle_cooccurrence(inst.net, inst.partition, 0, 1, mask);
    const auto sums = degree_correction_sums(inst.net, inst.partition, 0, 1,
                                             theta1, theta2, mask);
    approx = fit_corr_dcsbm_approx(bundles, sums, theta1, theta2);
    t_approx = std::min(t_approx, elapsed(t0));
  }
  const auto t1 = Clock::now();
  const auto full = fit_corr_dcsbm_full(inst.net, inst.partition, 0, 1, theta1,
                                        theta2, mask);
  const double t_full = elapsed(t1);

  DcComparison cmp;
  cmp.t_approx = t_approx;
  cmp.t_full = t_full;
  const auto& fb = full.base;
  const auto& ab = approx.base;
  for (std::int32_t r = 0; r < fb.k; ++r)
    for (std::int32_t s = r; s < fb.k; ++s) {
      if (!fb.fitted(r, s)) continue;
      const std::array<std::pair<double, double>, 3> entries{
          std::pair{fb.p1(r, s), ab.p1(r, s)},
          std::pair{fb.p2(r, s), ab.p2(r, s)},
          std::pair{fb.q(r, s), ab.q(r, s)}};
      for (const auto& [f, a] : entries) {
        if (f <= 1e-9) continue;
        cmp.max_rel = std::max(cmp.max_rel, std::abs(a - f) / f);
        cmp.by_size.emplace_back(f, a);
      }
    }
  std::sort(cmp.by_size.begin(), cmp.by_size.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  return cmp;
}

Outcome criterion7() {
  BenchmarkConfig narrow;
  narrow.N = 1000;
  narrow.n_c = 5;
  narrow.mu = 0.3;
  narrow.rho = 0.5;
  narrow.eta_k = 0.0;
  narrow.k_min = 18.0;
  narrow.k_max = 22.0;
  narrow.variant = BenchmarkVariant::CorrDCSBM;
  narrow.seed = 7100;

  BenchmarkConfig wide = narrow;
  wide.eta_k = -2.0;
  wide.k_min = 10.0;
  wide.k_max = 50.0;
  wide.seed = 7200;

  const auto cn = compare_dc_fits(narrow);
  const auto cw = compare_dc_fits(wide);

  int top_over = 0;
  const std::size_t top = std::min<std::size_t>(3, cw.by_size.size());
  for (std::size_t i = 0; i < top; ++i)
    if (cw.by_size[i].second > cw.by_size[i].first) ++top_over;
  const bool largest_over =
      !cw.by_size.empty() && cw.by_size[0].second > cw.by_size[0].first;

  const double ratio_n = cn.t_full / cn.t_approx;
  const double ratio_w = cw.t_full / cw.t_approx;
  const bool speed = std::min(ratio_n, ratio_w) >= 10.0;

  Outcome out;
  out.pass = cn.max_rel <= 0.02 && cw.max_rel > cn.max_rel && largest_over &&
             top_over >= 2 && speed;
  out.detail = "approx vs full fit: narrow band max rel diff " +
               fmt(100.0 * cn.max_rel, 3) + "% <= 2%, wide band " +
               fmt(100.0 * cw.max_rel, 3) + "% > narrow, largest params " +
               "overestimated (top3 " + std::to_string(top_over) +
               "/3), speedup " + fmt(ratio_n, 3) + "x / " + fmt(ratio_w, 3) +
               "x >= 10x";
  out.notes.push_back(
      "note: the narrow-band degree bounds are quoted inconsistently "
      "upstream (k_max 22 in the text, 20 in the caption); this gate uses "
      "k in [18, 22]");
  return out;
}

// Criterion 8: the joint and sequential samplers reproduce the four-cell
// distribution: chi-square GOF with 3 dof at the 0.01 level.
Outcome criterion8() {
  constexpr double kChi3Q99 = 11.344866730144373;
  const std::int32_t n = 448;  // 100128 pairs
  const EdgeDomain domain = EdgeDomain::undirected();
  SequentialRng rng(888);
  int below_count = 0;
  double max_stat = 0.0;
  std::int64_t pairs = 0;
  for (int t = 0; t < 10; ++t) {
    const double p1 = 0.1 + 0.35 * rng.uniform();
    const double p2 = 0.1 + 0.35 * rng.uniform();
    const double rho = -0.7 + 1.4 * rng.uniform();
    const double hi = std::min(p1, p2);
    const double q =
        std::clamp(q_from_rho(p1, p2, rho), 0.2 * hi, 0.8 * hi);
    const CorrERParams params{p1, p2, q, std::nullopt};
    const auto seed = 7000u + static_cast<std::uint64_t>(t);
    for (const bool sequential : {false, true}) {
      const auto net = sequential
                           ? sample_corr_er_sequential(n, domain, params, seed)
                           : sample_corr_er(n, domain, params, seed);
      const auto c = global_cooccurrence(net, 0, 1, PairMask::full());
      const double T = static_cast<double>(c.total());
      pairs = c.total();
      const std::array<double, 4> expected{T * q, T * (p1 - q), T * (p2 - q),
                                           T * (1.0 - p1 - p2 + q)};
      const std::array<double, 4> observed{
          static_cast<double>(c.e11), static_cast<double>(c.e10),
          static_cast<double>(c.e01), static_cast<double>(c.e00)};
      double stat = 0.0;
      for (int cell = 0; cell < 4; ++cell) {
        const double d = observed[static_cast<std::size_t>(cell)] -
                         expected[static_cast<std::size_t>(cell)];
        stat += d * d / expected[static_cast<std::size_t>(cell)];
      }
      max_stat = std::max(max_stat, stat);
      if (stat < kChi3Q99) ++below_count;
    }
  }
  Outcome out;
  out.pass = below_count == 20;
  out.detail = std::to_string(below_count) +
               "/20 sampler GOF stats below 11.344866730144373 (3 dof, p > " +
               "0.01), max " + fmt(max_stat) + ", " + std::to_string(pairs) +
               " pairs per draw";
  return out;
}

// Criterion 9: published multiplex datasets. Gated on CORRNET_DATA_DIR so
// the gate stays runnable without the (separately distributed) files.
std::vector<std::string> layer_names_in(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> names;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (seen.insert(first).second) names.push_back(first);
  }
  return names;
}

std::string squash(const std::string& s) {
  std::string out;
  for (const char c : s)
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct DatasetCheck {
  std::string file;
  double mean_target;
  std::string top_a, top_b;  // squashed substrings of the top pair's names
  double top_target;
};

Outcome criterion9() {
  const char* dir = std::getenv("CORRNET_DATA_DIR");
  Outcome out;
  if (dir == nullptr) {
    out.skip = true;
    out.detail = "set CORRNET_DATA_DIR to a directory holding aarhus.tsv and "
                 "lazega.tsv to run the multiplex dataset check";
    return out;
  }
  const std::vector<DatasetCheck> checks{
      {"aarhus.tsv", 0.27, "work", "lunch", 0.45},
      {"lazega.tsv", 0.39, "advice", "cowork", 0.48}};
  bool all_ok = true;
  std::string parts;
  for (const auto& check : checks) {
    const std::string path = std::string(dir) + "/" + check.file;
    const auto layers = layer_names_in(path);
    if (layers.size() < 2) {
      all_ok = false;
      parts += (parts.empty() ? "" : "; ") + check.file + ": unreadable";
      continue;
    }
    double sum = 0.0;
    int count = 0;
    double best = -2.0;
    std::string best_a, best_b;
    for (std::size_t i = 0; i < layers.size(); ++i)
      for (std::size_t j = i + 1; j < layers.size(); ++j) {
        IngestOptions opt;
        opt.layer_filter = {layers[i], layers[j]};
        const auto ing = read_network(path, opt);
        const auto rho = effective_correlation(
            global_cooccurrence(ing.net, 0, 1, PairMask::full()));
        if (!rho.has_value()) continue;
        sum += *rho;
        ++count;
        if (*rho > best) {
          best = *rho;
          best_a = layers[i];
          best_b = layers[j];
        }
      }
    if (count == 0) {
      all_ok = false;
      parts += (parts.empty() ? "" : "; ") + check.file + ": no defined pairs";
      continue;
    }
    const double mean = sum / count;
    const std::string sa = squash(best_a), sb = squash(best_b);
    const bool names_ok =
        (sa.find(check.top_a) != std::string::npos &&
         sb.find(check.top_b) != std::string::npos) ||
        (sa.find(check.top_b) != std::string::npos &&
         sb.find(check.top_a) != std::string::npos);
    const bool ok = std::abs(mean - check.mean_target) <= 0.01 && names_ok &&
                    std::abs(best - check.top_target) <= 0.01;
    all_ok = all_ok && ok;
    parts += (parts.empty() ? "" : "; ") + check.file + ": mean " + fmt(mean, 3) +
             " (" + fmt(check.mean_target, 2) + " +- 0.01), top " + best_a +
             "/" + best_b + " " + fmt(best, 3) + " (" +
             fmt(check.top_target, 2) + " +- 0.01)";
  }
  out.pass = all_ok;
  out.detail = parts;
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries{
      {1, "estimates and fisher intervals", criterion1},
      {2, "partition-invariant effective correlation", criterion2},
      {3, "benchmark auc tracks (1+|rho|)/2", criterion3},
      {4, "degree-corrected benchmark model ranking", criterion4},
      {5, "correlation extremes", criterion5},
      {6, "correlation advantage shrinks with mixing", criterion6},
      {7, "approximate vs full degree-corrected fit", criterion7},
      {8, "sampler goodness of fit", criterion8},
      {9, "multiplex dataset correlations", criterion9},
  };
  bool any_fail = false;
  for (const auto& entry : entries) {
    Outcome out;
    try {
      out = entry.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("unexpected exception: ") + e.what();
    }
    const char* verdict = out.skip ? "SKIP" : (out.pass ? "PASS" : "FAIL");
    if (!out.skip && !out.pass) any_fail = true;
    std::cout << verdict << " criterion " << entry.id << ": " << entry.title
              << " (" << out.detail << ")\n";
    for (const auto& note : out.notes) std::cout << note << "\n";
  }
  return any_fail ? 1 : 0;
}
