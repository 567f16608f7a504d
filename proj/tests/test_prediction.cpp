#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "corrnet/counts.hpp"
#include "corrnet/error.hpp"
#include "corrnet/estimators.hpp"
#include "corrnet/generators.hpp"
#include "corrnet/network.hpp"
#include "corrnet/prediction.hpp"
#include "corrnet/rng.hpp"

using namespace corrnet;

namespace {

template <typename Fn>
Err code_of(Fn&& fn) {
  try {
    fn();
  } catch (const ModelError& e) {
    return e.code();
  }
  return Err::ParseError;  // sentinel: nothing thrown
}

// Quadratic Mann-Whitney statistic with ties counted half.
double mann_whitney(const std::vector<double>& scores,
                    const std::vector<std::uint8_t>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (!labels[p]) continue;
    for (std::size_t q = 0; q < scores.size(); ++q) {
      if (labels[q]) continue;
      pairs += 1.0;
      if (scores[p] > scores[q])
        wins += 1.0;
      else if (scores[p] == scores[q])
        wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("fold splits partition the pair indices") {
  const std::int64_t total = 103;
  const auto folds = kfold_split(total, 5, 9);
  REQUIRE(folds.size() == 5);
  std::vector<std::int64_t> all;
  std::size_t smallest = 1000, largest = 0;
  for (const auto& fold : folds) {
    CHECK(std::is_sorted(fold.begin(), fold.end()));
    smallest = std::min(smallest, fold.size());
    largest = std::max(largest, fold.size());
    all.insert(all.end(), fold.begin(), fold.end());
  }
  CHECK(largest - smallest <= 1);
  std::sort(all.begin(), all.end());
  std::vector<std::int64_t> expect(static_cast<std::size_t>(total));
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(all == expect);

  CHECK(kfold_split(total, 5, 9) == folds);       // deterministic
  CHECK(kfold_split(total, 5, 10) != folds);      // seed matters
  CHECK(code_of([] { kfold_split(3, 5, 1); }) == Err::TooFewPairs);
  CHECK(code_of([] { kfold_split(10, 1, 1); }) == Err::TooFewPairs);
}

TEST_CASE("roc area equals the tie-aware rank statistic") {
  SequentialRng rng(5, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 40 + 8 * static_cast<std::size_t>(rep);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t t = 0; t < n; ++t) {
      // Coarse score grid forces heavy ties.
      scores[t] = static_cast<double>(rng.below(7)) / 7.0;
      labels[t] = rng.uniform() < 0.4 ? 1 : 0;
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0) labels[0] = 1;
    if (std::count(labels.begin(), labels.end(), 0) == 0) labels[0] = 0;
    const auto curve = roc_curve(scores, labels);
    CHECK(curve.auc ==
          doctest::Approx(mann_whitney(scores, labels)).epsilon(1e-12));
    REQUIRE(!curve.points.empty());
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == doctest::Approx(1.0));
    CHECK(curve.points.back().tpr == doctest::Approx(1.0));
    for (std::size_t t = 1; t < curve.points.size(); ++t) {
      CHECK(curve.points[t].fpr >= curve.points[t - 1].fpr);
      CHECK(curve.points[t].tpr >= curve.points[t - 1].tpr);
    }
    CHECK(roc_auc(scores, labels) == curve.auc);
  }
}

TEST_CASE("roc rejects degenerate label sets") {
  CHECK(code_of([] {
          roc_curve({0.5, 0.4}, {1, 1});
        }) == Err::OneClassOnly);
  CHECK(code_of([] {
          roc_curve({0.5, 0.4}, {0, 0});
        }) == Err::OneClassOnly);
  CHECK(code_of([] { roc_curve({}, {}); }) == Err::EmptyInput);
  CHECK(code_of([] {
          roc_curve({0.5}, {1, 0});
        }) == Err::DimensionMismatch);
}

TEST_CASE("precision-recall on a worked example") {
  const std::vector<double> scores{0.9, 0.8, 0.7};
  const std::vector<std::uint8_t> labels{1, 0, 1};
  const auto pr = pr_curve(scores, labels);
  REQUIRE(pr.points.size() == 4);
  CHECK(pr.points[0].recall == 0.0);
  CHECK(pr.points[0].precision == doctest::Approx(1.0));
  CHECK(pr.points[1].recall == doctest::Approx(0.5));
  CHECK(pr.points[1].precision == doctest::Approx(1.0));
  CHECK(pr.points[2].recall == doctest::Approx(0.5));
  CHECK(pr.points[2].precision == doctest::Approx(0.5));
  CHECK(pr.points[3].recall == doctest::Approx(1.0));
  CHECK(pr.points[3].precision == doctest::Approx(2.0 / 3.0));
  CHECK(pr.aupr == doctest::Approx(19.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("conditional scores from fixed parameters") {
  ScoringModel corr(ModelKind::CorrER, BlockPartition::single_block(2));
  corr.er = CorrERParams{0.1, 0.085, 0.05, {}};
  const auto on_edge = corr.score_pair(0, 1, true);
  CHECK(on_edge.score == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_FALSE(on_edge.fallback);
  const auto on_gap = corr.score_pair(0, 1, false);
  CHECK(on_gap.score ==
        doctest::Approx(0.03888888888888889).epsilon(1e-14));

  ScoringModel mono(ModelKind::ER, BlockPartition::single_block(2));
  mono.er = CorrERParams{0.1, 0.085, 0.05, {}};
  CHECK(mono.score_pair(0, 1, true).score == doctest::Approx(0.085));
  CHECK(mono.score_pair(0, 1, false).score == doctest::Approx(0.085));
}

TEST_CASE("closed-form conditional auc") {
  CHECK(er_conditional_auc(CorrERParams{0.3, 0.2, 0.06, {}}) ==
        doctest::Approx(0.5).epsilon(1e-15));
  const CorrERParams p{0.1, 0.085, 0.05, {}};
  const double pa1 = p.q / p.p2;
  const double pa0 = (p.p1 - p.q) / (1.0 - p.p2);
  const double expect = pa1 * (1.0 - pa0) +
                        0.5 * (pa1 * pa0 + (1.0 - pa1) * (1.0 - pa0));
  CHECK(er_conditional_auc(p) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(er_conditional_auc(p) > 0.5);
  CHECK(code_of([] {
          er_conditional_auc(CorrERParams{0.1, 0.2, 0.15, {}});
        }) == Err::InfeasibleParams);
}

TEST_CASE("training never sees hidden second-layer entries") {
  // Two networks identical except on the hidden pairs' second layer. Every
  // model kind must produce identical fits and scores on both.
  const std::int32_t n = 10;
  const EdgeDomain d = EdgeDomain::undirected();
  SequentialRng rng(3, 0);
  EdgeList a, b_base;
  for (std::int64_t t = 0; t < d.size(n); ++t) {
    if (rng.uniform() < 0.45) a.push_back(d.pair_at(n, t));
    if (rng.uniform() < 0.4) b_base.push_back(d.pair_at(n, t));
  }
  const MultilayerNetwork net1(n, d, {a, b_base});
  // Flip the second layer on three hidden pairs.
  const std::vector<std::int64_t> hidden{net1.key(0, 1), net1.key(2, 5),
                                         net1.key(7, 9)};
  EdgeList b_flipped;
  for (const auto& e : b_base) {
    const auto key = net1.key(e.first, e.second);
    if (std::find(hidden.begin(), hidden.end(), key) == hidden.end())
      b_flipped.push_back(e);
  }
  for (const auto key : hidden)
    if (!net1.layer(1).has(key)) {
      const auto p = d.pair_of_key(n, key);
      b_flipped.push_back(p);
    }
  const MultilayerNetwork net2(n, d, {a, b_flipped});
  REQUIRE(net1.layer(1).edges() != net2.layer(1).edges());

  const BlockPartition part({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  const PairMask mask(hidden);
  for (const auto kind :
       {ModelKind::ER, ModelKind::SBM, ModelKind::DCSBM, ModelKind::CorrER,
        ModelKind::CorrSBM, ModelKind::CorrDCSBM}) {
    CAPTURE(to_string(kind));
    const auto m1 = fit_for_prediction(net1, part, 0, 1, mask, kind);
    const auto m2 = fit_for_prediction(net2, part, 0, 1, mask, kind);
    for (std::int64_t t = 0; t < d.size(n); ++t) {
      const auto [i, j] = d.pair_at(n, t);
      for (const bool edge : {false, true}) {
        const auto s1 = m1.score_pair(i, j, edge);
        const auto s2 = m2.score_pair(i, j, edge);
        CHECK(s1.score == s2.score);
        CHECK(s1.fallback == s2.fallback);
      }
    }
  }
}

TEST_CASE("single-block correlated block model equals the global model") {
  const auto inst = make_benchmark([] {
    BenchmarkConfig cfg;
    cfg.N = 80;
    cfg.n_c = 2;
    cfg.seed = 14;
    return cfg;
  }());
  const auto& net = inst.net;
  const auto d = net.domain();
  const PairMask mask({net.key(0, 1), net.key(1, 2), net.key(0, 5)});
  const auto er = fit_for_prediction(net, BlockPartition::single_block(80), 0,
                                     1, mask, ModelKind::CorrER);
  const auto sbm = fit_for_prediction(net, BlockPartition::single_block(80),
                                      0, 1, mask, ModelKind::CorrSBM);
  for (std::int64_t t = 0; t < d.size(80); t += 7) {
    const auto [i, j] = d.pair_at(80, t);
    for (const bool edge : {false, true})
      CHECK(er.score_pair(i, j, edge).score ==
            doctest::Approx(sbm.score_pair(i, j, edge).score)
                .epsilon(1e-14));
  }
}

TEST_CASE("regular graphs collapse the corrected model onto the global one") {
  EdgeList a, b;
  for (std::int32_t i = 0; i < 9; ++i) a.push_back({i, (i + 1) % 9});
  b = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 8}, {8, 7}, {7, 0}};
  const MultilayerNetwork net(9, EdgeDomain::undirected(), {a, b});
  const auto part = BlockPartition::single_block(9);
  const auto er =
      fit_for_prediction(net, part, 0, 1, PairMask(), ModelKind::CorrER);
  const auto dc =
      fit_for_prediction(net, part, 0, 1, PairMask(), ModelKind::CorrDCSBM);
  for (std::int32_t i = 0; i < 9; ++i)
    for (std::int32_t j = i + 1; j < 9; ++j)
      for (const bool edge : {false, true})
        CHECK(dc.score_pair(i, j, edge).score ==
              doctest::Approx(er.score_pair(i, j, edge).score)
                  .epsilon(1e-10));
}

TEST_CASE("positively correlated fits rank edges above gaps") {
  const auto inst = make_benchmark([] {
    BenchmarkConfig cfg;
    cfg.N = 200;
    cfg.n_c = 3;
    cfg.rho = 0.6;
    cfg.seed = 8;
    return cfg;
  }());
  for (const auto kind :
       {ModelKind::CorrER, ModelKind::CorrSBM, ModelKind::CorrDCSBM}) {
    const auto model = fit_for_prediction(inst.net, inst.partition, 0, 1,
                                          PairMask(), kind);
    CHECK(positive_rho_ordering(model));
  }
}

TEST_CASE("cross validation is deterministic and scores every pair") {
  const auto inst = make_benchmark([] {
    BenchmarkConfig cfg;
    cfg.N = 150;
    cfg.n_c = 2;
    cfg.rho = 0.6;
    cfg.seed = 2;
    return cfg;
  }());
  const std::vector<ModelKind> kinds{ModelKind::ER, ModelKind::CorrER,
                                     ModelKind::CorrSBM};
  const auto rep1 =
      cross_validate(inst.net, inst.partition, 0, 1, kinds, 5, 17);
  const auto rep2 =
      cross_validate(inst.net, inst.partition, 0, 1, kinds, 5, 17);
  REQUIRE(rep1.models.size() == 3);
  CHECK(rep1.fold_sizes.size() == 5);
  std::int64_t fold_total = 0;
  for (const auto s : rep1.fold_sizes) fold_total += s;
  CHECK(fold_total == inst.net.pair_count());

  for (std::size_t m = 0; m < kinds.size(); ++m) {
    const auto& r1 = rep1.models[m];
    const auto& r2 = rep2.models[m];
    CHECK(r1.roc.auc == r2.roc.auc);
    CHECK(r1.pr.aupr == r2.pr.aupr);
    CHECK(r1.scored_pairs == inst.net.pair_count());
    CHECK(r1.skipped_folds == 0);
    CHECK(r1.fold_auc.size() == 5);
  }
  CHECK(rep1.warnings.empty());

  // A correlated model must clearly beat the uninformed baseline here.
  const double auc_er = rep1.models[0].roc.auc;
  const double auc_corr = rep1.models[1].roc.auc;
  CHECK(auc_er < 0.6);
  CHECK(auc_corr > 0.7);

  // Changing the fold seed moves the folds but not the conclusion.
  const auto rep3 =
      cross_validate(inst.net, inst.partition, 0, 1, kinds, 5, 18);
  CHECK(rep3.models[1].roc.auc > 0.7);
}

TEST_CASE("single-class folds are reported and excluded from fold aucs") {
  // 15 pairs, 5 folds of 3, and only two second-layer edges: at least
  // three folds see no positive label.
  const MultilayerNetwork net(
      6, EdgeDomain::undirected(),
      {{{0, 1}, {2, 3}, {4, 5}, {0, 2}, {1, 3}}, {{0, 1}, {2, 3}}});
  const auto rep = cross_validate(net, BlockPartition::single_block(6), 0, 1,
                                  {ModelKind::CorrER}, 5, 3);
  REQUIRE(rep.models.size() == 1);
  const auto& res = rep.models[0];
  CHECK(res.scored_pairs == 15);
  CHECK(res.skipped_folds == 0);
  int nan_folds = 0;
  for (const double v : res.fold_auc)
    if (std::isnan(v)) ++nan_folds;
  CHECK(nan_folds >= 3);
  CHECK(static_cast<int>(rep.warnings.size()) == nan_folds);
  CHECK(std::isfinite(res.roc.auc));  // pooled labels keep both classes
}

TEST_CASE("folds whose training fit degenerates are skipped") {
  // An empty second layer: the degree-corrected fit cannot normalize its
  // propensities, so every fold is skipped and the model has no scores.
  const MultilayerNetwork net(
      6, EdgeDomain::undirected(),
      {{{0, 1}, {2, 3}, {4, 5}, {0, 2}, {1, 3}}, {}});
  CHECK(code_of([&] {
          cross_validate(net, BlockPartition::single_block(6), 0, 1,
                         {ModelKind::DCSBM}, 5, 3);
        }) == Err::NonConvergence);
}

TEST_CASE("an almost surely complete second layer has one class only") {
  const MultilayerNetwork net(3, EdgeDomain::undirected(),
                              {{{0, 1}}, {{0, 1}, {0, 2}, {1, 2}}});
  CHECK(code_of([&] {
          cross_validate(net, BlockPartition::single_block(3), 0, 1,
                         {ModelKind::ER}, 3, 1);
        }) == Err::OneClassOnly);
}

TEST_CASE("model kind names round-trip") {
  const std::vector<std::string> names{"er",      "sbm",      "dcsbm",
                                       "corr-er", "corr-sbm", "corr-dcsbm"};
  for (const auto& name : names) {
    const auto kind = model_kind_from_string(name);
    REQUIRE(kind.has_value());
    CHECK(to_string(*kind) == name);
  }
  CHECK_FALSE(model_kind_from_string("corr-er ").has_value());
  CHECK_FALSE(model_kind_from_string("").has_value());
}
