#include "corrnet/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "corrnet/counts.hpp"
#include "corrnet/estimators.hpp"
#include "corrnet/generators.hpp"
#include "corrnet/io.hpp"
#include "corrnet/prediction.hpp"
#include "corrnet/version.hpp"

namespace corrnet {

namespace {

using nlohmann::ordered_json;

constexpr std::size_t kMaxCurvePoints = 512;

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const auto end = comma == std::string::npos ? csv.size() : comma;
    if (end > start) out.push_back(csv.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<ModelKind> parse_models(const std::string& csv) {
  std::vector<ModelKind> kinds;
  for (const auto& tok : split_csv(csv)) {
    const auto kind = model_kind_from_string(tok);
    if (!kind)
      fail(Err::ParseError,
           "unknown model '" + tok +
               "' (choose from er, sbm, dcsbm, corr-er, corr-sbm, "
               "corr-dcsbm)");
    kinds.push_back(*kind);
  }
  if (kinds.empty()) fail(Err::ParseError, "no models requested");
  return kinds;
}

bool needs_partition(const std::vector<ModelKind>& kinds) {
  for (const ModelKind k : kinds)
    if (k != ModelKind::ER && k != ModelKind::CorrER) return true;
  return false;
}

// Options shared by the ingestion subcommands.
struct IngestCli {
  std::string input;
  std::string partition;
  std::string layers_csv;
  bool directed = false;
  bool self_edges = false;
  bool bipartite = false;
  double weight_quantile = -1.0;  // negative: no thresholding
  std::string out;

  void attach(CLI::App* cmd, bool partition_opt = true) {
    cmd->add_option("--input", input, "edge file: layer u v [weight]")
        ->required();
    if (partition_opt)
      cmd->add_option("--partition", partition, "block file: node block");
    cmd->add_option("--layers", layers_csv,
                    "two layer names, comma separated (default: first two)");
    cmd->add_flag("--directed", directed, "ordered pairs");
    cmd->add_flag("--self-edges", self_edges, "allow i = i pairs");
    cmd->add_flag("--bipartite", bipartite,
                  "first endpoint column is the left side");
    cmd->add_option("--weight-threshold-quantile", weight_quantile,
                    "keep edges at or above this per-layer weight quantile");
    cmd->add_option("--out", out, "output report path (JSON)")->required();
  }

  IngestOptions ingest_options() const {
    IngestOptions opt;
    opt.directed = directed;
    opt.self_edges = self_edges;
    opt.bipartite = bipartite;
    if (weight_quantile >= 0.0) opt.weight_threshold_quantile = weight_quantile;
    opt.layer_filter = split_csv(layers_csv);
    return opt;
  }

  ordered_json config_json() const {
    ordered_json j;
    j["input"] = input;
    j["partition"] = partition.empty() ? ordered_json("n/a")
                                       : ordered_json(partition);
    j["layers"] = layers_csv.empty() ? ordered_json("auto")
                                     : ordered_json(split_csv(layers_csv));
    j["directed"] = directed;
    j["self_edges"] = self_edges;
    j["bipartite"] = bipartite;
    j["weight_threshold_quantile"] =
        weight_quantile >= 0.0 ? ordered_json(round_sig(weight_quantile))
                               : ordered_json("n/a");
    j["out"] = out;
    return j;
  }
};

ordered_json input_digest(const IngestedNetwork& in) {
  ordered_json j;
  j["num_nodes"] = in.net.num_nodes();
  if (in.left_count >= 0) j["left_count"] = in.left_count;
  j["num_pairs"] = in.net.pair_count();
  j["layers"] = in.layer_names;
  j["edges"] = {in.net.layer(0).edge_count(), in.net.layer(1).edge_count()};
  j["dropped_edges"] = in.dropped_edges;
  j["thresholds"] = {json_number(in.thresholds[0]),
                     json_number(in.thresholds[1])};
  return j;
}

// Loads the network, the partition when required, and emits the node map
// next to the report when ids are not already dense integers.
struct LoadedInput {
  IngestedNetwork data;
  std::optional<NamedPartition> named;
  BlockPartition partition;
  ordered_json digest;
};

LoadedInput load_input(const IngestCli& cli, bool partition_required) {
  LoadedInput out{read_network(cli.input, cli.ingest_options()), {},
                  BlockPartition::single_block(1), {}};
  const auto n = out.data.net.num_nodes();
  if (!cli.partition.empty()) {
    out.named = read_partition(cli.partition, out.data);
    out.partition = out.named->partition;
  } else {
    if (partition_required)
      fail(Err::MissingPartition,
           "the requested models need --partition");
    out.partition = BlockPartition::single_block(n);
  }
  out.digest = input_digest(out.data);
  if (out.named) {
    out.digest["num_blocks"] = out.named->partition.k();
    out.digest["block_names"] = out.named->block_names;
  }
  if (!out.data.identity_names()) {
    const std::string map_path = cli.out + ".nodes.tsv";
    write_node_map_tsv(map_path, out.data.node_names);
    out.digest["node_map_file"] = map_path;
  }
  return out;
}

ordered_json fit_model_json(const MultilayerNetwork& net,
                            const BlockPartition& partition, ModelKind kind,
                            bool full_likelihood,
                            std::vector<std::string>& warnings) {
  const PairMask full;
  ordered_json j;
  if (kind == ModelKind::CorrDCSBM && full_likelihood) {
    const NormalizedDegrees ta = normalized_degrees(net, 0);
    const NormalizedDegrees tb = normalized_degrees(net, 1);
    const CorrDCSBMParams fit =
        fit_corr_dcsbm_full(net, partition, 0, 1, ta, tb, full);
    j = dcsbm_json(fit);
    j["likelihood"] = "full";
    return j;
  }
  const ScoringModel model =
      fit_for_prediction(net, partition, 0, 1, full, kind);
  switch (kind) {
    case ModelKind::ER:
      j["p2"] = json_number(model.er.p2);
      break;
    case ModelKind::SBM:
      j["k"] = model.sbm->k;
      j["p2"] = bundle_table_json(*model.sbm)["p2"];
      break;
    case ModelKind::DCSBM: {
      j["k"] = partition.k();
      ordered_json rows = ordered_json::array();
      for (Eigen::Index r = 0; r < model.mono_p2.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index s = 0; s < model.mono_p2.cols(); ++s)
          row.push_back(model.mono_fitted(r, s)
                            ? json_number(model.mono_p2(r, s))
                            : ordered_json("n/a"));
        rows.push_back(std::move(row));
      }
      j["p2"] = std::move(rows);
      ordered_json theta = ordered_json::array();
      for (Eigen::Index i = 0; i < model.theta2.size(); ++i)
        theta.push_back(json_number(model.theta2[i]));
      j["theta2"] = std::move(theta);
      break;
    }
    case ModelKind::CorrER: {
      j["params"] = params_json(model.er);
      const std::int64_t pairs = net.pair_count();
      j["num_pairs"] = pairs;
      try {
        j["fisher"] = fisher_json(er_fisher_variance(model.er, pairs));
      } catch (const ModelError& e) {
        j["fisher"] = "n/a";
        warnings.push_back(std::string("corr-er: ") + e.what());
      }
      break;
    }
    case ModelKind::CorrSBM:
      j = bundle_table_json(*model.sbm);
      break;
    case ModelKind::CorrDCSBM:
      j = dcsbm_json(*model.dcsbm);
      j["likelihood"] = "approximate";
      break;
  }
  return j;
}

int run_generate(const BenchmarkConfig& cfg, const std::string& variant_tok,
                 const std::string& out_dir) {
  BenchmarkConfig resolved = cfg;
  const auto variant = benchmark_variant_from_string(variant_tok);
  if (!variant)
    fail(Err::ParseError,
         "unknown variant '" + variant_tok +
             "' (choose from corr-er, corr-sbm, corr-dcsbm)");
  resolved.variant = *variant;
  const GeneratedInstance inst = make_benchmark(resolved);

  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  write_network_tsv(path("network.tsv"), inst.net);
  write_partition_tsv(path("partition.tsv"), inst.partition);

  ordered_json config;
  config["N"] = resolved.N;
  config["n_c"] = resolved.n_c;
  config["mu"] = json_number(resolved.mu);
  config["rho"] = json_number(resolved.rho);
  config["eta_k"] = json_number(resolved.eta_k);
  config["k_min"] = json_number(resolved.k_min);
  config["k_max"] = json_number(resolved.k_max);
  config["dirichlet_concentration"] =
      json_number(resolved.dirichlet_concentration);
  config["variant"] = to_string(resolved.variant);
  config["seed"] = resolved.seed;
  config["out"] = out_dir;

  ordered_json meta = report_envelope("generate", std::move(config));
  meta["files"] = {{"network", path("network.tsv")},
                   {"partition", path("partition.tsv")}};
  meta["num_nodes"] = inst.net.num_nodes();
  meta["num_pairs"] = inst.net.pair_count();
  ordered_json sizes = ordered_json::array();
  {
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(inst.partition.k()),
                                  0);
    for (std::int32_t i = 0; i < inst.partition.size(); ++i)
      cnt[static_cast<std::size_t>(inst.partition.block(i))] += 1;
    for (const auto c : cnt) sizes.push_back(c);
  }
  meta["block_sizes"] = std::move(sizes);
  meta["edges"] = {inst.net.layer(0).edge_count(),
                   inst.net.layer(1).edge_count()};
  meta["clamped_pairs"] = inst.clamped_pairs;
  meta["effective_rho"] = json_opt(
      effective_correlation(global_cooccurrence(inst.net, 0, 1, PairMask())));
  write_json(path("meta.json"), meta);
  std::cout << path("meta.json") << '\n';
  return 0;
}

int run_fit(const IngestCli& cli, const std::string& models_csv,
            bool full_likelihood) {
  const auto kinds = parse_models(models_csv);
  LoadedInput in = load_input(cli, needs_partition(kinds));
  ordered_json config = cli.config_json();
  config["models"] = models_csv;
  config["full_likelihood"] = full_likelihood;
  ordered_json report = report_envelope("fit", std::move(config));
  report["input"] = in.digest;
  std::vector<std::string> warnings;
  ordered_json models;
  for (const ModelKind kind : kinds)
    models[to_string(kind)] = fit_model_json(in.data.net, in.partition, kind,
                                             full_likelihood, warnings);
  report["models"] = std::move(models);
  report["warnings"] = warnings;
  write_json(cli.out, report);
  std::cout << cli.out << '\n';
  return 0;
}

int run_correlate(const IngestCli& cli) {
  LoadedInput in = load_input(cli, false);
  ordered_json report = report_envelope("correlate", cli.config_json());
  report["input"] = in.digest;
  std::vector<std::string> warnings;

  const PairCounts counts =
      global_cooccurrence(in.data.net, 0, 1, PairMask());
  ordered_json cj;
  cj["e11"] = counts.e11;
  cj["e10"] = counts.e10;
  cj["e01"] = counts.e01;
  cj["e00"] = counts.e00;
  report["counts"] = std::move(cj);
  const CorrERParams er = fit_corr_er(counts);
  report["params"] = params_json(er);
  report["effective_rho"] = json_opt(er.rho);
  try {
    report["fisher"] = fisher_json(er_fisher_variance(er, counts.total()));
  } catch (const ModelError& e) {
    report["fisher"] = "n/a";
    warnings.push_back(e.what());
  }
  if (in.named) {
    const BundleCounts bundles =
        bundle_cooccurrence(in.data.net, in.partition, 0, 1, PairMask());
    report["bundles"] = bundle_table_json(fit_corr_sbm(bundles));
  }
  report["warnings"] = warnings;
  write_json(cli.out, report);
  std::cout << cli.out << '\n';
  return 0;
}

int run_predict(const IngestCli& cli, const std::string& models_csv,
                int kfolds, std::uint64_t seed) {
  const auto kinds = parse_models(models_csv);
  LoadedInput in = load_input(cli, needs_partition(kinds));
  ordered_json config = cli.config_json();
  config["models"] = models_csv;
  config["kfolds"] = kfolds;
  config["seed"] = seed;
  ordered_json report = report_envelope("predict", std::move(config));
  report["input"] = in.digest;
  const PredictionReport res =
      cross_validate(in.data.net, in.partition, 0, 1, kinds, kfolds, seed);
  const ordered_json pj = prediction_json(res, kMaxCurvePoints);
  for (auto it = pj.begin(); it != pj.end(); ++it) report[it.key()] =
      it.value();
  write_json(cli.out, report);
  std::cout << cli.out << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{std::string(kToolName) +
               ": correlated two-layer network models"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  // generate
  BenchmarkConfig bench;
  std::string variant_tok = to_string(bench.variant);
  std::string gen_out;
  auto* gen = app.add_subcommand("generate",
                                 "synthesize a correlated benchmark pair");
  gen->add_option("--N", bench.N, "nodes")->capture_default_str();
  gen->add_option("--n_c", bench.n_c, "planted communities")
      ->capture_default_str();
  gen->add_option("--mu", bench.mu, "mixing parameter")
      ->capture_default_str();
  gen->add_option("--rho", bench.rho, "target interlayer correlation")
      ->capture_default_str();
  gen->add_option("--eta_k", bench.eta_k, "degree exponent")
      ->capture_default_str();
  gen->add_option("--k_min", bench.k_min, "degree lower cutoff")
      ->capture_default_str();
  gen->add_option("--k_max", bench.k_max, "degree upper cutoff")
      ->capture_default_str();
  gen->add_option("--dirichlet_concentration", bench.dirichlet_concentration,
                  "community size concentration")
      ->capture_default_str();
  gen->add_option("--variant", variant_tok,
                  "corr-er | corr-sbm | corr-dcsbm")
      ->capture_default_str();
  gen->add_option("--seed", bench.seed, "random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();

  // fit
  IngestCli fit_cli;
  std::string fit_models;
  bool full_likelihood = false;
  auto* fit = app.add_subcommand("fit", "maximum likelihood parameter fits");
  fit_cli.attach(fit);
  fit->add_option("--models", fit_models,
                  "comma list: er, sbm, dcsbm, corr-er, corr-sbm, corr-dcsbm")
      ->required();
  fit->add_flag("--full-likelihood", full_likelihood,
                "corr-dcsbm: optimize the full likelihood instead of the "
                "first-order system");

  // correlate
  IngestCli corr_cli;
  auto* corr = app.add_subcommand(
      "correlate", "interlayer correlation with uncertainty");
  corr_cli.attach(corr);

  // predict
  IngestCli pred_cli;
  std::string pred_models;
  int kfolds = 5;
  std::uint64_t pred_seed = 1;
  auto* pred = app.add_subcommand(
      "predict", "cross-validated held-out edge prediction");
  pred_cli.attach(pred);
  pred->add_option("--models", pred_models,
                   "comma list: er, sbm, dcsbm, corr-er, corr-sbm, "
                   "corr-dcsbm")
      ->required();
  pred->add_option("--kfolds", kfolds, "cross-validation folds")
      ->capture_default_str();
  pred->add_option("--seed", pred_seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_generate(bench, variant_tok, gen_out);
    if (fit->parsed()) return run_fit(fit_cli, fit_models, full_likelihood);
    if (corr->parsed()) return run_correlate(corr_cli);
    if (pred->parsed())
      return run_predict(pred_cli, pred_models, kfolds, pred_seed);
  } catch (const ModelError& e) {
    std::cerr << kToolName << ": " << e.what() << '\n';
    return is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace corrnet
