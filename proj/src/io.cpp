#include "corrnet/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "corrnet/version.hpp"

namespace corrnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void parse_fail(const std::string& path, std::int64_t line,
                             const std::string& what) {
  fail(Err::ParseError,
       path + ":" + std::to_string(line) + ": " + what);
}

// Strips '#' comments and splits on whitespace.
std::vector<std::string> tokenize(const std::string& line) {
  const auto hash = line.find('#');
  std::istringstream in(hash == std::string::npos ? line
                                                  : line.substr(0, hash));
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& tok, const std::string& path,
                    std::int64_t line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    parse_fail(path, line, "bad number '" + tok + "'");
  return v;
}

struct RawEdge {
  std::size_t layer;  // index into layer name list
  std::string u, v;
  double w;
};

}  // namespace

bool IngestedNetwork::identity_names() const {
  for (std::size_t i = 0; i < node_names.size(); ++i)
    if (node_names[i] != std::to_string(i)) return false;
  return true;
}

IngestedNetwork read_network(const std::string& path,
                             const IngestOptions& options) {
  if (options.weight_threshold_quantile &&
      !(*options.weight_threshold_quantile >= 0.0 &&
        *options.weight_threshold_quantile <= 1.0))
    fail(Err::InfeasibleParams, "weight threshold quantile must lie in [0, 1]");
  if (!options.layer_filter.empty() && options.layer_filter.size() != 2)
    fail(Err::FewerThanTwoLayers, "exactly two layer names must be selected");
  if (options.bipartite && options.self_edges)
    fail(Err::BipartiteViolation, "bipartite domains have no self-edges");

  std::ifstream in(path);
  if (!in) fail(Err::ParseError, path + ": cannot open");

  // Pass 1: collect rows, layer names, and node ids in appearance order.
  std::vector<std::string> layer_names;
  std::unordered_map<std::string, std::size_t> layer_index;
  std::vector<RawEdge> rows;
  std::vector<std::string> left_names, right_names;
  std::unordered_map<std::string, std::int32_t> left_map, right_map;
  const auto intern = [](const std::string& name,
                         std::vector<std::string>& names,
                         std::unordered_map<std::string, std::int32_t>& map) {
    if (map.emplace(name, static_cast<std::int32_t>(names.size())).second)
      names.push_back(name);
  };

  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3 || tokens.size() > 4)
      parse_fail(path, lineno, "expected 'layer u v [weight]'");
    RawEdge row;
    const auto it = layer_index.find(tokens[0]);
    if (it != layer_index.end()) {
      row.layer = it->second;
    } else {
      row.layer = layer_names.size();
      layer_index.emplace(tokens[0], row.layer);
      layer_names.push_back(tokens[0]);
    }
    row.u = tokens[1];
    row.v = tokens[2];
    row.w = tokens.size() == 4 ? parse_double(tokens[3], path, lineno) : 1.0;
    intern(row.u, left_names, left_map);
    if (options.bipartite) {
      intern(row.v, right_names, right_map);
    } else {
      intern(row.v, left_names, left_map);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(Err::EmptyInput, path + ": no edges");

  // Select the two working layers.
  std::vector<std::string> selected = options.layer_filter;
  if (selected.empty()) {
    if (layer_names.size() < 2)
      fail(Err::FewerThanTwoLayers,
           path + ": needs two layers, found " +
               std::to_string(layer_names.size()));
    selected = {layer_names[0], layer_names[1]};
  }
  std::size_t sel[2];
  for (int t = 0; t < 2; ++t) {
    const auto it = layer_index.find(selected[static_cast<std::size_t>(t)]);
    if (it == layer_index.end())
      fail(Err::LayerIndexOutOfRange,
           path + ": no layer named '" +
               selected[static_cast<std::size_t>(t)] + "'");
    sel[t] = it->second;
  }
  if (sel[0] == sel[1])
    fail(Err::FewerThanTwoLayers, "the two selected layers must differ");

  // Final node indexing: unipartite uses the single pool; bipartite stacks
  // left ids before right ids.
  IngestedNetwork out{MultilayerNetwork(1, EdgeDomain::undirected(), {{}, {}}),
                      {}, -1, selected, {}, {}, {}, {}, {}};
  const std::int32_t left_count =
      static_cast<std::int32_t>(left_names.size());
  out.node_names = left_names;
  out.left_index = left_map;
  if (options.bipartite) {
    out.left_count = left_count;
    for (const auto& name : right_names) out.node_names.push_back(name);
    for (auto& [name, idx] : right_map) idx += left_count;
    out.right_index = right_map;
  }
  const auto n = static_cast<std::int32_t>(out.node_names.size());

  EdgeDomain domain = EdgeDomain::undirected();
  if (options.bipartite) {
    domain = EdgeDomain::bipartite_domain(left_count);
    if (options.directed)
      domain.directed = true;  // orientation left -> right only
  } else if (options.directed) {
    domain = options.self_edges ? EdgeDomain::directed_with_self()
                                : EdgeDomain::directed_simple();
  } else if (options.self_edges) {
    domain = EdgeDomain::undirected_with_self();
  }

  // Per-layer weight thresholds (nearest rank on ascending weights).
  out.thresholds = {kNaN, kNaN};
  out.kept_edges = {0, 0};
  out.dropped_edges = {0, 0};
  std::vector<double> cut(2, -std::numeric_limits<double>::infinity());
  if (options.weight_threshold_quantile) {
    for (int l = 0; l < 2; ++l) {
      std::vector<double> weights;
      for (const auto& row : rows)
        if (row.layer == sel[l]) weights.push_back(row.w);
      if (weights.empty()) continue;
      std::sort(weights.begin(), weights.end());
      const auto rank = static_cast<std::size_t>(
          std::floor(*options.weight_threshold_quantile *
                     static_cast<double>(weights.size() - 1)));
      cut[static_cast<std::size_t>(l)] = weights[rank];
      out.thresholds[static_cast<std::size_t>(l)] = weights[rank];
    }
  }

  std::vector<EdgeList> layers(2);
  for (const auto& row : rows) {
    int l = -1;
    if (row.layer == sel[0]) l = 0;
    else if (row.layer == sel[1]) l = 1;
    if (l < 0) continue;
    if (row.w < cut[static_cast<std::size_t>(l)]) {
      out.dropped_edges[static_cast<std::size_t>(l)] += 1;
      continue;
    }
    const std::int32_t ui = out.left_index.at(row.u);
    const std::int32_t vi = options.bipartite ? out.right_index.at(row.v)
                                              : out.left_index.at(row.v);
    layers[static_cast<std::size_t>(l)].emplace_back(ui, vi);
  }
  for (int l = 0; l < 2; ++l)
    out.kept_edges[static_cast<std::size_t>(l)] =
        static_cast<std::int64_t>(layers[static_cast<std::size_t>(l)].size());

  out.net = MultilayerNetwork(n, domain, std::move(layers), selected);
  return out;
}

NamedPartition read_partition(const std::string& path,
                              const IngestedNetwork& input) {
  std::ifstream in(path);
  if (!in) fail(Err::ParseError, path + ": cannot open");
  const auto n = static_cast<std::int32_t>(input.node_names.size());
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n), -1);
  std::vector<std::string> block_names;
  std::unordered_map<std::string, std::int32_t> block_index;

  const auto resolve = [&](const std::string& token, std::int64_t lineno) {
    const bool bip = input.left_count >= 0;
    if (bip && token.size() > 2 &&
        (token[0] == 'l' || token[0] == 'r') && token[1] == ':') {
      const auto& map = token[0] == 'l' ? input.left_index
                                        : input.right_index;
      const auto it = map.find(token.substr(2));
      if (it == map.end())
        parse_fail(path, lineno, "unknown node '" + token + "'");
      return it->second;
    }
    const auto lit = input.left_index.find(token);
    if (bip) {
      const auto rit = input.right_index.find(token);
      if (lit != input.left_index.end() && rit != input.right_index.end())
        parse_fail(path, lineno,
                   "node '" + token +
                       "' exists on both sides; prefix l: or r:");
      if (lit != input.left_index.end()) return lit->second;
      if (rit != input.right_index.end()) return rit->second;
      parse_fail(path, lineno, "unknown node '" + token + "'");
    }
    if (lit == input.left_index.end())
      parse_fail(path, lineno, "unknown node '" + token + "'");
    return lit->second;
  };

  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2)
      parse_fail(path, lineno, "expected 'node block'");
    const std::int32_t node = resolve(tokens[0], lineno);
    std::int32_t block;
    const auto it = block_index.find(tokens[1]);
    if (it != block_index.end()) {
      block = it->second;
    } else {
      block = static_cast<std::int32_t>(block_names.size());
      block_index.emplace(tokens[1], block);
      block_names.push_back(tokens[1]);
    }
    auto& slot = labels[static_cast<std::size_t>(node)];
    if (slot >= 0 && slot != block)
      parse_fail(path, lineno,
                 "conflicting labels for node '" + tokens[0] + "'");
    slot = block;
  }
  for (std::int32_t i = 0; i < n; ++i)
    if (labels[static_cast<std::size_t>(i)] < 0)
      fail(Err::PartitionMismatch,
           path + ": node '" + input.node_names[static_cast<std::size_t>(i)] +
               "' has no block label");
  return {BlockPartition(labels, static_cast<std::int32_t>(
                                     block_names.size())),
          std::move(block_names)};
}

void write_network_tsv(const std::string& path,
                       const MultilayerNetwork& net) {
  std::ofstream outf(path);
  if (!outf) fail(Err::ParseError, path + ": cannot write");
  for (int l = 0; l < net.num_layers(); ++l)
    for (const auto& [i, j] : net.layer(l).edges())
      outf << net.layer_name(l) << '\t' << i << '\t' << j << '\n';
  if (!outf) fail(Err::ParseError, path + ": write failed");
}

void write_partition_tsv(const std::string& path,
                         const BlockPartition& partition) {
  std::ofstream outf(path);
  if (!outf) fail(Err::ParseError, path + ": cannot write");
  for (std::int32_t i = 0; i < partition.size(); ++i)
    outf << i << '\t' << partition.block(i) << '\n';
  if (!outf) fail(Err::ParseError, path + ": write failed");
}

void write_node_map_tsv(const std::string& path,
                        const std::vector<std::string>& names) {
  std::ofstream outf(path);
  if (!outf) fail(Err::ParseError, path + ": cannot write");
  for (std::size_t i = 0; i < names.size(); ++i)
    outf << i << '\t' << names[i] << '\n';
  if (!outf) fail(Err::ParseError, path + ": write failed");
}

double round_sig(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return "n/a";
  return round_sig(v);
}

nlohmann::ordered_json json_opt(const std::optional<double>& v) {
  if (!v) return "n/a";
  return json_number(*v);
}

nlohmann::ordered_json params_json(const CorrERParams& p) {
  nlohmann::ordered_json j;
  j["p1"] = json_number(p.p1);
  j["p2"] = json_number(p.p2);
  j["q"] = json_number(p.q);
  j["rho"] = json_opt(p.rho);
  return j;
}

nlohmann::ordered_json fisher_json(const FisherReport& f) {
  static const char* names[3] = {"p1", "p2", "q"};
  nlohmann::ordered_json j;
  for (int t = 0; t < 3; ++t) {
    const auto s = static_cast<std::size_t>(t);
    nlohmann::ordered_json e;
    e["estimate"] = json_number(f.estimate[s]);
    e["variance"] = json_number(f.variance[s]);
    e["ci95"] = {json_number(f.ci95[s][0]), json_number(f.ci95[s][1])};
    j[names[t]] = std::move(e);
  }
  return j;
}

namespace {

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& m,
                                   const BoolGrid& defined) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index s = 0; s < m.cols(); ++s)
      row.push_back(defined(r, s) ? json_number(m(r, s))
                                  : nlohmann::ordered_json("n/a"));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::ordered_json bundle_table_json(const CorrSBMParams& p) {
  nlohmann::ordered_json j;
  j["k"] = p.k;
  j["p1"] = matrix_json(p.p1, p.fitted);
  j["p2"] = matrix_json(p.p2, p.fitted);
  j["q"] = matrix_json(p.q, p.fitted);
  j["rho"] = matrix_json(p.rho, p.rho_defined);
  return j;
}

nlohmann::ordered_json dcsbm_json(const CorrDCSBMParams& p) {
  nlohmann::ordered_json j = bundle_table_json(p.base);
  nlohmann::ordered_json status = nlohmann::ordered_json::array();
  for (std::int32_t r = 0; r < p.base.k; ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::int32_t s = 0; s < p.base.k; ++s) {
      if (!p.base.fitted(r, s)) {
        row.push_back("n/a");
        continue;
      }
      switch (p.bundle_status(r, s)) {
        case BundleFitStatus::Converged:
          row.push_back("converged");
          break;
        case BundleFitStatus::Boundary:
          row.push_back("boundary");
          break;
        case BundleFitStatus::FallbackZerothOrder:
          row.push_back("fallback-zeroth-order");
          break;
      }
    }
    status.push_back(std::move(row));
  }
  j["bundle_status"] = std::move(status);
  nlohmann::ordered_json t1 = nlohmann::ordered_json::array();
  nlohmann::ordered_json t2 = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < p.theta1.size(); ++i) {
    t1.push_back(json_number(p.theta1[i]));
    t2.push_back(json_number(p.theta2[i]));
  }
  j["theta1"] = std::move(t1);
  j["theta2"] = std::move(t2);
  return j;
}

namespace {

// Uniform thinning that always keeps the first and last point.
template <typename Points>
std::vector<std::size_t> thin_indices(const Points& pts,
                                      std::size_t max_points) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> keep;
  if (n <= max_points || max_points < 2) {
    keep.resize(n);
    for (std::size_t i = 0; i < n; ++i) keep[i] = i;
    return keep;
  }
  keep.reserve(max_points);
  for (std::size_t t = 0; t < max_points; ++t)
    keep.push_back(t * (n - 1) / (max_points - 1));
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  return keep;
}

}  // namespace

nlohmann::ordered_json roc_json(const RocCurve& curve,
                                std::size_t max_points) {
  nlohmann::ordered_json j;
  j["auc"] = json_number(curve.auc);
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const std::size_t t : thin_indices(curve.points, max_points))
    pts.push_back({json_number(curve.points[t].fpr),
                   json_number(curve.points[t].tpr)});
  j["num_points"] = curve.points.size();
  j["points"] = std::move(pts);
  return j;
}

nlohmann::ordered_json pr_json(const PrCurve& curve, std::size_t max_points) {
  nlohmann::ordered_json j;
  j["aupr"] = json_number(curve.aupr);
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const std::size_t t : thin_indices(curve.points, max_points))
    pts.push_back({json_number(curve.points[t].recall),
                   json_number(curve.points[t].precision)});
  j["num_points"] = curve.points.size();
  j["points"] = std::move(pts);
  return j;
}

nlohmann::ordered_json prediction_json(const PredictionReport& report,
                                       std::size_t max_curve_points) {
  nlohmann::ordered_json j;
  j["kfolds"] = report.kfolds;
  j["seed"] = report.seed;
  j["fold_sizes"] = report.fold_sizes;
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const auto& m : report.models) {
    nlohmann::ordered_json e;
    e["model"] = to_string(m.kind);
    e["auc"] = json_number(m.roc.auc);
    e["aupr"] = json_number(m.pr.aupr);
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const double v : m.fold_auc) folds.push_back(json_number(v));
    e["fold_auc"] = std::move(folds);
    e["scored_pairs"] = m.scored_pairs;
    e["fallback_pairs"] = m.fallback_pairs;
    e["skipped_folds"] = m.skipped_folds;
    e["roc"] = roc_json(m.roc, max_curve_points);
    e["pr"] = pr_json(m.pr, max_curve_points);
    models.push_back(std::move(e));
  }
  j["models"] = std::move(models);
  j["warnings"] = report.warnings;
  return j;
}

nlohmann::ordered_json report_envelope(const std::string& command,
                                       nlohmann::ordered_json config) {
  nlohmann::ordered_json j;
  j["tool"] = {{"name", kToolName},
               {"version", kToolVersion},
               {"schema", kReportSchema}};
  j["command"] = command;
  j["config"] = std::move(config);
  return j;
}

void write_json(const std::string& path, const nlohmann::ordered_json& doc) {
  std::ofstream outf(path);
  if (!outf) fail(Err::ParseError, path + ": cannot write");
  outf << doc.dump(2) << '\n';
  if (!outf) fail(Err::ParseError, path + ": write failed");
}

}  // namespace corrnet
