// Text ingestion and report serialization.
//
// Edge files are whitespace-separated with '#' comments:
//   layer  u  v  [weight]
// Node ids are arbitrary tokens mapped to dense indices in order of first
// appearance. In bipartite mode the first endpoint column is the left side
// and the second the right; the two sides have separate id spaces.
// Partition files carry one `node block` row per node; block labels are
// mapped to dense indices in order of first appearance.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "corrnet/estimators.hpp"
#include "corrnet/network.hpp"
#include "corrnet/prediction.hpp"

namespace corrnet {

struct IngestOptions {
  bool directed = false;
  bool self_edges = false;
  bool bipartite = false;
  // Keep only edges whose weight reaches the per-layer quantile (nearest
  // rank on the ascending weights). Unweighted lines count as weight 1.
  std::optional<double> weight_threshold_quantile;
  // Layer names to keep, in order; empty selects the first two layers by
  // order of first appearance.
  std::vector<std::string> layer_filter;
};

struct IngestedNetwork {
  MultilayerNetwork net;  // the two selected layers, in filter order
  std::vector<std::string> node_names;    // index -> original id
  std::int32_t left_count = -1;           // bipartite only, else -1
  std::vector<std::string> layer_names;   // the two selected names
  std::vector<double> thresholds;         // per layer; NaN when not applied
  std::vector<std::int64_t> kept_edges;   // per layer, after thresholding
  std::vector<std::int64_t> dropped_edges;
  // Name lookup; bipartite keeps separate maps per side.
  std::unordered_map<std::string, std::int32_t> left_index;
  std::unordered_map<std::string, std::int32_t> right_index;

  bool identity_names() const;  // names are exactly "0".."n-1"
};

IngestedNetwork read_network(const std::string& path,
                             const IngestOptions& options);

struct NamedPartition {
  BlockPartition partition;
  std::vector<std::string> block_names;  // dense label -> original token
};

// Reads `node block` rows and resolves node ids against the ingested
// network. Bipartite ids may be disambiguated as l:name / r:name; bare
// names must be unique across sides. Every node needs a row.
NamedPartition read_partition(const std::string& path,
                              const IngestedNetwork& input);

// Writers used by the generate subcommand; rows are tab-separated and
// reproduce bit-identically under a fixed instance.
void write_network_tsv(const std::string& path, const MultilayerNetwork& net);
void write_partition_tsv(const std::string& path,
                         const BlockPartition& partition);
void write_node_map_tsv(const std::string& path,
                        const std::vector<std::string>& names);

// Doubles are serialized at 12 significant digits; non-finite values
// become the string "n/a", as do undefined statistics.
double round_sig(double v);
nlohmann::ordered_json json_number(double v);
nlohmann::ordered_json json_opt(const std::optional<double>& v);

nlohmann::ordered_json params_json(const CorrERParams& p);
nlohmann::ordered_json fisher_json(const FisherReport& f);
nlohmann::ordered_json bundle_table_json(const CorrSBMParams& p);
nlohmann::ordered_json dcsbm_json(const CorrDCSBMParams& p);
// ROC/PR points are thinned to at most max_points, keeping endpoints.
nlohmann::ordered_json roc_json(const RocCurve& curve, std::size_t max_points);
nlohmann::ordered_json pr_json(const PrCurve& curve, std::size_t max_points);
nlohmann::ordered_json prediction_json(const PredictionReport& report,
                                       std::size_t max_curve_points);

// Report envelope: tool name, version, schema, subcommand, and the
// resolved configuration.
nlohmann::ordered_json report_envelope(const std::string& command,
                                       nlohmann::ordered_json config);

void write_json(const std::string& path, const nlohmann::ordered_json& doc);

}  // namespace corrnet
