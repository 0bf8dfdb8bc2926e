#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proclivity/graph.hpp"
#include "proclivity/prone.hpp"

namespace proclivity {

enum class FeatureMode { NNS, NFVR, NNFVR };

const char* to_string(FeatureMode m);
std::optional<FeatureMode> parse_feature_mode(std::string_view name);

struct FeatureConfig {
  std::size_t target = 0;
  std::size_t max_hop = 1;
  std::vector<double> hop_weights = {1.0};  // one weight per hop, in (0, 1]
  FeatureMode mode = FeatureMode::NFVR;
  GenerativeFunction generative = GenerativeFunction::XLogX;
  const ProclivityMatrix* proclivity = nullptr;  // required unless mode == NNS
  bool degree_normalize = true;

  // (1, 0.5, 0.25, ...) truncated/extended by halving to h entries.
  static std::vector<double> default_weights(std::size_t h);

  // Throws std::invalid_argument on any violated precondition.
  void validate(const AttributeSchema& schema) const;
};

struct FeatureBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 0;
};

struct FeatureMatrix {
  std::size_t row_count = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // row-major
  std::vector<FeatureBlock> blocks;

  // Target labels aligned with rows; exactly one of the two is meaningful.
  std::vector<std::uint32_t> labels;
  std::vector<double> real_labels;
  bool continuous_label = false;

  FeatureMode mode = FeatureMode::NFVR;
  std::size_t target = 0;
  std::size_t max_hop = 1;
  std::vector<double> hop_weights;
  bool degree_normalized = true;
  GenerativeFunction generative = GenerativeFunction::XLogX;
  std::vector<double> prone_row;  // rho row applied per attribute; empty for NNS

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  std::span<double> row(std::size_t i) {
    return {values.data() + i * dim, dim};
  }
};

// Distribution of attribute levels over a nonempty node set (coordinates
// sum to 1). Throws std::invalid_argument on an empty set; callers that
// aggregate shells substitute the zero vector instead.
std::vector<double> aggregate_set(const AttributedGraph& g, std::span<const NodeId> members,
                                  std::size_t attr);

// Hop-weighted sum of shell distributions; empty shells contribute zero.
std::vector<double> hop_aggregate(const AttributedGraph& g, NodeId v, std::size_t attr,
                                  const FeatureConfig& cfg);

std::vector<double> nns_vector(const AttributedGraph& g, NodeId v, const FeatureConfig& cfg);
std::vector<double> nfvr_vector(const AttributedGraph& g, NodeId v, const FeatureConfig& cfg);
std::vector<double> nnfvr_vector(const AttributedGraph& g, NodeId v, const FeatureConfig& cfg);

// Feature vectors for every node, rows ordered by node id. Deterministic
// for any thread count.
FeatureMatrix featurize_all(const AttributedGraph& g, const FeatureConfig& cfg,
                            std::size_t threads = 1);

// CSV with header node,<block:coord>...,label plus a sidecar JSON layout
// descriptor at `layout_path`.
void write_feature_csv(const FeatureMatrix& fm, const AttributedGraph& g,
                       const std::string& csv_path, const std::string& layout_path);

// A feature matrix read back from disk, with enough label metadata to train
// on it without the graph.
struct FeatureFile {
  FeatureMatrix matrix;
  std::vector<std::string> node_tokens;
  std::vector<std::string> label_levels;      // empty for a continuous label
  std::size_t label_missing_level = 0;
  std::string target_name;
};

FeatureFile read_feature_csv(const std::string& csv_path, const std::string& layout_path);

}  // namespace proclivity
