#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "proclivity/featurize.hpp"
#include "proclivity/graph.hpp"
#include "proclivity/models.hpp"

namespace proclivity {

struct SplitResult {
  std::vector<NodeId> train;
  std::vector<NodeId> test;
};

// Seeded uniform split over nodes whose target value is present; nodes with
// the missing level (or NaN for continuous targets) belong to neither set.
SplitResult split_nodes(const AttributedGraph& g, std::size_t target, double train_fraction,
                        std::uint64_t seed);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1_macro = 0.0;
};

struct RegressionMetrics {
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
};

ClassificationMetrics classification_metrics(std::span<const std::uint32_t> predicted,
                                             std::span<const std::uint32_t> actual);
RegressionMetrics regression_metrics(std::span<const double> predicted,
                                     std::span<const double> actual);

struct ExperimentConfig {
  std::string target;
  FeatureMode mode = FeatureMode::NFVR;
  ModelSpec model;
  std::size_t h = 1;
  std::vector<double> hop_weights;  // empty -> FeatureConfig::default_weights(h)
  GenerativeFunction generative = GenerativeFunction::XLogX;
  double train_fraction = 0.7;
  std::uint64_t seed = 42;
  std::size_t repetitions = 1;
  std::size_t bins = 5;
  bool exclude_missing = false;
  bool degree_normalize = true;
  std::size_t threads = 1;
  bool capture_predictions = false;  // keep per-node predictions in the report

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ClassificationMetrics cls;
  RegressionMetrics reg;
  double featurize_seconds = 0.0;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  // filled only when capture_predictions is set; aligned with test_nodes
  std::vector<NodeId> test_nodes;
  std::vector<std::string> predicted;
  std::vector<std::string> actual;
};

struct MetricsReport {
  bool regression = false;
  std::vector<RepetitionResult> repetitions;
  ClassificationMetrics mean_cls;
  RegressionMetrics mean_reg;
  nlohmann::json config_echo;

  nlohmann::json to_json() const;
};

// load -> discretize (when needed) -> prone_matrix -> split -> featurize with
// test-target masking -> fit -> predict -> metrics, repeated with seeds
// seed + rep and averaged.
MetricsReport run_experiment(const AttributedGraph& g, const ExperimentConfig& cfg);

enum class SweepParameter { K, H };

struct SweepRow {
  double value = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  MetricsReport report;
};

// One run_experiment per value; only the swept parameter varies, splits share
// the config seed.
std::vector<SweepRow> sweep(const AttributedGraph& g, const ExperimentConfig& cfg,
                            SweepParameter param, std::span<const double> values);

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace proclivity
