#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proclivity/featurize.hpp"
#include "proclivity/graph.hpp"

namespace proclivity {

enum class ModelKind { Knn, NaiveBayes, DecisionTree, LinearSvm, LinearRegression, Wvrn, Majority };

const char* to_string(ModelKind k);
std::optional<ModelKind> parse_model(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::Knn;
  std::size_t knn_k = 10;
  double nb_smoothing = 0.0;
  double svm_c = 1.0;
  std::uint64_t seed = 42;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::uint32_t predict(std::span<const double> x) const = 0;
};

// Euclidean k-NN with majority vote. Distance ties resolve to the lower
// row id; vote ties to the nearest neighbor among the tied labels.
class KnnClassifier : public Classifier {
 public:
  KnnClassifier(const FeatureMatrix& features, std::span<const std::uint32_t> train_rows,
                std::size_t k);
  std::uint32_t predict(std::span<const double> x) const override;

 private:
  std::vector<std::vector<double>> points_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::uint32_t> ids_;
  std::size_t k_;
};

// Gaussian class-conditional model per dimension; priors from train
// frequencies. Variances are floored to keep zero smoothing usable on
// continuous features.
class GaussianNaiveBayes : public Classifier {
 public:
  static constexpr double kVarianceFloor = 1e-9;

  GaussianNaiveBayes(const FeatureMatrix& features, std::span<const std::uint32_t> train_rows,
                     double smoothing);
  std::uint32_t predict(std::span<const double> x) const override;

  // Normalized class posterior, classes ordered by level index.
  std::vector<double> posterior(std::span<const double> x) const;
  const std::vector<std::uint32_t>& classes() const noexcept { return class_levels_; }

 private:
  std::vector<double> log_joint(std::span<const double> x) const;

  std::vector<std::uint32_t> class_levels_;
  std::vector<double> log_priors_;
  std::vector<std::vector<double>> means_;       // per class
  std::vector<std::vector<double>> variances_;   // per class, floored
  double smoothing_ = 0.0;
};

double gini_impurity(std::span<const std::size_t> class_counts);

// Binary axis-aligned CART-style tree, splits chosen by maximal Gini
// decrease over midpoints of sorted unique values.
class DecisionTreeClassifier : public Classifier {
 public:
  static constexpr std::size_t kMaxDepth = 20;
  static constexpr std::size_t kMinNodeSize = 2;

  DecisionTreeClassifier(const FeatureMatrix& features, std::span<const std::uint32_t> train_rows);
  std::uint32_t predict(std::span<const double> x) const override;
  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 for leaves
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t label = 0;
  };
  std::uint32_t build(const FeatureMatrix& f, std::vector<std::uint32_t>& rows,
                      std::size_t begin, std::size_t end, std::size_t depth);
  std::vector<Node> nodes_;
};

// One-vs-rest linear SVMs trained with seeded stochastic subgradient
// descent on the hinge loss, lambda = 1 / (C * n). The bias rides in an
// appended constant coordinate.
class LinearSvmClassifier : public Classifier {
 public:
  static constexpr std::size_t kEpochs = 200;

  LinearSvmClassifier(const FeatureMatrix& features, std::span<const std::uint32_t> train_rows,
                      double c, std::uint64_t seed);
  std::uint32_t predict(std::span<const double> x) const override;

  std::vector<double> decision_values(std::span<const double> x) const;
  const std::vector<std::uint32_t>& classes() const noexcept { return class_levels_; }
  const std::vector<std::vector<double>>& weights() const noexcept { return weights_; }
  double lambda() const noexcept { return lambda_; }

  // Regularized hinge objective of one binary problem; exposed so an
  // independent optimizer can be compared against the trained weights.
  static double binary_objective(std::span<const double> w,
                                 const std::vector<std::vector<double>>& x_aug,
                                 std::span<const int> y, double lambda);

 private:
  std::vector<std::uint32_t> class_levels_;
  std::vector<std::vector<double>> weights_;  // per class, dim + 1
  double lambda_ = 0.0;
};

// Least squares via Householder QR with column pivoting. Rank-deficient
// columns receive zero coefficients. a is row-major rows x cols and is
// consumed.
std::vector<double> qr_least_squares(std::size_t rows, std::size_t cols,
                                     std::vector<double> a, std::vector<double> b);

class LinearRegressionQr {
 public:
  LinearRegressionQr(const FeatureMatrix& features, std::span<const std::uint32_t> train_rows);
  // Generic fit on explicit rows; intercept column appended internally.
  LinearRegressionQr(const std::vector<std::vector<double>>& x, std::span<const double> y);

  double predict(std::span<const double> x) const;
  // dim coefficients followed by the intercept.
  const std::vector<double>& coefficients() const noexcept { return coef_; }

 private:
  void fit(const std::vector<std::vector<double>>& x, std::span<const double> y);
  std::vector<double> coef_;
};

// Labels known on the train set only; -1 marks unknown.
struct RelationalLabels {
  std::vector<std::int64_t> label;
  std::uint32_t global_majority = 0;
  std::size_t level_count = 0;

  static RelationalLabels from_train(const FeatureMatrix& features,
                                     std::span<const std::uint32_t> train_rows,
                                     std::size_t level_count);
};

// Weighted vote over labeled neighbors, weight 1 / (1 + euclidean distance
// of the endpoints' NNS vectors). Falls back to the global train majority
// when no neighbor is labeled.
std::uint32_t wvrn_predict(const AttributedGraph& g, const FeatureMatrix& nns_features,
                           const RelationalLabels& known, NodeId v);

// Unweighted mode of labeled-neighbor levels, same fallback.
std::uint32_t majority_predict(const AttributedGraph& g, const RelationalLabels& known, NodeId v);

std::unique_ptr<Classifier> fit_classifier(const FeatureMatrix& features,
                                           std::span<const std::uint32_t> train_rows,
                                           const ModelSpec& spec);

}  // namespace proclivity
