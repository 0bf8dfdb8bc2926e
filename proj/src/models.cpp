#include "proclivity/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "proclivity/rng.hpp"

namespace proclivity {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Knn: return "knn";
    case ModelKind::NaiveBayes: return "nb";
    case ModelKind::DecisionTree: return "dt";
    case ModelKind::LinearSvm: return "svm";
    case ModelKind::LinearRegression: return "lr";
    case ModelKind::Wvrn: return "wvrn";
    case ModelKind::Majority: return "majority";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  if (name == "knn") return ModelKind::Knn;
  if (name == "nb") return ModelKind::NaiveBayes;
  if (name == "dt") return ModelKind::DecisionTree;
  if (name == "svm") return ModelKind::LinearSvm;
  if (name == "lr") return ModelKind::LinearRegression;
  if (name == "wvrn") return ModelKind::Wvrn;
  if (name == "majority") return ModelKind::Majority;
  return std::nullopt;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::uint32_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<std::uint32_t>(best);
}

}  // namespace

// ---------------------------------------------------------------- KNN

KnnClassifier::KnnClassifier(const FeatureMatrix& features,
                             std::span<const std::uint32_t> train_rows, std::size_t k)
    : k_(k) {
  if (train_rows.empty()) throw std::invalid_argument("knn: empty training set");
  if (k_ < 1) throw std::invalid_argument("knn: k must be >= 1");
  points_.reserve(train_rows.size());
  for (std::uint32_t r : train_rows) {
    auto row = features.row(r);
    points_.emplace_back(row.begin(), row.end());
    labels_.push_back(features.labels.at(r));
    ids_.push_back(r);
  }
}

std::uint32_t KnnClassifier::predict(std::span<const double> x) const {
  const std::size_t n = points_.size();
  const std::size_t k = std::min(k_, n);

  std::vector<std::pair<double, std::uint32_t>> order(n);  // (d^2, position)
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = {squared_distance(x, points_[i]), static_cast<std::uint32_t>(i)};
  }
  auto closer = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return ids_[a.second] < ids_[b.second];  // distance ties: lower node id
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   order.end(), closer);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), closer);

  std::uint32_t max_label = 0;
  for (std::size_t i = 0; i < k; ++i) max_label = std::max(max_label, labels_[order[i].second]);
  std::vector<std::uint32_t> votes(max_label + 1, 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[labels_[order[i].second]];
  const std::uint32_t top = *std::max_element(votes.begin(), votes.end());
  // vote ties resolve to the nearest neighbor carrying a tied label
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint32_t lbl = labels_[order[i].second];
    if (votes[lbl] == top) return lbl;
  }
  return labels_[order[0].second];
}

// ---------------------------------------------------------------- Naive Bayes

GaussianNaiveBayes::GaussianNaiveBayes(const FeatureMatrix& features,
                                       std::span<const std::uint32_t> train_rows,
                                       double smoothing)
    : smoothing_(smoothing) {
  if (train_rows.empty()) throw std::invalid_argument("nb: empty training set");
  const std::size_t dim = features.dim;

  for (std::uint32_t r : train_rows) {
    const std::uint32_t lbl = features.labels.at(r);
    if (std::find(class_levels_.begin(), class_levels_.end(), lbl) == class_levels_.end()) {
      class_levels_.push_back(lbl);
    }
  }
  std::sort(class_levels_.begin(), class_levels_.end());

  const std::size_t nc = class_levels_.size();
  means_.assign(nc, std::vector<double>(dim, 0.0));
  variances_.assign(nc, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(nc, 0);

  auto class_of = [&](std::uint32_t lbl) {
    return static_cast<std::size_t>(
        std::lower_bound(class_levels_.begin(), class_levels_.end(), lbl) - class_levels_.begin());
  };

  for (std::uint32_t r : train_rows) {
    const std::size_t c = class_of(features.labels[r]);
    ++counts[c];
    auto row = features.row(r);
    for (std::size_t d = 0; d < dim; ++d) means_[c][d] += row[d];
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (double& m : means_[c]) m /= static_cast<double>(counts[c]);
  }
  for (std::uint32_t r : train_rows) {
    const std::size_t c = class_of(features.labels[r]);
    auto row = features.row(r);
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = row[d] - means_[c][d];
      variances_[c][d] += diff * diff;
    }
  }
  log_priors_.resize(nc);
  const double n = static_cast<double>(train_rows.size());
  for (std::size_t c = 0; c < nc; ++c) {
    for (double& v : variances_[c]) {
      v = std::max(v / static_cast<double>(counts[c]) + smoothing_, kVarianceFloor);
    }
    log_priors_[c] = std::log(static_cast<double>(counts[c]) / n);
  }
}

std::vector<double> GaussianNaiveBayes::log_joint(std::span<const double> x) const {
  constexpr double kLog2Pi = 1.8378770664093454836;
  std::vector<double> scores(class_levels_.size());
  for (std::size_t c = 0; c < class_levels_.size(); ++c) {
    double s = log_priors_[c];
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double var = variances_[c][d];
      const double diff = x[d] - means_[c][d];
      s += -0.5 * (kLog2Pi + std::log(var)) - diff * diff / (2.0 * var);
    }
    scores[c] = s;
  }
  return scores;
}

std::vector<double> GaussianNaiveBayes::posterior(std::span<const double> x) const {
  std::vector<double> scores = log_joint(x);
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : scores) s /= total;
  return scores;
}

std::uint32_t GaussianNaiveBayes::predict(std::span<const double> x) const {
  const std::vector<double> scores = log_joint(x);
  return class_levels_[argmax_lowest(scores)];
}

// ---------------------------------------------------------------- Decision tree

double gini_impurity(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (std::size_t c : class_counts) total += c;
  if (total == 0) return 0.0;
  double impurity = 1.0;
  for (std::size_t c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    impurity -= p * p;
  }
  return impurity;
}

DecisionTreeClassifier::DecisionTreeClassifier(const FeatureMatrix& features,
                                               std::span<const std::uint32_t> train_rows) {
  if (train_rows.empty()) throw std::invalid_argument("dt: empty training set");
  std::vector<std::uint32_t> rows(train_rows.begin(), train_rows.end());
  build(features, rows, 0, rows.size(), 0);
}

std::uint32_t DecisionTreeClassifier::build(const FeatureMatrix& f,
                                            std::vector<std::uint32_t>& rows, std::size_t begin,
                                            std::size_t end, std::size_t depth) {
  const std::size_t size = end - begin;
  std::uint32_t max_label = 0;
  for (std::size_t i = begin; i < end; ++i) max_label = std::max(max_label, f.labels[rows[i]]);
  std::vector<std::size_t> counts(max_label + 1, 0);
  for (std::size_t i = begin; i < end; ++i) ++counts[f.labels[rows[i]]];

  std::uint32_t majority = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[majority]) majority = static_cast<std::uint32_t>(c);
  }
  const bool pure = counts[majority] == size;

  auto make_leaf = [&]() {
    nodes_.push_back({-1, 0.0, 0, 0, majority});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  };
  if (pure || depth >= kMaxDepth || size < kMinNodeSize) return make_leaf();

  const double parent_impurity = gini_impurity(counts);
  // zero-gain splits are taken: the stopping rules are purity, depth, and
  // size only, which is what lets consistent xor-like data reach pure leaves
  double best_gain = -1.0;
  std::int32_t best_feature = -1;
  double best_threshold = 0.0;

  std::vector<std::pair<double, std::uint32_t>> column(size);  // (value, label)
  std::vector<std::size_t> left_counts(counts.size());
  for (std::size_t feat = 0; feat < f.dim; ++feat) {
    for (std::size_t i = 0; i < size; ++i) {
      const std::uint32_t r = rows[begin + i];
      column[i] = {f.row(r)[feat], f.labels[r]};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::fill(left_counts.begin(), left_counts.end(), 0);
    std::size_t moved = 0;
    for (std::size_t i = 0; i + 1 < size; ++i) {
      ++left_counts[column[i].second];
      ++moved;
      if (column[i].first == column[i + 1].first) continue;
      const double wl = static_cast<double>(moved) / static_cast<double>(size);
      double gl = gini_impurity(left_counts);
      std::vector<std::size_t> right_counts(counts);
      for (std::size_t c = 0; c < counts.size(); ++c) right_counts[c] -= left_counts[c];
      double gr = gini_impurity(right_counts);
      const double gain = parent_impurity - (wl * gl + (1.0 - wl) * gr);
      if (gain > best_gain + 1e-15) {
        best_gain = gain;
        best_feature = static_cast<std::int32_t>(feat);
        best_threshold = 0.5 * (column[i].first + column[i + 1].first);
      }
    }
  }
  if (best_feature < 0) return make_leaf();

  const auto mid = std::partition(
      rows.begin() + static_cast<std::ptrdiff_t>(begin), rows.begin() + static_cast<std::ptrdiff_t>(end),
      [&](std::uint32_t r) { return f.row(r)[static_cast<std::size_t>(best_feature)] <= best_threshold; });
  const std::size_t split = static_cast<std::size_t>(mid - rows.begin());
  if (split == begin || split == end) return make_leaf();  // numeric edge: nothing moved

  nodes_.push_back({best_feature, best_threshold, 0, 0, majority});
  const std::uint32_t self = static_cast<std::uint32_t>(nodes_.size() - 1);
  const std::uint32_t left = build(f, rows, begin, split, depth + 1);
  const std::uint32_t right = build(f, rows, split, end, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

std::uint32_t DecisionTreeClassifier::predict(std::span<const double> x) const {
  std::uint32_t at = 0;
  while (nodes_[at].feature >= 0) {
    at = x[static_cast<std::size_t>(nodes_[at].feature)] <= nodes_[at].threshold
             ? nodes_[at].left
             : nodes_[at].right;
  }
  return nodes_[at].label;
}

// ---------------------------------------------------------------- Linear SVM

LinearSvmClassifier::LinearSvmClassifier(const FeatureMatrix& features,
                                         std::span<const std::uint32_t> train_rows, double c,
                                         std::uint64_t seed) {
  if (train_rows.empty()) throw std::invalid_argument("svm: empty training set");
  if (!(c > 0.0)) throw std::invalid_argument("svm: C must be > 0");
  const std::size_t n = train_rows.size();
  const std::size_t dim = features.dim;
  lambda_ = 1.0 / (c * static_cast<double>(n));

  for (std::uint32_t r : train_rows) {
    const std::uint32_t lbl = features.labels.at(r);
    if (std::find(class_levels_.begin(), class_levels_.end(), lbl) == class_levels_.end()) {
      class_levels_.push_back(lbl);
    }
  }
  std::sort(class_levels_.begin(), class_levels_.end());
  const std::size_t nc = class_levels_.size();

  std::vector<std::vector<double>> x_aug(n, std::vector<double>(dim + 1, 1.0));
  std::vector<std::uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = features.row(train_rows[i]);
    std::copy(row.begin(), row.end(), x_aug[i].begin());
    labels[i] = features.labels[train_rows[i]];
  }

  weights_.assign(nc, std::vector<double>(dim + 1, 0.0));
  if (nc == 1) return;  // constant predictor

  std::vector<std::vector<int>> y(nc, std::vector<int>(n));
  for (std::size_t cls = 0; cls < nc; ++cls) {
    for (std::size_t i = 0; i < n; ++i) y[cls][i] = labels[i] == class_levels_[cls] ? 1 : -1;
  }

  // Pegasos steps; all one-vs-rest problems walk the same sample order so
  // relabelings permute the learned vectors exactly.
  const double radius = 1.0 / std::sqrt(lambda_);
  std::vector<std::vector<double>> w(nc, std::vector<double>(dim + 1, 0.0));
  std::vector<double> best_obj(nc, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::Engine eng(seed);

  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < kEpochs; ++epoch) {
    rng::shuffle(order, eng);
    for (std::size_t i : order) {
      ++step;
      const double eta = 1.0 / (lambda_ * static_cast<double>(step));
      const auto& x = x_aug[i];
      for (std::size_t cls = 0; cls < nc; ++cls) {
        auto& wc = w[cls];
        double margin = 0.0;
        for (std::size_t d = 0; d <= dim; ++d) margin += wc[d] * x[d];
        margin *= y[cls][i];
        const double keep = 1.0 - eta * lambda_;
        if (margin < 1.0) {
          const double push = eta * y[cls][i];
          for (std::size_t d = 0; d <= dim; ++d) wc[d] = keep * wc[d] + push * x[d];
        } else {
          for (double& v : wc) v *= keep;
        }
        double norm_sq = 0.0;
        for (double v : wc) norm_sq += v * v;
        if (norm_sq > radius * radius) {
          const double scale = radius / std::sqrt(norm_sq);
          for (double& v : wc) v *= scale;
        }
      }
    }
    for (std::size_t cls = 0; cls < nc; ++cls) {
      const double obj = binary_objective(w[cls], x_aug, y[cls], lambda_);
      if (obj < best_obj[cls]) {
        best_obj[cls] = obj;
        weights_[cls] = w[cls];
      }
    }
  }
}

double LinearSvmClassifier::binary_objective(std::span<const double> w,
                                             const std::vector<std::vector<double>>& x_aug,
                                             std::span<const int> y, double lambda) {
  double norm_sq = 0.0;
  for (double v : w) norm_sq += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < x_aug.size(); ++i) {
    double margin = 0.0;
    for (std::size_t d = 0; d < w.size(); ++d) margin += w[d] * x_aug[i][d];
    hinge += std::max(0.0, 1.0 - y[i] * margin);
  }
  return 0.5 * lambda * norm_sq + hinge / static_cast<double>(x_aug.size());
}

std::vector<double> LinearSvmClassifier::decision_values(std::span<const double> x) const {
  std::vector<double> scores(weights_.size());
  for (std::size_t cls = 0; cls < weights_.size(); ++cls) {
    double s = weights_[cls].back();  // bias coordinate
    for (std::size_t d = 0; d < x.size(); ++d) s += weights_[cls][d] * x[d];
    scores[cls] = s;
  }
  return scores;
}

std::uint32_t LinearSvmClassifier::predict(std::span<const double> x) const {
  const std::vector<double> scores = decision_values(x);
  return class_levels_[argmax_lowest(scores)];
}

// ---------------------------------------------------------------- QR least squares

std::vector<double> qr_least_squares(std::size_t rows, std::size_t cols, std::vector<double> a,
                                     std::vector<double> b) {
  if (rows < 1) throw std::invalid_argument("least squares needs at least one row");
  if (a.size() != rows * cols || b.size() != rows) throw std::invalid_argument("shape mismatch");

  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * cols + c]; };
  std::vector<std::size_t> perm(cols);
  std::iota(perm.begin(), perm.end(), 0);
  const std::size_t steps = std::min(rows, cols);

  std::size_t rank = 0;
  double first_diag = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    // column pivot: largest remaining norm below row k
    std::size_t pivot = k;
    double pivot_norm = -1.0;
    for (std::size_t c = k; c < cols; ++c) {
      double norm = 0.0;
      for (std::size_t r = k; r < rows; ++r) norm += at(r, c) * at(r, c);
      if (norm > pivot_norm) {
        pivot_norm = norm;
        pivot = c;
      }
    }
    if (pivot != k) {
      for (std::size_t r = 0; r < rows; ++r) std::swap(at(r, k), at(r, pivot));
      std::swap(perm[k], perm[pivot]);
    }

    double norm = std::sqrt(pivot_norm);
    if (k == 0) first_diag = norm;
    if (norm <= 0.0 || norm <= first_diag * 1e-12) break;  // rank deficient from here on

    // Householder vector stored in place below the diagonal
    const double head = at(k, k);
    const double alpha = head >= 0.0 ? -norm : norm;
    at(k, k) = head - alpha;
    double v_norm_sq = 0.0;
    for (std::size_t r = k; r < rows; ++r) v_norm_sq += at(r, k) * at(r, k);
    if (v_norm_sq > 0.0) {
      const double beta = 2.0 / v_norm_sq;
      for (std::size_t c = k + 1; c < cols; ++c) {
        double dot = 0.0;
        for (std::size_t r = k; r < rows; ++r) dot += at(r, k) * at(r, c);
        const double scale = beta * dot;
        for (std::size_t r = k; r < rows; ++r) at(r, c) -= scale * at(r, k);
      }
      double dot = 0.0;
      for (std::size_t r = k; r < rows; ++r) dot += at(r, k) * b[r];
      const double scale = beta * dot;
      for (std::size_t r = k; r < rows; ++r) b[r] -= scale * at(r, k);
    }
    at(k, k) = alpha;  // diagonal of R
    ++rank;
  }

  std::vector<double> z(rank, 0.0);
  for (std::size_t k = rank; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < rank; ++c) s -= at(k, c) * z[c];
    z[k] = s / at(k, k);
  }
  std::vector<double> x(cols, 0.0);
  for (std::size_t k = 0; k < rank; ++k) x[perm[k]] = z[k];
  return x;
}

LinearRegressionQr::LinearRegressionQr(const FeatureMatrix& features,
                                       std::span<const std::uint32_t> train_rows) {
  if (train_rows.empty()) throw std::invalid_argument("lr: empty training set");
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(train_rows.size());
  y.reserve(train_rows.size());
  for (std::uint32_t r : train_rows) {
    auto row = features.row(r);
    x.emplace_back(row.begin(), row.end());
    y.push_back(features.real_labels.at(r));
  }
  fit(x, y);
}

LinearRegressionQr::LinearRegressionQr(const std::vector<std::vector<double>>& x,
                                       std::span<const double> y) {
  if (x.empty()) throw std::invalid_argument("lr: empty training set");
  fit(x, y);
}

void LinearRegressionQr::fit(const std::vector<std::vector<double>>& x, std::span<const double> y) {
  const std::size_t rows = x.size();
  const std::size_t dim = x.front().size();
  std::vector<double> a(rows * (dim + 1), 1.0);  // intercept column appended
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(x[r].begin(), x[r].end(), a.begin() + static_cast<std::ptrdiff_t>(r * (dim + 1)));
  }
  coef_ = qr_least_squares(rows, dim + 1, std::move(a), {y.begin(), y.end()});
}

double LinearRegressionQr::predict(std::span<const double> x) const {
  double s = coef_.back();
  for (std::size_t d = 0; d < x.size(); ++d) s += coef_[d] * x[d];
  return s;
}

// ---------------------------------------------------------------- relational baselines

RelationalLabels RelationalLabels::from_train(const FeatureMatrix& features,
                                              std::span<const std::uint32_t> train_rows,
                                              std::size_t level_count) {
  if (train_rows.empty()) throw std::invalid_argument("relational: empty training set");
  RelationalLabels known;
  known.level_count = level_count;
  known.label.assign(features.row_count, -1);
  std::vector<std::size_t> counts(level_count, 0);
  for (std::uint32_t r : train_rows) {
    known.label[r] = features.labels.at(r);
    ++counts[features.labels[r]];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  known.global_majority = static_cast<std::uint32_t>(best);
  return known;
}

std::uint32_t wvrn_predict(const AttributedGraph& g, const FeatureMatrix& nns_features,
                           const RelationalLabels& known, NodeId v) {
  std::vector<double> weight(known.level_count, 0.0);
  bool any = false;
  const auto xv = nns_features.row(v);
  for (NodeId u : g.neighbors(v)) {
    const std::int64_t lbl = known.label[u];
    if (lbl < 0) continue;
    any = true;
    const double d = std::sqrt(squared_distance(xv, nns_features.row(u)));
    weight[static_cast<std::size_t>(lbl)] += 1.0 / (1.0 + d);
  }
  if (!any) return known.global_majority;
  return argmax_lowest(weight);
}

std::uint32_t majority_predict(const AttributedGraph& g, const RelationalLabels& known, NodeId v) {
  std::vector<double> counts(known.level_count, 0.0);
  bool any = false;
  for (NodeId u : g.neighbors(v)) {
    const std::int64_t lbl = known.label[u];
    if (lbl < 0) continue;
    any = true;
    counts[static_cast<std::size_t>(lbl)] += 1.0;
  }
  if (!any) return known.global_majority;
  return argmax_lowest(counts);
}

std::unique_ptr<Classifier> fit_classifier(const FeatureMatrix& features,
                                           std::span<const std::uint32_t> train_rows,
                                           const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Knn:
      return std::make_unique<KnnClassifier>(features, train_rows, spec.knn_k);
    case ModelKind::NaiveBayes:
      return std::make_unique<GaussianNaiveBayes>(features, train_rows, spec.nb_smoothing);
    case ModelKind::DecisionTree:
      return std::make_unique<DecisionTreeClassifier>(features, train_rows);
    case ModelKind::LinearSvm:
      return std::make_unique<LinearSvmClassifier>(features, train_rows, spec.svm_c, spec.seed);
    default:
      throw std::invalid_argument("model kind is not a feature-vector classifier");
  }
}

}  // namespace proclivity
