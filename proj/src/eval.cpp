#include "proclivity/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "proclivity/rng.hpp"

namespace proclivity {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SplitResult split_nodes(const AttributedGraph& g, std::size_t target, double train_fraction,
                        std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  std::vector<NodeId> labeled;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (!g.missing_at(v, target)) labeled.push_back(v);
  }
  if (labeled.size() < 2) throw DataError("fewer than two nodes carry the target attribute");

  rng::Engine eng(seed);
  rng::shuffle(labeled, eng);
  auto k = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(labeled.size())));
  k = std::clamp<std::size_t>(k, 1, labeled.size() - 1);

  SplitResult result;
  result.train.assign(labeled.begin(), labeled.begin() + static_cast<std::ptrdiff_t>(k));
  result.test.assign(labeled.begin() + static_cast<std::ptrdiff_t>(k), labeled.end());
  std::sort(result.train.begin(), result.train.end());
  std::sort(result.test.begin(), result.test.end());
  return result;
}

ClassificationMetrics classification_metrics(std::span<const std::uint32_t> predicted,
                                             std::span<const std::uint32_t> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("length mismatch");
  if (predicted.empty()) throw std::invalid_argument("empty prediction vector");

  std::size_t hits = 0;
  std::set<std::uint32_t> classes;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == actual[i]) ++hits;
    classes.insert(predicted[i]);
    classes.insert(actual[i]);
  }

  double f1_sum = 0.0;
  for (std::uint32_t c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const bool p = predicted[i] == c;
      const bool a = actual[i] == c;
      if (p && a) ++tp;
      if (p && !a) ++fp;
      if (!p && a) ++fn;
    }
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    f1_sum += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }

  ClassificationMetrics m;
  m.accuracy = static_cast<double>(hits) / static_cast<double>(predicted.size());
  m.f1_macro = f1_sum / static_cast<double>(classes.size());
  return m;
}

RegressionMetrics regression_metrics(std::span<const double> predicted,
                                     std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("length mismatch");
  if (predicted.size() < 2) throw std::invalid_argument("need at least two predictions");

  const double n = static_cast<double>(predicted.size());
  double abs_sum = 0.0, sq_sum = 0.0, mean_actual = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
    mean_actual += actual[i];
  }
  mean_actual /= n;
  double ss_tot = 0.0;
  for (double a : actual) ss_tot += (a - mean_actual) * (a - mean_actual);

  RegressionMetrics m;
  m.mae = abs_sum / n;
  m.mse = sq_sum / n;
  m.rmse = std::sqrt(m.mse);
  if (ss_tot > 0.0) {
    m.r2 = 1.0 - sq_sum / ss_tot;
  } else {
    m.r2 = sq_sum == 0.0 ? 1.0 : 0.0;  // constant target: perfect or no skill
  }
  return m;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["target"] = target;
  j["mode"] = proclivity::to_string(mode);
  j["model"] = {{"kind", proclivity::to_string(model.kind)},
                {"knn_k", model.knn_k},
                {"nb_smoothing", model.nb_smoothing},
                {"svm_c", model.svm_c}};
  if (model.kind == ModelKind::Wvrn) {
    j["model"]["wvrn_similarity"] = "1/(1+euclidean_nns_distance)";
  }
  j["h"] = h;
  j["hop_weights"] = hop_weights.empty() ? FeatureConfig::default_weights(h) : hop_weights;
  j["generative"] = proclivity::to_string(generative);
  j["train_fraction"] = train_fraction;
  j["seed"] = seed;
  j["repetitions"] = repetitions;
  j["bins"] = bins;
  j["exclude_missing"] = exclude_missing;
  j["degree_normalize"] = degree_normalize;
  j["threads"] = threads;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.target = j.at("target").get<std::string>();
  if (j.contains("mode")) {
    auto m = parse_feature_mode(j.at("mode").get<std::string>());
    if (!m) throw std::invalid_argument("unknown mode in config");
    cfg.mode = *m;
  }
  if (j.contains("model")) {
    const auto& jm = j.at("model");
    if (jm.contains("kind")) {
      auto k = parse_model(jm.at("kind").get<std::string>());
      if (!k) throw std::invalid_argument("unknown model kind in config");
      cfg.model.kind = *k;
    }
    if (jm.contains("knn_k")) cfg.model.knn_k = jm.at("knn_k").get<std::size_t>();
    if (jm.contains("nb_smoothing")) cfg.model.nb_smoothing = jm.at("nb_smoothing").get<double>();
    if (jm.contains("svm_c")) cfg.model.svm_c = jm.at("svm_c").get<double>();
  }
  if (j.contains("h")) cfg.h = j.at("h").get<std::size_t>();
  if (j.contains("hop_weights")) cfg.hop_weights = j.at("hop_weights").get<std::vector<double>>();
  if (j.contains("generative")) {
    auto g = parse_generative(j.at("generative").get<std::string>());
    if (!g) throw std::invalid_argument("unknown generative function in config");
    cfg.generative = *g;
  }
  if (j.contains("train_fraction")) cfg.train_fraction = j.at("train_fraction").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("repetitions")) cfg.repetitions = j.at("repetitions").get<std::size_t>();
  if (j.contains("bins")) cfg.bins = j.at("bins").get<std::size_t>();
  if (j.contains("exclude_missing")) cfg.exclude_missing = j.at("exclude_missing").get<bool>();
  if (j.contains("degree_normalize")) cfg.degree_normalize = j.at("degree_normalize").get<bool>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<std::size_t>();
  return cfg;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["task"] = regression ? "regression" : "classification";
  j["config"] = config_echo;
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : repetitions) {
    nlohmann::json jr;
    jr["seed"] = r.seed;
    jr["train_size"] = r.train_size;
    jr["test_size"] = r.test_size;
    if (regression) {
      jr["mae"] = r.reg.mae;
      jr["mse"] = r.reg.mse;
      jr["rmse"] = r.reg.rmse;
      jr["r2"] = r.reg.r2;
    } else {
      jr["accuracy"] = r.cls.accuracy;
      jr["f1_macro"] = r.cls.f1_macro;
    }
    jr["timings"] = {{"featurize_seconds", r.featurize_seconds},
                     {"fit_seconds", r.fit_seconds},
                     {"predict_seconds", r.predict_seconds}};
    reps.push_back(jr);
  }
  j["repetitions"] = reps;
  if (regression) {
    j["mean"] = {{"mae", mean_reg.mae}, {"mse", mean_reg.mse},
                 {"rmse", mean_reg.rmse}, {"r2", mean_reg.r2}};
  } else {
    j["mean"] = {{"accuracy", mean_cls.accuracy}, {"f1_macro", mean_cls.f1_macro}};
  }
  return j;
}

MetricsReport run_experiment(const AttributedGraph& g, const ExperimentConfig& cfg) {
  const auto& schema = g.schema();
  auto target = schema.index_of(cfg.target);
  if (!target) {
    std::string candidates;
    for (const auto& a : schema.attributes()) {
      if (!candidates.empty()) candidates += ", ";
      candidates += a.name;
    }
    throw std::invalid_argument("unknown attribute '" + cfg.target + "'; candidates: " + candidates);
  }
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");

  const bool regression = cfg.model.kind == ModelKind::LinearRegression;
  if (regression && schema.attribute(*target).discrete()) {
    throw DataError("linear regression needs a numeric-continuous target attribute");
  }

  AttributedGraph g_disc = g;
  for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
    if (!g_disc.schema().attribute(a).discrete()) g_disc = g_disc.discretize(a, cfg.bins);
  }

  FeatureConfig fc;
  fc.target = *target;
  fc.max_hop = cfg.h;
  fc.hop_weights = cfg.hop_weights.empty() ? FeatureConfig::default_weights(cfg.h) : cfg.hop_weights;
  fc.mode = cfg.mode;
  fc.generative = cfg.generative;
  fc.degree_normalize = cfg.degree_normalize;

  ProclivityMatrix prone_values;
  if (cfg.mode != FeatureMode::NNS) {
    prone_values = prone_matrix(g_disc, cfg.generative, {cfg.exclude_missing});
    fc.proclivity = &prone_values;
  }
  fc.validate(g_disc.schema());

  const bool relational = cfg.model.kind == ModelKind::Wvrn || cfg.model.kind == ModelKind::Majority;
  const std::size_t target_levels = g_disc.schema().attribute(*target).level_count();

  MetricsReport report;
  report.regression = regression;
  report.config_echo = cfg.to_json();

  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    RepetitionResult rr;
    rr.seed = cfg.seed + rep;
    SplitResult split = split_nodes(g_disc, *target, cfg.train_fraction, rr.seed);
    rr.train_size = split.train.size();
    rr.test_size = split.test.size();

    // featurize on the masked graph so test-node target values cannot leak
    // into any neighborhood block
    AttributedGraph g_masked = g_disc.with_levels_masked(*target, split.test);
    auto t0 = Clock::now();
    FeatureMatrix features = featurize_all(g_masked, fc, std::max<std::size_t>(1, cfg.threads));
    rr.featurize_seconds = seconds_since(t0);

    // labels always come from the unmasked data
    if (regression) {
      features.continuous_label = true;
      features.labels.clear();
      features.real_labels = g.column(*target).reals;
    } else {
      features.continuous_label = false;
      features.labels = g_disc.column(*target).levels;
    }

    ModelSpec spec = cfg.model;
    spec.seed = rr.seed;

    auto capture_real = [&](std::span<const double> pred, std::span<const double> actual) {
      if (!cfg.capture_predictions) return;
      char buf[64];
      rr.test_nodes = split.test;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", pred[i]);
        rr.predicted.emplace_back(buf);
        std::snprintf(buf, sizeof(buf), "%.17g", actual[i]);
        rr.actual.emplace_back(buf);
      }
    };
    auto capture_levels = [&](std::span<const std::uint32_t> pred,
                              std::span<const std::uint32_t> actual) {
      if (!cfg.capture_predictions) return;
      const auto& levels = g_disc.schema().attribute(*target).levels;
      rr.test_nodes = split.test;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        rr.predicted.push_back(levels[pred[i]]);
        rr.actual.push_back(levels[actual[i]]);
      }
    };

    if (regression) {
      auto t1 = Clock::now();
      LinearRegressionQr model(features, split.train);
      rr.fit_seconds = seconds_since(t1);
      auto t2 = Clock::now();
      std::vector<double> pred, actual;
      pred.reserve(split.test.size());
      for (NodeId v : split.test) {
        pred.push_back(model.predict(features.row(v)));
        actual.push_back(features.real_labels[v]);
      }
      rr.predict_seconds = seconds_since(t2);
      rr.reg = regression_metrics(pred, actual);
      capture_real(pred, actual);
    } else if (relational) {
      auto t1 = Clock::now();
      FeatureMatrix nns_features;
      const FeatureMatrix* similarity = &features;
      if (cfg.model.kind == ModelKind::Wvrn && cfg.mode != FeatureMode::NNS) {
        FeatureConfig nns_cfg = fc;
        nns_cfg.mode = FeatureMode::NNS;
        nns_cfg.proclivity = nullptr;
        nns_features = featurize_all(g_masked, nns_cfg, std::max<std::size_t>(1, cfg.threads));
        similarity = &nns_features;
      }
      RelationalLabels known = RelationalLabels::from_train(features, split.train, target_levels);
      rr.fit_seconds = seconds_since(t1);
      auto t2 = Clock::now();
      std::vector<std::uint32_t> pred, actual;
      pred.reserve(split.test.size());
      for (NodeId v : split.test) {
        pred.push_back(cfg.model.kind == ModelKind::Wvrn
                           ? wvrn_predict(g_masked, *similarity, known, v)
                           : majority_predict(g_masked, known, v));
        actual.push_back(features.labels[v]);
      }
      rr.predict_seconds = seconds_since(t2);
      rr.cls = classification_metrics(pred, actual);
      capture_levels(pred, actual);
    } else {
      auto t1 = Clock::now();
      auto model = fit_classifier(features, split.train, spec);
      rr.fit_seconds = seconds_since(t1);
      auto t2 = Clock::now();
      std::vector<std::uint32_t> pred, actual;
      pred.reserve(split.test.size());
      for (NodeId v : split.test) {
        pred.push_back(model->predict(features.row(v)));
        actual.push_back(features.labels[v]);
      }
      rr.predict_seconds = seconds_since(t2);
      rr.cls = classification_metrics(pred, actual);
      capture_levels(pred, actual);
    }
    report.repetitions.push_back(std::move(rr));
  }

  const double n = static_cast<double>(report.repetitions.size());
  for (const auto& rr : report.repetitions) {
    report.mean_cls.accuracy += rr.cls.accuracy / n;
    report.mean_cls.f1_macro += rr.cls.f1_macro / n;
    report.mean_reg.mae += rr.reg.mae / n;
    report.mean_reg.mse += rr.reg.mse / n;
    report.mean_reg.rmse += rr.reg.rmse / n;
    report.mean_reg.r2 += rr.reg.r2 / n;
  }
  return report;
}

std::vector<SweepRow> sweep(const AttributedGraph& g, const ExperimentConfig& cfg,
                            SweepParameter param, std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (cfg.model.kind == ModelKind::LinearRegression) {
    throw DataError("sweep reports accuracy; use a classification model");
  }
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double value : values) {
    ExperimentConfig point = cfg;  // shared seed: splits agree across points
    if (param == SweepParameter::K) {
      if (value < 1.0) throw std::invalid_argument("k must be >= 1");
      point.model.knn_k = static_cast<std::size_t>(value);
    } else {
      if (value < 1.0) throw std::invalid_argument("h must be >= 1");
      point.h = static_cast<std::size_t>(value);
      if (point.hop_weights.size() != point.h) point.hop_weights.clear();
    }
    SweepRow row;
    row.value = value;
    row.report = run_experiment(g, point);
    double mean = 0.0;
    for (const auto& r : row.report.repetitions) mean += r.cls.accuracy;
    mean /= static_cast<double>(row.report.repetitions.size());
    double var = 0.0;
    for (const auto& r : row.report.repetitions) {
      var += (r.cls.accuracy - mean) * (r.cls.accuracy - mean);
    }
    var /= static_cast<double>(row.report.repetitions.size());
    row.accuracy_mean = mean;
    row.accuracy_std = std::sqrt(var);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "param,accuracy_mean,accuracy_std\n";
  char buf[96];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f\n", row.value, row.accuracy_mean,
                  row.accuracy_std);
    out += buf;
  }
  return out;
}

}  // namespace proclivity
