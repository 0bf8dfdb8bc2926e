#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "proclivity/eval.hpp"
#include "proclivity/featurize.hpp"
#include "proclivity/graph.hpp"
#include "proclivity/models.hpp"
#include "proclivity/prone.hpp"
#include "proclivity/rng.hpp"
#include "proclivity/synth.hpp"

namespace {

using namespace proclivity;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t resolve_threads(std::size_t flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("PROCLIVITY_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

GenerativeFunction resolve_generative(const std::string& name) {
  auto f = parse_generative(name);
  if (!f) throw UsageError("unknown generative function '" + name + "' (square|cube|xlogx)");
  return *f;
}

std::size_t resolve_attribute(const AttributeSchema& schema, const std::string& name) {
  auto idx = schema.index_of(name);
  if (idx) return *idx;
  std::string candidates;
  for (const auto& a : schema.attributes()) {
    if (!candidates.empty()) candidates += ", ";
    candidates += a.name;
  }
  throw UsageError("unknown attribute '" + name + "'; candidates: " + candidates);
}

AttributedGraph load_discretized(const std::string& edges, const std::string& attrs,
                                 std::size_t bins, const LoadOptions& opts,
                                 LoadStats* stats = nullptr) {
  AttributedGraph g = AttributedGraph::load(edges, attrs, opts, stats);
  for (std::size_t a = 0; a < g.schema().attribute_count(); ++a) {
    if (!g.schema().attribute(a).discrete()) g = g.discretize(a, bins);
  }
  return g;
}

void report_load(const LoadStats& stats) {
  if (stats.self_loops_dropped > 0 || stats.duplicate_edges_dropped > 0) {
    std::cout << "dropped " << stats.self_loops_dropped << " self-loop(s) and "
              << stats.duplicate_edges_dropped << " duplicate edge(s)\n";
  }
}

int cmd_prone(const std::string& edges, const std::string& attrs, const std::string& f_name,
              const std::string& out, const std::string& json_out, std::size_t bins,
              bool exclude_missing, const LoadOptions& opts) {
  const GenerativeFunction f = resolve_generative(f_name);
  LoadStats stats;
  AttributedGraph g = load_discretized(edges, attrs, bins, opts, &stats);
  report_load(stats);

  ProclivityMatrix p = prone_matrix(g, f, {exclude_missing});
  const auto& schema = g.schema();

  std::size_t flagged = 0;
  for (std::uint8_t u : p.undefined) flagged += u;
  if (flagged > 0) {
    std::cerr << "warning: " << flagged
              << " attribute pair(s) had an undefined divergence; rho set to 0\n";
  }

  std::size_t width = 9;
  for (const auto& a : schema.attributes()) width = std::max(width, a.name.size() + 2);
  std::printf("%*s", static_cast<int>(width), "");
  for (std::size_t j = 0; j < p.size; ++j) {
    std::printf("%*s", static_cast<int>(width), schema.attribute(j).name.c_str());
  }
  std::printf("\n");
  for (std::size_t i = 0; i < p.size; ++i) {
    std::printf("%*s", static_cast<int>(width), schema.attribute(i).name.c_str());
    for (std::size_t j = 0; j < p.size; ++j) {
      std::printf("%*.4f", static_cast<int>(width), p.at(i, j));
    }
    std::printf("\n");
  }
  if (!out.empty()) {
    export_heatmap(p, schema, out);
    std::cout << "wrote " << out << "\n";
  }
  if (!json_out.empty()) {
    nlohmann::json j;
    j["generative"] = to_string(f);
    j["attributes"] = nlohmann::json::array();
    for (const auto& a : schema.attributes()) j["attributes"].push_back(a.name);
    j["values"] = nlohmann::json::array();
    j["undefined"] = nlohmann::json::array();
    for (std::size_t i = 0; i < p.size; ++i) {
      nlohmann::json row = nlohmann::json::array(), flags = nlohmann::json::array();
      for (std::size_t jj = 0; jj < p.size; ++jj) {
        row.push_back(p.at(i, jj));
        flags.push_back(p.flagged(i, jj));
      }
      j["values"].push_back(row);
      j["undefined"].push_back(flags);
    }
    std::ofstream os(json_out);
    if (!os) throw DataError("cannot write json file: " + json_out);
    os << j.dump(2) << '\n';
    std::cout << "wrote " << json_out << "\n";
  }
  return kExitOk;
}

int cmd_featurize(const std::string& edges, const std::string& attrs, const std::string& target,
                  const std::string& mode_name, std::size_t h, const std::vector<double>& weights,
                  const std::string& f_name, const std::string& out, std::size_t bins,
                  bool no_deg_norm, bool exclude_missing, std::size_t threads,
                  const LoadOptions& opts) {
  auto mode = parse_feature_mode(mode_name);
  if (!mode) throw UsageError("unknown mode '" + mode_name + "' (nns|nfvr|nnfvr)");
  const GenerativeFunction f = resolve_generative(f_name);

  LoadStats stats;
  AttributedGraph g = load_discretized(edges, attrs, bins, opts, &stats);
  report_load(stats);

  FeatureConfig cfg;
  cfg.target = resolve_attribute(g.schema(), target);
  cfg.max_hop = h;
  cfg.hop_weights = weights.empty() ? FeatureConfig::default_weights(h) : weights;
  if (cfg.hop_weights.size() != h) {
    throw UsageError("--w needs exactly " + std::to_string(h) + " value(s)");
  }
  cfg.mode = *mode;
  cfg.generative = f;
  cfg.degree_normalize = !no_deg_norm;

  ProclivityMatrix p;
  if (cfg.mode != FeatureMode::NNS) {
    p = prone_matrix(g, f, {exclude_missing});
    cfg.proclivity = &p;
  }
  try {
    cfg.validate(g.schema());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  FeatureMatrix fm = featurize_all(g, cfg, resolve_threads(threads));
  const std::string layout_path = out + ".layout.json";
  write_feature_csv(fm, g, out, layout_path);
  std::cout << "wrote " << out << " (" << fm.row_count << " rows, dim " << fm.dim << ") and "
            << layout_path << "\n";
  return kExitOk;
}

ExperimentConfig experiment_from_cli(const std::string& config_path, const std::string& target,
                                     const std::string& mode_name, const std::string& model_name,
                                     std::size_t h, const std::vector<double>& weights,
                                     const std::string& f_name, double train_fraction,
                                     std::uint64_t seed, bool seed_given, std::size_t repetitions,
                                     std::size_t k, std::size_t bins, double svm_c,
                                     double nb_smoothing, bool no_deg_norm, bool exclude_missing,
                                     std::size_t threads, std::string* edges_out,
                                     std::string* attrs_out) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw DataError("cannot open config file: " + config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    try {
      cfg = ExperimentConfig::from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("bad config: ") + e.what());
    }
    if (j.contains("edges")) *edges_out = j.at("edges").get<std::string>();
    if (j.contains("attrs")) *attrs_out = j.at("attrs").get<std::string>();
    if (!j.contains("seed")) std::cout << "seed: 42 (default)\n";
  } else {
    if (target.empty()) throw UsageError("--target is required (or use --config)");
    cfg.target = target;
    auto mode = parse_feature_mode(mode_name);
    if (!mode) throw UsageError("unknown mode '" + mode_name + "' (nns|nfvr|nnfvr)");
    cfg.mode = *mode;
    auto model = parse_model(model_name);
    if (!model) {
      throw UsageError("unknown model '" + model_name + "' (knn|nb|dt|svm|lr|wvrn|majority)");
    }
    cfg.model.kind = *model;
    cfg.model.knn_k = k;
    cfg.model.svm_c = svm_c;
    cfg.model.nb_smoothing = nb_smoothing;
    cfg.h = h;
    cfg.hop_weights = weights;
    if (!weights.empty() && weights.size() != h) {
      throw UsageError("--w needs exactly " + std::to_string(h) + " value(s)");
    }
    cfg.generative = resolve_generative(f_name);
    cfg.train_fraction = train_fraction;
    cfg.seed = seed;
    if (!seed_given) std::cout << "seed: 42 (default)\n";
    cfg.repetitions = repetitions;
    cfg.bins = bins;
    cfg.exclude_missing = exclude_missing;
    cfg.degree_normalize = !no_deg_norm;
  }
  // precedence: --threads flag, then config value, then env, then 1
  if (threads > 0) {
    cfg.threads = threads;
  } else if (config_path.empty() || cfg.threads <= 1) {
    cfg.threads = resolve_threads(0);
  }
  return cfg;
}

void print_report(const MetricsReport& report) {
  if (report.regression) {
    std::printf("mean over %zu repetition(s): mae %.4f  rmse %.4f  mse %.4f  r2 %.4f\n",
                report.repetitions.size(), report.mean_reg.mae, report.mean_reg.rmse,
                report.mean_reg.mse, report.mean_reg.r2);
  } else {
    std::printf("mean over %zu repetition(s): accuracy %.4f  f1_macro %.4f\n",
                report.repetitions.size(), report.mean_cls.accuracy, report.mean_cls.f1_macro);
  }
}

// train/eval on a precomputed feature file; only feature-vector models apply
MetricsReport run_from_features(const std::string& features_path, const ExperimentConfig& cfg,
                                std::vector<std::string>* node_tokens_out) {
  const FeatureFile file = read_feature_csv(features_path, features_path + ".layout.json");
  const FeatureMatrix& fm = file.matrix;
  if (node_tokens_out) *node_tokens_out = file.node_tokens;

  if (cfg.model.kind == ModelKind::Wvrn || cfg.model.kind == ModelKind::Majority ||
      cfg.model.kind == ModelKind::LinearRegression) {
    throw UsageError("--features supports knn, nb, dt, and svm models");
  }
  std::vector<NodeId> labeled;
  for (std::size_t i = 0; i < fm.row_count; ++i) {
    if (fm.continuous_label) {
      if (!std::isnan(fm.real_labels[i])) labeled.push_back(static_cast<NodeId>(i));
    } else if (fm.labels[i] != file.label_missing_level) {
      labeled.push_back(static_cast<NodeId>(i));
    }
  }
  if (labeled.size() < 2) throw DataError("fewer than two labeled rows in feature file");

  MetricsReport report;
  report.regression = false;
  report.config_echo = cfg.to_json();
  report.config_echo["features"] = features_path;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    RepetitionResult rr;
    rr.seed = cfg.seed + rep;
    std::vector<NodeId> order = labeled;
    rng::Engine eng(rr.seed);
    rng::shuffle(order, eng);
    auto kk = static_cast<std::size_t>(
        std::llround(cfg.train_fraction * static_cast<double>(order.size())));
    kk = std::clamp<std::size_t>(kk, 1, order.size() - 1);
    std::vector<std::uint32_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk));
    std::vector<std::uint32_t> test(order.begin() + static_cast<std::ptrdiff_t>(kk), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    rr.train_size = train.size();
    rr.test_size = test.size();

    ModelSpec spec = cfg.model;
    spec.seed = rr.seed;
    auto model = fit_classifier(fm, train, spec);
    std::vector<std::uint32_t> pred, actual;
    for (std::uint32_t v : test) {
      pred.push_back(model->predict(fm.row(v)));
      actual.push_back(fm.labels[v]);
    }
    rr.cls = classification_metrics(pred, actual);
    if (cfg.capture_predictions) {
      rr.test_nodes.assign(test.begin(), test.end());
      for (std::size_t i = 0; i < pred.size(); ++i) {
        rr.predicted.push_back(file.label_levels[pred[i]]);
        rr.actual.push_back(file.label_levels[actual[i]]);
      }
    }
    report.repetitions.push_back(std::move(rr));
  }
  const double n = static_cast<double>(report.repetitions.size());
  for (const auto& rr : report.repetitions) {
    report.mean_cls.accuracy += rr.cls.accuracy / n;
    report.mean_cls.f1_macro += rr.cls.f1_macro / n;
  }
  return report;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_prefix) {
  AttributedGraph g = synth_graph(cfg);
  const std::string edge_path = out_prefix + "_edges.txt";
  const std::string attr_path = out_prefix + "_attrs.csv";
  g.serialize(edge_path, attr_path);
  std::cout << "wrote " << edge_path << " (" << g.edge_count() << " edges) and " << attr_path
            << " (" << g.node_count() << " nodes)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attribute proclivity and neighborhood-feature node attribute prediction"};
  // --h is the neighborhood depth, so help keeps only its long form
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  std::string edges, attrs, out, target, config_path, features_path;
  std::string prone_json, predictions_path;
  std::vector<std::string> force_nominal;
  std::string mode_name = "nfvr";
  std::string model_name = "knn";
  std::string f_name = "xlogx";
  std::vector<double> weights;
  std::size_t h = 1;
  std::size_t bins = 5;
  std::size_t repetitions = 1;
  std::size_t k = 10;
  std::size_t threads = 0;
  double train_fraction = 0.7;
  double svm_c = 1.0;
  double nb_smoothing = 0.0;
  std::uint64_t seed = 42;
  bool exclude_missing = false;
  bool no_deg_norm = false;

  auto* sc_prone = app.add_subcommand("prone", "print the pairwise proclivity matrix");
  sc_prone->set_help_flag("--help", "print this help message and exit");
  sc_prone->add_option("edges", edges, "edge list file")->required();
  sc_prone->add_option("attrs", attrs, "attribute csv file")->required();
  sc_prone->add_option("--f", f_name, "generative function: square|cube|xlogx (default xlogx)");
  sc_prone->add_option("--out", out, "write the matrix as csv");
  sc_prone->add_option("--json", prone_json, "write the matrix as json");
  sc_prone->add_option("--force-nominal", force_nominal,
                       "attribute names to keep nominal")->delimiter(',');
  sc_prone->add_option("--bins", bins, "bins for continuous attributes (default 5)");
  sc_prone->add_flag("--exclude-missing", exclude_missing,
                     "drop the missing level before computing divergences");

  auto* sc_feat = app.add_subcommand("featurize", "write per-node feature vectors");
  sc_feat->set_help_flag("--help", "print this help message and exit");
  sc_feat->add_option("edges", edges, "edge list file")->required();
  sc_feat->add_option("attrs", attrs, "attribute csv file")->required();
  sc_feat->add_option("--target", target, "target attribute name")->required();
  sc_feat->add_option("--mode", mode_name, "nns|nfvr|nnfvr (default nfvr)");
  sc_feat->add_option("--h", h, "neighborhood depth (default 1)");
  sc_feat->add_option("--w", weights, "hop weights, one per hop")->delimiter(',');
  sc_feat->add_option("--f", f_name, "generative function (default xlogx)");
  sc_feat->add_option("--out", out, "output csv path")->required();
  sc_feat->add_option("--force-nominal", force_nominal,
                      "attribute names to keep nominal")->delimiter(',');
  sc_feat->add_option("--bins", bins, "bins for continuous attributes (default 5)");
  sc_feat->add_option("--threads", threads, "worker threads (default 1 or PROCLIVITY_THREADS)");
  sc_feat->add_flag("--no-deg-norm", no_deg_norm, "skip the final degree normalization");
  sc_feat->add_flag("--exclude-missing", exclude_missing,
                    "drop the missing level from proclivity weights");

  auto* sc_train = app.add_subcommand("train-eval", "run the full predict-and-score pipeline");
  sc_train->set_help_flag("--help", "print this help message and exit");
  sc_train->add_option("edges", edges, "edge list file");
  sc_train->add_option("attrs", attrs, "attribute csv file");
  sc_train->add_option("--config", config_path, "json config mirroring the experiment fields");
  sc_train->add_option("--features", features_path, "precomputed feature csv (skips featurization)");
  sc_train->add_option("--target", target, "target attribute name");
  sc_train->add_option("--mode", mode_name, "nns|nfvr|nnfvr (default nfvr)");
  sc_train->add_option("--model", model_name, "knn|nb|dt|svm|lr|wvrn|majority (default knn)");
  sc_train->add_option("--h", h, "neighborhood depth (default 1)");
  sc_train->add_option("--w", weights, "hop weights, one per hop")->delimiter(',');
  sc_train->add_option("--f", f_name, "generative function (default xlogx)");
  sc_train->add_option("--train-fraction", train_fraction, "train share in (0,1) (default 0.7)");
  auto* seed_opt = sc_train->add_option("--seed", seed, "rng seed (default 42)");
  sc_train->add_option("--repetitions", repetitions, "independent repetitions (default 1)");
  sc_train->add_option("--k", k, "neighbors for knn (default 10)");
  sc_train->add_option("--svm-c", svm_c, "svm C parameter (default 1)");
  sc_train->add_option("--nb-smoothing", nb_smoothing, "naive bayes smoothing (default 0)");
  sc_train->add_option("--bins", bins, "bins for continuous attributes (default 5)");
  sc_train->add_option("--threads", threads, "worker threads (default 1 or PROCLIVITY_THREADS)");
  sc_train->add_option("--out", out, "write the metrics report as json");
  sc_train->add_option("--predictions", predictions_path,
                       "write node,predicted,actual csv for the last repetition");
  sc_train->add_option("--force-nominal", force_nominal,
                       "attribute names to keep nominal")->delimiter(',');
  sc_train->add_flag("--no-deg-norm", no_deg_norm, "skip the final degree normalization");
  sc_train->add_flag("--exclude-missing", exclude_missing,
                     "drop the missing level from proclivity weights");

  std::string sweep_param = "k";
  std::vector<double> sweep_values;
  auto* sc_sweep = app.add_subcommand("sweep", "rerun train-eval over a range of k or h");
  sc_sweep->set_help_flag("--help", "print this help message and exit");
  sc_sweep->add_option("edges", edges, "edge list file")->required();
  sc_sweep->add_option("attrs", attrs, "attribute csv file")->required();
  sc_sweep->add_option("--param", sweep_param, "k or h")->required();
  sc_sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sc_sweep->add_option("--target", target, "target attribute name")->required();
  sc_sweep->add_option("--mode", mode_name, "nns|nfvr|nnfvr (default nfvr)");
  sc_sweep->add_option("--model", model_name, "classification model (default knn)");
  sc_sweep->add_option("--h", h, "depth when sweeping k (default 1)");
  sc_sweep->add_option("--f", f_name, "generative function (default xlogx)");
  sc_sweep->add_option("--train-fraction", train_fraction, "train share (default 0.7)");
  auto* sweep_seed_opt = sc_sweep->add_option("--seed", seed, "rng seed (default 42)");
  sc_sweep->add_option("--repetitions", repetitions, "repetitions per point (default 1)");
  sc_sweep->add_option("--k", k, "knn k when sweeping h (default 10)");
  sc_sweep->add_option("--bins", bins, "bins for continuous attributes (default 5)");
  sc_sweep->add_option("--threads", threads, "worker threads");
  sc_sweep->add_option("--out", out, "write the sweep table as csv");
  sc_sweep->add_option("--force-nominal", force_nominal,
                       "attribute names to keep nominal")->delimiter(',');

  SynthConfig synth_cfg;
  std::string out_prefix;
  auto* sc_synth = app.add_subcommand("synth", "generate a planted-partition test graph");
  sc_synth->set_help_flag("--help", "print this help message and exit");
  sc_synth->add_option("--nodes", synth_cfg.nodes, "node count (default 500)");
  sc_synth->add_option("--blocks", synth_cfg.blocks, "planted blocks (default 2)");
  sc_synth->add_option("--p-in", synth_cfg.p_in, "intra-block edge probability (default 0.1)");
  sc_synth->add_option("--p-out", synth_cfg.p_out, "inter-block edge probability (default 0.01)");
  sc_synth->add_option("--noise-attrs", synth_cfg.noise_attributes,
                       "extra uniform nominal attributes (default 1)");
  auto* synth_seed_opt = sc_synth->add_option("--seed", synth_cfg.seed, "rng seed (default 42)");
  sc_synth->add_option("--out-prefix", out_prefix, "output path prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sc_prone->parsed()) {
      return cmd_prone(edges, attrs, f_name, out, prone_json, bins, exclude_missing,
                       LoadOptions{force_nominal});
    }
    if (sc_feat->parsed()) {
      return cmd_featurize(edges, attrs, target, mode_name, h, weights, f_name, out, bins,
                           no_deg_norm, exclude_missing, threads, LoadOptions{force_nominal});
    }
    if (sc_train->parsed()) {
      ExperimentConfig cfg = experiment_from_cli(
          config_path, target, mode_name, model_name, h, weights, f_name, train_fraction, seed,
          seed_opt->count() > 0, repetitions, k, bins, svm_c, nb_smoothing, no_deg_norm,
          exclude_missing, threads, &edges, &attrs);
      cfg.capture_predictions = !predictions_path.empty();
      MetricsReport report;
      std::vector<std::string> node_tokens;
      if (!features_path.empty()) {
        report = run_from_features(features_path, cfg, &node_tokens);
      } else {
        if (edges.empty() || attrs.empty()) {
          throw UsageError("edges and attrs files are required (positionally or in the config)");
        }
        LoadStats stats;
        AttributedGraph g = AttributedGraph::load(edges, attrs, LoadOptions{force_nominal}, &stats);
        report_load(stats);
        report = run_experiment(g, cfg);
        report.config_echo["edges"] = edges;
        report.config_echo["attrs"] = attrs;
        node_tokens = g.node_tokens();
      }
      print_report(report);
      if (!out.empty()) {
        std::ofstream os(out);
        if (!os) throw DataError("cannot write report: " + out);
        os << report.to_json().dump(2) << '\n';
        std::cout << "wrote " << out << "\n";
      }
      if (!predictions_path.empty()) {
        const auto& last = report.repetitions.back();
        std::ofstream os(predictions_path);
        if (!os) throw DataError("cannot write predictions: " + predictions_path);
        os << "node,predicted,actual\n";
        for (std::size_t i = 0; i < last.test_nodes.size(); ++i) {
          os << node_tokens.at(last.test_nodes[i]) << ',' << last.predicted[i] << ','
             << last.actual[i] << '\n';
        }
        std::cout << "wrote " << predictions_path << "\n";
      }
      return kExitOk;
    }
    if (sc_sweep->parsed()) {
      if (sweep_param != "k" && sweep_param != "h") throw UsageError("--param must be k or h");
      ExperimentConfig cfg;
      cfg.target = target;
      auto mode = parse_feature_mode(mode_name);
      if (!mode) throw UsageError("unknown mode '" + mode_name + "'");
      cfg.mode = *mode;
      auto model = parse_model(model_name);
      if (!model) throw UsageError("unknown model '" + model_name + "'");
      cfg.model.kind = *model;
      cfg.model.knn_k = k;
      cfg.h = h;
      cfg.generative = resolve_generative(f_name);
      cfg.train_fraction = train_fraction;
      cfg.seed = seed;
      if (sweep_seed_opt->count() == 0) std::cout << "seed: 42 (default)\n";
      cfg.repetitions = repetitions;
      cfg.bins = bins;
      cfg.threads = resolve_threads(threads);
      LoadStats stats;
      AttributedGraph g = AttributedGraph::load(edges, attrs, LoadOptions{force_nominal}, &stats);
      report_load(stats);
      auto rows = sweep(g, cfg, sweep_param == "k" ? SweepParameter::K : SweepParameter::H,
                        sweep_values);
      std::cout << sweep_csv(rows);
      if (!out.empty()) {
        std::ofstream os(out);
        if (!os) throw DataError("cannot write sweep csv: " + out);
        os << sweep_csv(rows);
        std::cout << "wrote " << out << "\n";
        // the csv stays plot-ready; the resolved config rides in a sidecar
        nlohmann::json sidecar;
        sidecar["config"] = cfg.to_json();
        sidecar["config"]["edges"] = edges;
        sidecar["config"]["attrs"] = attrs;
        sidecar["param"] = sweep_param;
        sidecar["values"] = sweep_values;
        std::ofstream cs(out + ".config.json");
        if (!cs) throw DataError("cannot write sweep config: " + out + ".config.json");
        cs << sidecar.dump(2) << '\n';
        std::cout << "wrote " << out << ".config.json\n";
      }
      return kExitOk;
    }
    if (sc_synth->parsed()) {
      if (synth_seed_opt->count() == 0) std::cout << "seed: 42 (default)\n";
      return cmd_synth(synth_cfg, out_prefix);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
