#include "proclivity/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace proclivity {

const char* to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::NNS: return "nns";
    case FeatureMode::NFVR: return "nfvr";
    case FeatureMode::NNFVR: return "nnfvr";
  }
  return "unknown";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view name) {
  if (name == "nns") return FeatureMode::NNS;
  if (name == "nfvr") return FeatureMode::NFVR;
  if (name == "nnfvr") return FeatureMode::NNFVR;
  return std::nullopt;
}

std::vector<double> FeatureConfig::default_weights(std::size_t h) {
  std::vector<double> w;
  double value = 1.0;
  for (std::size_t i = 0; i < h; ++i) {
    w.push_back(value);
    value *= 0.5;
  }
  return w;
}

void FeatureConfig::validate(const AttributeSchema& schema) const {
  const std::size_t t = schema.attribute_count();
  if (target >= t) throw std::invalid_argument("target attribute index out of range");
  if (max_hop < 1) throw std::invalid_argument("max_hop must be >= 1");
  if (hop_weights.size() != max_hop) {
    throw std::invalid_argument("hop_weights must have exactly max_hop entries");
  }
  for (double w : hop_weights) {
    if (!(w > 0.0) || w > 1.0) throw std::invalid_argument("hop weights must lie in (0, 1]");
  }
  for (std::size_t j = 0; j < t; ++j) {
    if (j == target && mode == FeatureMode::NNS) continue;
    if (!schema.attribute(j).discrete()) {
      throw std::invalid_argument("attribute '" + schema.attribute(j).name +
                                  "' is continuous; discretize before featurizing");
    }
  }
  if (mode != FeatureMode::NNS) {
    if (proclivity == nullptr) throw std::invalid_argument("proclivity matrix required");
    if (proclivity->size != t) throw std::invalid_argument("proclivity matrix size mismatch");
    if (proclivity->generative != generative) {
      throw std::invalid_argument("proclivity matrix was computed with a different generative function");
    }
  }
}

namespace {

struct Layout {
  std::vector<FeatureBlock> blocks;
  std::size_t dim = 0;
  std::size_t nfvr_offset = 0;  // where the distribution blocks start
};

Layout make_layout(const AttributeSchema& schema, const FeatureConfig& cfg) {
  Layout layout;
  std::size_t offset = 0;
  const std::size_t t = schema.attribute_count();
  if (cfg.mode != FeatureMode::NFVR) {
    for (std::size_t j = 0; j < t; ++j) {
      if (j == cfg.target) continue;
      const std::size_t width = schema.attribute(j).level_count();
      layout.blocks.push_back({"nns:" + schema.attribute(j).name, offset, width});
      offset += width;
    }
  }
  layout.nfvr_offset = offset;
  if (cfg.mode != FeatureMode::NNS) {
    for (std::size_t j = 0; j < t; ++j) {
      const std::size_t width = schema.attribute(j).level_count();
      layout.blocks.push_back({"nfvr:" + schema.attribute(j).name, offset, width});
      offset += width;
    }
  }
  layout.dim = offset;
  return layout;
}

// Scratch owned by one worker.
struct RowScratch {
  ShellWalker walker;
  std::vector<std::vector<NodeId>> shells;
  std::vector<std::uint32_t> counts;

  explicit RowScratch(const AttributedGraph& g) : walker(g) {}
};

void fill_row(const AttributedGraph& g, const FeatureConfig& cfg, const Layout& layout,
              RowScratch& scratch, NodeId v, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const auto& schema = g.schema();
  const std::size_t t = schema.attribute_count();

  if (cfg.mode != FeatureMode::NFVR) {
    std::size_t offset = 0;
    for (std::size_t j = 0; j < t; ++j) {
      if (j == cfg.target) continue;
      out[offset + g.level_at(v, j)] = 1.0;
      offset += schema.attribute(j).level_count();
    }
  }
  if (cfg.mode == FeatureMode::NNS) return;

  scratch.walker.collect(v, static_cast<std::uint32_t>(cfg.max_hop), scratch.shells);
  const std::uint32_t deg = g.degree(v);
  std::size_t offset = layout.nfvr_offset;
  for (std::size_t j = 0; j < t; ++j) {
    const std::size_t width = schema.attribute(j).level_count();
    std::span<double> block = out.subspan(offset, width);
    const auto& levels = g.column(j).levels;
    for (std::size_t hop = 0; hop < cfg.max_hop; ++hop) {
      const auto& shell = scratch.shells[hop];
      if (shell.empty()) continue;  // empty shell contributes the zero vector
      scratch.counts.assign(width, 0);
      for (NodeId u : shell) ++scratch.counts[levels[u]];
      const double inv = 1.0 / static_cast<double>(shell.size());
      const double w = cfg.hop_weights[hop];
      for (std::size_t k = 0; k < width; ++k) {
        if (scratch.counts[k] != 0) {
          block[k] += w * (static_cast<double>(scratch.counts[k]) * inv);
        }
      }
    }
    const double rho = cfg.proclivity->at(cfg.target, j);
    for (double& x : block) x *= rho;
    if (cfg.degree_normalize && deg > 0) {
      const double dn = static_cast<double>(deg);
      for (double& x : block) x /= dn;
    }
    offset += width;
  }
}

}  // namespace

std::vector<double> aggregate_set(const AttributedGraph& g, std::span<const NodeId> members,
                                  std::size_t attr) {
  if (members.empty()) throw std::invalid_argument("aggregate_set needs a nonempty node set");
  const Attribute& a = g.schema().attribute(attr);
  if (!a.discrete()) throw DataError("attribute '" + a.name + "' is continuous");
  std::vector<double> dist(a.level_count(), 0.0);
  const auto& levels = g.column(attr).levels;
  std::vector<std::uint32_t> counts(a.level_count(), 0);
  for (NodeId u : members) {
    if (u >= g.node_count()) throw std::out_of_range("node id out of range");
    ++counts[levels[u]];
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    dist[k] = static_cast<double>(counts[k]) * inv;
  }
  return dist;
}

std::vector<double> hop_aggregate(const AttributedGraph& g, NodeId v, std::size_t attr,
                                  const FeatureConfig& cfg) {
  if (cfg.max_hop < 1 || cfg.hop_weights.size() != cfg.max_hop) {
    throw std::invalid_argument("invalid hop configuration");
  }
  const Attribute& a = g.schema().attribute(attr);
  if (!a.discrete()) throw DataError("attribute '" + a.name + "' is continuous");
  std::vector<double> acc(a.level_count(), 0.0);
  ShellWalker walker(g);
  std::vector<std::vector<NodeId>> shells;
  walker.collect(v, static_cast<std::uint32_t>(cfg.max_hop), shells);
  const auto& levels = g.column(attr).levels;
  std::vector<std::uint32_t> counts;
  for (std::size_t hop = 0; hop < cfg.max_hop; ++hop) {
    const auto& shell = shells[hop];
    if (shell.empty()) continue;
    counts.assign(acc.size(), 0);
    for (NodeId u : shell) ++counts[levels[u]];
    const double inv = 1.0 / static_cast<double>(shell.size());
    const double w = cfg.hop_weights[hop];
    for (std::size_t k = 0; k < acc.size(); ++k) {
      if (counts[k] != 0) acc[k] += w * (static_cast<double>(counts[k]) * inv);
    }
  }
  return acc;
}

std::vector<double> nns_vector(const AttributedGraph& g, NodeId v, const FeatureConfig& cfg) {
  FeatureConfig local = cfg;
  local.mode = FeatureMode::NNS;
  local.validate(g.schema());
  Layout layout = make_layout(g.schema(), local);
  std::vector<double> row(layout.dim, 0.0);
  RowScratch scratch(g);
  fill_row(g, local, layout, scratch, v, row);
  return row;
}

std::vector<double> nfvr_vector(const AttributedGraph& g, NodeId v, const FeatureConfig& cfg) {
  FeatureConfig local = cfg;
  local.mode = FeatureMode::NFVR;
  local.validate(g.schema());
  Layout layout = make_layout(g.schema(), local);
  std::vector<double> row(layout.dim, 0.0);
  RowScratch scratch(g);
  fill_row(g, local, layout, scratch, v, row);
  return row;
}

std::vector<double> nnfvr_vector(const AttributedGraph& g, NodeId v, const FeatureConfig& cfg) {
  FeatureConfig local = cfg;
  local.mode = FeatureMode::NNFVR;
  local.validate(g.schema());
  Layout layout = make_layout(g.schema(), local);
  std::vector<double> row(layout.dim, 0.0);
  RowScratch scratch(g);
  fill_row(g, local, layout, scratch, v, row);
  return row;
}

FeatureMatrix featurize_all(const AttributedGraph& g, const FeatureConfig& cfg,
                            std::size_t threads) {
  cfg.validate(g.schema());
  const Layout layout = make_layout(g.schema(), cfg);
  const std::size_t n = g.node_count();

  FeatureMatrix fm;
  fm.row_count = n;
  fm.dim = layout.dim;
  fm.values.assign(n * layout.dim, 0.0);
  fm.blocks = layout.blocks;
  fm.mode = cfg.mode;
  fm.target = cfg.target;
  fm.max_hop = cfg.max_hop;
  fm.hop_weights = cfg.hop_weights;
  fm.degree_normalized = cfg.degree_normalize;
  fm.generative = cfg.generative;
  if (cfg.mode != FeatureMode::NNS) fm.prone_row = cfg.proclivity->row(cfg.target);

  const Attribute& target_attr = g.schema().attribute(cfg.target);
  fm.continuous_label = !target_attr.discrete();
  if (fm.continuous_label) {
    fm.real_labels = g.column(cfg.target).reals;
  } else {
    fm.labels = g.column(cfg.target).levels;
  }

  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n == 0 ? 1 : n));
  auto run_range = [&](NodeId begin, NodeId end) {
    RowScratch scratch(g);
    for (NodeId v = begin; v < end; ++v) {
      fill_row(g, cfg, layout, scratch, v, fm.row(v));
    }
  };

  if (workers == 1) {
    run_range(0, static_cast<NodeId>(n));
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const NodeId begin = static_cast<NodeId>(std::min(n, w * chunk));
      const NodeId end = static_cast<NodeId>(std::min(n, (w + 1) * chunk));
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return fm;
}

void write_feature_csv(const FeatureMatrix& fm, const AttributedGraph& g,
                       const std::string& csv_path, const std::string& layout_path) {
  const AttributeSchema& schema = g.schema();
  std::ofstream out(csv_path);
  if (!out) throw DataError("cannot write feature file: " + csv_path);
  out << "node";
  for (const auto& block : fm.blocks) {
    for (std::size_t k = 0; k < block.width; ++k) out << ',' << block.name << ':' << k;
  }
  out << ",label\n";
  char buf[64];
  const Attribute& target_attr = schema.attribute(fm.target);
  for (std::size_t i = 0; i < fm.row_count; ++i) {
    out << g.node_token(static_cast<NodeId>(i));
    for (double x : fm.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out << ',' << buf;
    }
    out << ',';
    if (fm.continuous_label) {
      const double y = fm.real_labels[i];
      if (std::isnan(y)) {
        out << kMissingToken;
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g", y);
        out << buf;
      }
    } else {
      out << target_attr.levels[fm.labels[i]];
    }
    out << '\n';
  }

  nlohmann::json j;
  j["mode"] = to_string(fm.mode);
  j["target"] = target_attr.name;
  j["h"] = fm.max_hop;
  j["weights"] = fm.hop_weights;
  j["generative"] = to_string(fm.generative);
  j["degree_normalize"] = fm.degree_normalized;
  j["dim"] = fm.dim;
  j["rows"] = fm.row_count;
  if (fm.prone_row.empty()) {
    j["prone_row"] = nullptr;
  } else {
    j["prone_row"] = fm.prone_row;
  }
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : fm.blocks) {
    blocks.push_back({{"name", b.name}, {"offset", b.offset}, {"width", b.width}});
  }
  j["blocks"] = blocks;
  if (target_attr.discrete()) {
    j["label_levels"] = target_attr.levels;
    j["label_missing_level"] = target_attr.missing_level;
  } else {
    j["label_levels"] = nullptr;
  }
  std::ofstream lj(layout_path);
  if (!lj) throw DataError("cannot write layout file: " + layout_path);
  lj << j.dump(2) << '\n';
}

FeatureFile read_feature_csv(const std::string& csv_path, const std::string& layout_path) {
  std::ifstream lj(layout_path);
  if (!lj) throw DataError("cannot open layout file: " + layout_path);
  nlohmann::json j = nlohmann::json::parse(lj, nullptr, true);

  FeatureFile file;
  FeatureMatrix& fm = file.matrix;
  auto mode = parse_feature_mode(j.at("mode").get<std::string>());
  if (!mode) throw DataError("layout file names an unknown mode");
  fm.mode = *mode;
  fm.max_hop = j.at("h").get<std::size_t>();
  fm.hop_weights = j.at("weights").get<std::vector<double>>();
  if (auto gen = parse_generative(j.at("generative").get<std::string>())) fm.generative = *gen;
  fm.degree_normalized = j.at("degree_normalize").get<bool>();
  fm.dim = j.at("dim").get<std::size_t>();
  if (!j.at("prone_row").is_null()) fm.prone_row = j.at("prone_row").get<std::vector<double>>();
  for (const auto& b : j.at("blocks")) {
    fm.blocks.push_back({b.at("name").get<std::string>(), b.at("offset").get<std::size_t>(),
                         b.at("width").get<std::size_t>()});
  }
  file.target_name = j.at("target").get<std::string>();
  fm.continuous_label = j.at("label_levels").is_null();
  if (!fm.continuous_label) {
    file.label_levels = j.at("label_levels").get<std::vector<std::string>>();
    file.label_missing_level = j.at("label_missing_level").get<std::size_t>();
  }

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open feature file: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(csv_path, 1, "missing header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',')) throw ParseError(csv_path, line_no, "missing node token");
    file.node_tokens.push_back(cell);
    std::vector<std::string> rest;
    while (std::getline(ss, cell, ',')) rest.push_back(cell);
    if (rest.size() != fm.dim + 1) {
      throw ParseError(csv_path, line_no, "expected " + std::to_string(fm.dim + 1) + " value cells");
    }
    for (std::size_t k = 0; k < fm.dim; ++k) fm.values.push_back(std::strtod(rest[k].c_str(), nullptr));
    const std::string& label = rest.back();
    if (fm.continuous_label) {
      fm.real_labels.push_back(label == kMissingToken
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : std::strtod(label.c_str(), nullptr));
    } else {
      auto it = std::find(file.label_levels.begin(), file.label_levels.end(), label);
      if (it == file.label_levels.end()) {
        throw ParseError(csv_path, line_no, "label '" + label + "' not in layout label_levels");
      }
      fm.labels.push_back(static_cast<std::uint32_t>(it - file.label_levels.begin()));
    }
  }
  fm.row_count = file.node_tokens.size();
  return file;
}

}  // namespace proclivity
