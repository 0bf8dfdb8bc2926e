#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <queue>

#include "proclivity/featurize.hpp"
#include "proclivity/rng.hpp"

using namespace proclivity;

namespace {

Attribute nominal(std::string name, std::size_t observed_levels) {
  Attribute a;
  a.name = std::move(name);
  for (std::size_t l = 0; l < observed_levels; ++l) a.levels.push_back("l" + std::to_string(l));
  a.missing_level = a.levels.size();
  a.levels.emplace_back(kMissingToken);
  return a;
}

AttributedGraph build_graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges,
                            std::vector<Attribute> attrs,
                            std::vector<std::vector<std::uint32_t>> level_columns) {
  std::vector<std::string> tokens;
  for (std::size_t v = 0; v < n; ++v) tokens.push_back("v" + std::to_string(v));
  std::vector<AttributeColumn> columns;
  for (auto& levels : level_columns) {
    AttributeColumn col;
    col.levels = std::move(levels);
    columns.push_back(std::move(col));
  }
  return AttributedGraph(std::move(tokens), std::move(edges), AttributeSchema(std::move(attrs)),
                         std::move(columns));
}

struct RandomAttributed {
  AttributedGraph graph;
  ProclivityMatrix prone;
};

RandomAttributed random_attributed(std::size_t n, double p, std::size_t t, std::uint64_t seed) {
  rng::Engine eng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng::uniform01(eng) < p) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }
  std::vector<Attribute> attrs;
  std::vector<std::vector<std::uint32_t>> columns;
  for (std::size_t j = 0; j < t; ++j) {
    const std::size_t observed = 2 + rng::uniform_below(eng, 3);
    attrs.push_back(nominal("a" + std::to_string(j), observed));
    std::vector<std::uint32_t> col(n);
    for (auto& x : col) {
      // includes the missing level occasionally
      x = static_cast<std::uint32_t>(rng::uniform_below(eng, observed + 1));
    }
    columns.push_back(std::move(col));
  }
  RandomAttributed out{build_graph(n, std::move(edges), std::move(attrs), std::move(columns)), {}};
  out.prone = prone_matrix(out.graph, GenerativeFunction::XLogX);
  return out;
}

// Straight-line re-evaluation: one BFS distance array, full distribution
// vectors per shell, then weighting, concatenation, and the final degree
// division. Kept structurally different from the library path on purpose.
std::vector<double> nfvr_oracle(const AttributedGraph& g, NodeId v, const FeatureConfig& cfg) {
  const std::size_t n = g.node_count();
  std::vector<int> dist(n, -1);
  std::queue<NodeId> q;
  dist[v] = 0;
  q.push(v);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }

  std::vector<double> out;
  for (std::size_t j = 0; j < g.schema().attribute_count(); ++j) {
    const std::size_t width = g.schema().attribute(j).level_count();
    std::vector<double> acc(width, 0.0);
    for (std::size_t hop = 1; hop <= cfg.max_hop; ++hop) {
      std::vector<NodeId> shell;
      for (NodeId u = 0; u < n; ++u) {
        if (dist[u] == static_cast<int>(hop)) shell.push_back(u);
      }
      if (shell.empty()) continue;
      std::vector<double> share(width, 0.0);
      for (NodeId u : shell) share[g.level_at(u, j)] += 1.0;
      for (double& x : share) x /= static_cast<double>(shell.size());
      for (std::size_t k = 0; k < width; ++k) acc[k] += cfg.hop_weights[hop - 1] * share[k];
    }
    for (double& x : acc) x *= cfg.proclivity->at(cfg.target, j);
    if (cfg.degree_normalize && g.degree(v) > 0) {
      for (double& x : acc) x /= static_cast<double>(g.degree(v));
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  return out;
}

}  // namespace

TEST_CASE("aggregate_set is the level distribution") {
  // four nodes with gender M,M,F,missing
  auto g = build_graph(4, {{0, 1}}, {nominal("gender", 2)}, {{0, 0, 1, 2}});
  std::vector<NodeId> all{0, 1, 2, 3};
  auto dist = aggregate_set(g, all, 0);
  CHECK(dist == std::vector<double>{0.5, 0.25, 0.25});

  std::vector<NodeId> same{0, 1};
  CHECK(aggregate_set(g, same, 0) == std::vector<double>{1.0, 0.0, 0.0});

  std::vector<NodeId> empty;
  CHECK_THROWS_AS(aggregate_set(g, empty, 0), std::invalid_argument);
}

TEST_CASE("aggregate_set matches naive counting on random sets") {
  auto [g, prone_values] = random_attributed(50, 0.1, 2, 42);
  (void)prone_values;
  rng::Engine eng(7);
  for (std::size_t trial = 0; trial < 20; ++trial) {
    std::vector<NodeId> members;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (rng::uniform01(eng) < 0.3) members.push_back(v);
    }
    if (members.empty()) members.push_back(0);
    for (std::size_t j = 0; j < 2; ++j) {
      auto got = aggregate_set(g, members, j);
      const std::size_t width = g.schema().attribute(j).level_count();
      std::vector<double> expected(width, 0.0);
      for (NodeId u : members) expected[g.level_at(u, j)] += 1.0;
      double sum = 0.0;
      for (std::size_t k = 0; k < width; ++k) {
        expected[k] /= static_cast<double>(members.size());
        sum += got[k];
      }
      for (std::size_t k = 0; k < width; ++k) {
        CHECK(got[k] == doctest::Approx(expected[k]).epsilon(1e-15));
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("hop_aggregate with a single hop is aggregate_set over neighbors") {
  auto [g, prone_values] = random_attributed(30, 0.15, 2, 9);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 1;
  cfg.hop_weights = {1.0};
  cfg.proclivity = &prone_values;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) continue;
    auto direct = aggregate_set(g, g.neighbors(v), 1);
    CHECK(hop_aggregate(g, v, 1, cfg) == direct);
  }
}

TEST_CASE("hop_aggregate on an isolated node is zero") {
  auto g = build_graph(3, {{0, 1}}, {nominal("a", 2)}, {{0, 1, 0}});
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 2;
  cfg.hop_weights = {1.0, 0.5};
  auto p = ProclivityMatrix::constant(1, 1.0, GenerativeFunction::XLogX);
  cfg.proclivity = &p;
  auto vec = hop_aggregate(g, 2, 0, cfg);
  for (double x : vec) CHECK(x == 0.0);
}

TEST_CASE("hop_aggregate on the three-node path") {
  // path 0-1-2, binary attribute (levels l0,l1 + missing), values l0,l1,l0
  auto g = build_graph(3, {{0, 1}, {1, 2}}, {nominal("a", 2)}, {{0, 1, 0}});
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 2;
  cfg.hop_weights = {1.0, 0.5};
  auto p = ProclivityMatrix::constant(1, 1.0, GenerativeFunction::XLogX);
  cfg.proclivity = &p;

  // from node 0: shell1 = {1} -> (0,1,0); shell2 = {2} -> (1,0,0) * 0.5
  auto from0 = hop_aggregate(g, 0, 0, cfg);
  CHECK(from0[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(from0[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(from0[2] == 0.0);
  // from node 1: shell1 = {0,2} -> (1,0,0); shell2 empty
  auto from1 = hop_aggregate(g, 1, 0, cfg);
  CHECK(from1[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(from1[1] == 0.0);
}

TEST_CASE("nns vector one-hot encodes everything but the target") {
  std::vector<Attribute> attrs{nominal("target", 2), nominal("other", 3)};
  auto g = build_graph(2, {{0, 1}}, std::move(attrs), {{0, 1}, {1, 3}});
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.mode = FeatureMode::NNS;

  auto v0 = nns_vector(g, 0, cfg);
  REQUIRE(v0.size() == 4);  // 3 observed + missing for "other"
  CHECK(v0 == std::vector<double>{0.0, 1.0, 0.0, 0.0});

  // node 1 carries the missing value of "other"
  auto v1 = nns_vector(g, 1, cfg);
  CHECK(v1 == std::vector<double>{0.0, 0.0, 0.0, 1.0});
}

TEST_CASE("nns dimension equals the sum of non-target level counts") {
  rng::Engine eng(77);
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t t = 1 + rng::uniform_below(eng, 5);
    std::vector<Attribute> attrs;
    std::vector<std::vector<std::uint32_t>> cols;
    for (std::size_t j = 0; j < t; ++j) {
      attrs.push_back(nominal("a" + std::to_string(j), 2 + rng::uniform_below(eng, 4)));
      cols.push_back({0, 0});
    }
    const std::size_t target = rng::uniform_below(eng, t);
    std::size_t expected = 0;
    for (std::size_t j = 0; j < t; ++j) {
      if (j != target) expected += attrs[j].level_count();
    }
    auto g = build_graph(2, {{0, 1}}, std::move(attrs), std::move(cols));
    FeatureConfig cfg;
    cfg.target = target;
    cfg.mode = FeatureMode::NNS;
    CHECK(nns_vector(g, 0, cfg).size() == expected);
  }
}

TEST_CASE("zero proclivity zeroes the block") {
  std::vector<Attribute> attrs{nominal("t", 2), nominal("o", 2)};
  auto g = build_graph(3, {{0, 1}, {1, 2}}, std::move(attrs), {{0, 1, 0}, {1, 0, 1}});
  ProclivityMatrix p = ProclivityMatrix::constant(2, 1.0, GenerativeFunction::XLogX);
  p.values[0 * 2 + 1] = 0.0;  // rho(target, other) = 0
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 1;
  cfg.hop_weights = {1.0};
  cfg.proclivity = &p;

  auto vec = nfvr_vector(g, 1, cfg);
  REQUIRE(vec.size() == 6);
  // first block (target attr) is nonzero, second identically zero
  CHECK(vec[0] > 0.0);
  for (std::size_t k = 3; k < 6; ++k) CHECK(vec[k] == 0.0);
}

TEST_CASE("star center block is the leaf distribution over the degree") {
  // center 0 with four leaves, all leaves carry level l0
  auto g = build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {nominal("a", 2)},
                       {{1, 0, 0, 0, 0}});
  auto p = ProclivityMatrix::constant(1, 1.0, GenerativeFunction::XLogX);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 1;
  cfg.hop_weights = {1.0};
  cfg.proclivity = &p;
  auto vec = nfvr_vector(g, 0, cfg);
  CHECK(vec == std::vector<double>{0.25, 0.0, 0.0});
}

TEST_CASE("nfvr matches the straight-line oracle on seeded graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto [g, prone_values] = random_attributed(30, 0.12, 3, seed);
    FeatureConfig cfg;
    cfg.target = seed % 3;
    cfg.max_hop = 1 + seed % 3;
    cfg.hop_weights = FeatureConfig::default_weights(cfg.max_hop);
    cfg.generative = GenerativeFunction::XLogX;
    cfg.proclivity = &prone_values;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      auto got = nfvr_vector(g, v, cfg);
      auto expected = nfvr_oracle(g, v, cfg);
      REQUIRE(got.size() == expected.size());
      for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(std::abs(got[k] - expected[k]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("nnfvr is the concatenation of nns and nfvr") {
  auto [g, prone_values] = random_attributed(25, 0.15, 3, 5);
  FeatureConfig cfg;
  cfg.target = 1;
  cfg.max_hop = 2;
  cfg.hop_weights = {1.0, 0.5};
  cfg.proclivity = &prone_values;

  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto whole = nnfvr_vector(g, v, cfg);
    auto head = nns_vector(g, v, cfg);
    auto tail = nfvr_vector(g, v, cfg);
    REQUIRE(whole.size() == head.size() + tail.size());
    for (std::size_t k = 0; k < head.size(); ++k) CHECK(whole[k] == head[k]);
    for (std::size_t k = 0; k < tail.size(); ++k) CHECK(whole[head.size() + k] == tail[k]);
  }
}

TEST_CASE("isolated node gets its nns block followed by zeros") {
  std::vector<Attribute> attrs{nominal("t", 2), nominal("o", 2)};
  auto g = build_graph(3, {{0, 1}}, std::move(attrs), {{0, 1, 1}, {1, 0, 0}});
  auto p = prone_matrix(g, GenerativeFunction::XLogX);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 1;
  cfg.hop_weights = {1.0};
  cfg.mode = FeatureMode::NNFVR;
  cfg.proclivity = &p;
  auto vec = nnfvr_vector(g, 2, cfg);
  REQUIRE(vec.size() == 3 + 6);
  CHECK(vec[0] == 1.0);  // one-hot of "o" level l0
  for (std::size_t k = 3; k < vec.size(); ++k) CHECK(vec[k] == 0.0);
}

TEST_CASE("featurize_all fills every node row") {
  auto g = build_graph(3, {{0, 1}, {1, 2}}, {nominal("a", 2)}, {{0, 1, 0}});
  auto p = prone_matrix(g, GenerativeFunction::XLogX);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 1;
  cfg.hop_weights = {1.0};
  cfg.proclivity = &p;
  auto fm = featurize_all(g, cfg);
  CHECK(fm.row_count == 3);
  CHECK(fm.dim == 3);
  CHECK(fm.labels == std::vector<std::uint32_t>{0, 1, 0});
  for (NodeId v = 0; v < 3; ++v) {
    auto direct = nfvr_vector(g, v, cfg);
    auto row = fm.row(v);
    CHECK(std::equal(row.begin(), row.end(), direct.begin(), direct.end()));
  }
}

TEST_CASE("dimension identities hold for random schemas") {
  rng::Engine eng(4242);
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t t = 1 + rng::uniform_below(eng, 4);
    std::vector<Attribute> attrs;
    std::vector<std::vector<std::uint32_t>> cols;
    std::size_t sum_levels = 0;
    for (std::size_t j = 0; j < t; ++j) {
      attrs.push_back(nominal("a" + std::to_string(j), 2 + rng::uniform_below(eng, 4)));
      sum_levels += attrs[j].level_count();
      cols.push_back({0, 1, 0});
    }
    const std::size_t target = rng::uniform_below(eng, t);
    const std::size_t nns_dim = sum_levels - attrs[target].level_count();
    auto g = build_graph(3, {{0, 1}, {1, 2}}, std::move(attrs), std::move(cols));
    auto p = prone_matrix(g, GenerativeFunction::XLogX);

    FeatureConfig cfg;
    cfg.target = target;
    cfg.max_hop = 1;
    cfg.hop_weights = {1.0};
    cfg.proclivity = &p;

    cfg.mode = FeatureMode::NFVR;
    CHECK(featurize_all(g, cfg).dim == sum_levels);
    cfg.mode = FeatureMode::NNS;
    cfg.proclivity = nullptr;
    CHECK(featurize_all(g, cfg).dim == nns_dim);
    cfg.mode = FeatureMode::NNFVR;
    cfg.proclivity = &p;
    CHECK(featurize_all(g, cfg).dim == nns_dim + sum_levels);
  }
}

TEST_CASE("single-hop unweighted blocks equal raw neighbor distributions") {
  auto [g, unused] = random_attributed(30, 0.2, 2, 77);
  (void)unused;
  auto ones = ProclivityMatrix::constant(2, 1.0, GenerativeFunction::XLogX);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 1;
  cfg.hop_weights = {1.0};
  cfg.proclivity = &ones;
  cfg.degree_normalize = false;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) continue;
    auto vec = nfvr_vector(g, v, cfg);
    std::size_t offset = 0;
    for (std::size_t j = 0; j < 2; ++j) {
      auto expected = aggregate_set(g, g.neighbors(v), j);
      for (std::size_t k = 0; k < expected.size(); ++k) {
        CHECK(vec[offset + k] == expected[k]);  // bitwise
      }
      offset += expected.size();
    }
  }
}

TEST_CASE("scaling hop weights scales the vectors linearly") {
  auto [g, prone_values] = random_attributed(25, 0.15, 2, 31);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 2;
  cfg.hop_weights = {1.0, 0.5};
  cfg.proclivity = &prone_values;
  FeatureConfig scaled = cfg;
  scaled.hop_weights = {0.5, 0.25};  // everything halved: powers of two stay exact
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto base = nfvr_vector(g, v, cfg);
    auto half = nfvr_vector(g, v, scaled);
    for (std::size_t k = 0; k < base.size(); ++k) CHECK(half[k] == 0.5 * base[k]);
  }
}

TEST_CASE("node relabeling permutes feature rows exactly") {
  const std::size_t n = 24;
  rng::Engine eng(911);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::uint32_t> col(n);
  for (std::size_t u = 0; u < n; ++u) {
    col[u] = static_cast<std::uint32_t>(rng::uniform_below(eng, 3));
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng::uniform01(eng) < 0.2) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }
  std::vector<NodeId> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<NodeId>(i);
  rng::shuffle(perm, eng);

  auto g1 = build_graph(n, edges, {nominal("a", 3)}, {col});
  std::vector<std::pair<NodeId, NodeId>> edges2;
  for (auto [u, v] : edges) edges2.emplace_back(perm[u], perm[v]);
  std::vector<std::uint32_t> col2(n);
  for (std::size_t v = 0; v < n; ++v) col2[perm[v]] = col[v];
  auto g2 = build_graph(n, std::move(edges2), {nominal("a", 3)}, {col2});

  auto p1 = prone_matrix(g1, GenerativeFunction::XLogX);
  auto p2 = prone_matrix(g2, GenerativeFunction::XLogX);
  CHECK(p1.values == p2.values);

  FeatureConfig base;
  base.target = 0;
  base.max_hop = 2;
  base.hop_weights = {1.0, 0.5};
  base.mode = FeatureMode::NNFVR;
  FeatureConfig cfg1 = base, cfg2 = base;
  cfg1.proclivity = &p1;
  cfg2.proclivity = &p2;
  auto fm1 = featurize_all(g1, cfg1);
  auto fm2 = featurize_all(g2, cfg2);
  for (NodeId v = 0; v < n; ++v) {
    auto r1 = fm1.row(v);
    auto r2 = fm2.row(perm[v]);
    CHECK(std::equal(r1.begin(), r1.end(), r2.begin(), r2.end()));
    CHECK(fm1.labels[v] == fm2.labels[perm[v]]);
  }
}

TEST_CASE("worker count does not change the result") {
  auto [g, prone_values] = random_attributed(60, 0.1, 3, 2025);
  FeatureConfig cfg;
  cfg.target = 2;
  cfg.max_hop = 2;
  cfg.hop_weights = {1.0, 0.25};
  cfg.mode = FeatureMode::NNFVR;
  cfg.proclivity = &prone_values;
  auto fm1 = featurize_all(g, cfg, 1);
  auto fm2 = featurize_all(g, cfg, 2);
  auto fm5 = featurize_all(g, cfg, 5);
  CHECK(fm1.values == fm2.values);
  CHECK(fm1.values == fm5.values);
}

TEST_CASE("no nan or inf in any mode") {
  auto [g, prone_values] = random_attributed(40, 0.05, 3, 606);  // sparse: isolated nodes likely
  for (auto mode : {FeatureMode::NNS, FeatureMode::NFVR, FeatureMode::NNFVR}) {
    FeatureConfig cfg;
    cfg.target = 0;
    cfg.max_hop = 3;
    cfg.hop_weights = FeatureConfig::default_weights(3);
    cfg.mode = mode;
    cfg.proclivity = mode == FeatureMode::NNS ? nullptr : &prone_values;
    auto fm = featurize_all(g, cfg);
    for (double x : fm.values) CHECK(std::isfinite(x));
  }
}

TEST_CASE("config validation rejects bad shapes") {
  auto [g, prone_values] = random_attributed(10, 0.2, 2, 1);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 2;
  cfg.hop_weights = {1.0};  // wrong length
  cfg.proclivity = &prone_values;
  CHECK_THROWS_AS(cfg.validate(g.schema()), std::invalid_argument);

  cfg.hop_weights = {1.0, 1.5};  // out of (0,1]
  CHECK_THROWS_AS(cfg.validate(g.schema()), std::invalid_argument);

  cfg.hop_weights = {1.0, 0.5};
  cfg.target = 5;
  CHECK_THROWS_AS(cfg.validate(g.schema()), std::invalid_argument);

  cfg.target = 0;
  cfg.proclivity = nullptr;
  CHECK_THROWS_AS(cfg.validate(g.schema()), std::invalid_argument);

  cfg.mode = FeatureMode::NNS;
  CHECK_NOTHROW(cfg.validate(g.schema()));
}

TEST_CASE("feature csv round-trips through the reader") {
  auto [g, prone_values] = random_attributed(15, 0.2, 2, 88);
  FeatureConfig cfg;
  cfg.target = 0;
  cfg.max_hop = 1;
  cfg.hop_weights = {1.0};
  cfg.mode = FeatureMode::NNFVR;
  cfg.proclivity = &prone_values;
  auto fm = featurize_all(g, cfg);

  auto dir = std::filesystem::temp_directory_path() / "proclivity_featurize_tests";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "features.csv").string();
  const std::string layout = csv + ".layout.json";
  write_feature_csv(fm, g, csv, layout);

  auto file = read_feature_csv(csv, layout);
  CHECK(file.matrix.values == fm.values);  // %.17g round-trips doubles
  CHECK(file.matrix.labels == fm.labels);
  CHECK(file.matrix.dim == fm.dim);
  CHECK(file.matrix.mode == fm.mode);
  CHECK(file.matrix.prone_row == fm.prone_row);
  CHECK(file.node_tokens == g.node_tokens());
  CHECK(file.target_name == "a0");
  REQUIRE(file.matrix.blocks.size() == fm.blocks.size());
  for (std::size_t b = 0; b < fm.blocks.size(); ++b) {
    CHECK(file.matrix.blocks[b].name == fm.blocks[b].name);
    CHECK(file.matrix.blocks[b].offset == fm.blocks[b].offset);
    CHECK(file.matrix.blocks[b].width == fm.blocks[b].width);
  }
}
