#include "proclivity/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "proclivity/rng.hpp"

namespace proclivity {

namespace {

// Sample a Bernoulli(p) subset of the flat index range [0, space) with
// geometric skips; linear in the number of hits.
template <typename Emit>
void sample_indices(rng::Engine& eng, std::uint64_t space, double p, Emit&& emit) {
  if (space == 0 || p <= 0.0) return;
  std::uint64_t at = rng::geometric_skip(eng, p);
  while (at < space) {
    emit(at);
    const std::uint64_t skip = rng::geometric_skip(eng, p);
    if (skip >= space - at) break;
    at += skip + 1;
  }
}

}  // namespace

AttributedGraph synth_graph(const SynthConfig& cfg) {
  if (cfg.nodes < 2) throw std::invalid_argument("synth needs at least two nodes");
  if (cfg.blocks < 1 || cfg.blocks > cfg.nodes) {
    throw std::invalid_argument("blocks must lie in [1, nodes]");
  }
  if (!(cfg.p_in >= 0.0 && cfg.p_in <= 1.0) || !(cfg.p_out >= 0.0 && cfg.p_out <= 1.0)) {
    throw std::invalid_argument("edge probabilities must lie in [0, 1]");
  }

  const std::uint64_t n = cfg.nodes;
  const std::uint64_t blocks = cfg.blocks;

  // contiguous near-equal blocks
  std::vector<std::uint32_t> block_of(n);
  std::vector<std::uint64_t> block_start(blocks + 1);
  for (std::uint64_t b = 0; b <= blocks; ++b) block_start[b] = b * n / blocks;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    for (std::uint64_t v = block_start[b]; v < block_start[b + 1]; ++v) {
      block_of[v] = static_cast<std::uint32_t>(b);
    }
  }

  rng::Engine eng(cfg.seed);
  std::vector<std::pair<NodeId, NodeId>> edges;

  // intra-block triangles
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::uint64_t lo = block_start[b];
    const std::uint64_t size = block_start[b + 1] - lo;
    const std::uint64_t space = size * (size - 1) / 2;
    sample_indices(eng, space, cfg.p_in, [&](std::uint64_t flat) {
      // flat = j(j-1)/2 + i with 0 <= i < j
      auto j = static_cast<std::uint64_t>(
          (std::sqrt(8.0 * static_cast<double>(flat) + 1.0) + 1.0) / 2.0);
      while (j > 1 && j * (j - 1) / 2 > flat) --j;
      while ((j + 1) * j / 2 <= flat) ++j;
      const std::uint64_t i = flat - j * (j - 1) / 2;
      edges.emplace_back(static_cast<NodeId>(lo + i), static_cast<NodeId>(lo + j));
    });
  }
  // inter-block rectangles
  for (std::uint64_t b1 = 0; b1 < blocks; ++b1) {
    for (std::uint64_t b2 = b1 + 1; b2 < blocks; ++b2) {
      const std::uint64_t lo1 = block_start[b1], size1 = block_start[b1 + 1] - lo1;
      const std::uint64_t lo2 = block_start[b2], size2 = block_start[b2 + 1] - lo2;
      sample_indices(eng, size1 * size2, cfg.p_out, [&](std::uint64_t flat) {
        edges.emplace_back(static_cast<NodeId>(lo1 + flat / size2),
                           static_cast<NodeId>(lo2 + flat % size2));
      });
    }
  }

  std::vector<std::string> tokens(n);
  for (std::uint64_t v = 0; v < n; ++v) tokens[v] = "n" + std::to_string(v);

  std::vector<Attribute> attrs;
  std::vector<AttributeColumn> columns;

  Attribute block_attr;
  block_attr.name = "block";
  block_attr.kind = AttrKind::Nominal;
  for (std::uint64_t b = 0; b < blocks; ++b) block_attr.levels.push_back("b" + std::to_string(b));
  block_attr.missing_level = block_attr.levels.size();
  block_attr.levels.emplace_back(kMissingToken);
  attrs.push_back(std::move(block_attr));
  AttributeColumn block_col;
  block_col.levels.assign(block_of.begin(), block_of.end());
  columns.push_back(std::move(block_col));

  constexpr std::uint32_t kNoiseLevels = 4;
  for (std::uint32_t a = 0; a < cfg.noise_attributes; ++a) {
    Attribute noise;
    noise.name = "noise" + std::to_string(a + 1);
    noise.kind = AttrKind::Nominal;
    for (std::uint32_t l = 0; l < kNoiseLevels; ++l) noise.levels.push_back("u" + std::to_string(l));
    noise.missing_level = noise.levels.size();
    noise.levels.emplace_back(kMissingToken);
    attrs.push_back(std::move(noise));
    AttributeColumn col;
    col.levels.reserve(n);
    for (std::uint64_t v = 0; v < n; ++v) {
      col.levels.push_back(static_cast<std::uint32_t>(rng::uniform_below(eng, kNoiseLevels)));
    }
    columns.push_back(std::move(col));
  }

  return AttributedGraph(std::move(tokens), std::move(edges),
                         AttributeSchema(std::move(attrs)), std::move(columns));
}

}  // namespace proclivity
