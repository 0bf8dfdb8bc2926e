#pragma once

#include <cstdint>

#include "proclivity/graph.hpp"

namespace proclivity {

// Planted-partition generator. Nodes split into near-equal contiguous
// blocks; intra-block pairs draw an edge with p_in, inter-block pairs with
// p_out. The block id is emitted as nominal attribute "block" (the
// homophilic target); noise_attributes extra uniform 4-level nominal
// attributes follow. Deterministic per seed.
struct SynthConfig {
  std::uint32_t nodes = 500;
  std::uint32_t blocks = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  std::uint32_t noise_attributes = 1;
  std::uint64_t seed = 42;
};

AttributedGraph synth_graph(const SynthConfig& cfg);

}  // namespace proclivity
