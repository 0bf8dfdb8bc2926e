#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proclivity/graph.hpp"

namespace proclivity {

enum class GenerativeFunction { Square, Cube, XLogX };

const char* to_string(GenerativeFunction f);
std::optional<GenerativeFunction> parse_generative(std::string_view name);

// f(x) with f(0) = 0; XLogX uses the natural log (the index is invariant
// to the base).
double generative_value(GenerativeFunction f, double x) noexcept;

// Level-pair edge counts between two attributes. Each undirected edge is
// counted in both orientations, so total == 2m and self-mixing matrices
// are symmetric.
struct MixingMatrix {
  std::size_t attr_row = 0;
  std::size_t attr_col = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> counts;  // row-major
  std::vector<std::uint64_t> row_sums;
  std::vector<std::uint64_t> col_sums;
  std::uint64_t total = 0;

  std::uint64_t at(std::size_t s, std::size_t r) const { return counts.at(s * cols + r); }

  // Builds sums from raw counts (tests, synthetic matrices).
  static MixingMatrix from_counts(std::size_t rows, std::size_t cols,
                                  std::vector<std::uint64_t> counts);

  // Zeroes one row and one column (the missing level) and recomputes sums.
  void zero_level(std::size_t row_level, std::size_t col_level);
};

MixingMatrix mixing_matrix(const AttributedGraph& g, std::size_t i, std::size_t j);

// Divergence of the count matrix under f. nullopt when the denominator is
// zero (no usable signal, e.g. a single occupied cell).
std::optional<double> divergence(const MixingMatrix& m, GenerativeFunction f);

struct ProneValue {
  double value = 0.0;
  bool undefined_divergence = false;  // value substituted with 0
};

// rho = 1 - D_f; undefined divergence yields 0 with the flag set.
ProneValue prone(const MixingMatrix& m, GenerativeFunction f);

struct ProneOptions {
  // Drop the missing level's row/column from each mixing matrix before
  // computing the divergence.
  bool exclude_missing = false;
};

// t x t matrix of proclivity values; diagonal = self, off-diagonal = cross.
struct ProclivityMatrix {
  std::size_t size = 0;
  GenerativeFunction generative = GenerativeFunction::XLogX;
  std::vector<double> values;          // row-major
  std::vector<std::uint8_t> undefined;

  double at(std::size_t i, std::size_t j) const { return values.at(i * size + j); }
  bool flagged(std::size_t i, std::size_t j) const { return undefined.at(i * size + j) != 0; }
  std::vector<double> row(std::size_t i) const {
    return {values.begin() + static_cast<std::ptrdiff_t>(i * size),
            values.begin() + static_cast<std::ptrdiff_t>((i + 1) * size)};
  }

  // Uniform matrix, mostly for tests that need rho == c.
  static ProclivityMatrix constant(std::size_t size, double value, GenerativeFunction f);
};

ProclivityMatrix prone_matrix(const AttributedGraph& g, GenerativeFunction f,
                              const ProneOptions& opts = {});

// CSV with attribute names as row/column headers, 6 decimal places.
void export_heatmap(const ProclivityMatrix& p, const AttributeSchema& schema,
                    const std::string& path);
std::string heatmap_csv(const ProclivityMatrix& p, const AttributeSchema& schema);

}  // namespace proclivity
