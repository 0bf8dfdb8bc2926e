#include "proclivity/prone.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace proclivity {

const char* to_string(GenerativeFunction f) {
  switch (f) {
    case GenerativeFunction::Square: return "square";
    case GenerativeFunction::Cube: return "cube";
    case GenerativeFunction::XLogX: return "xlogx";
  }
  return "unknown";
}

std::optional<GenerativeFunction> parse_generative(std::string_view name) {
  if (name == "square") return GenerativeFunction::Square;
  if (name == "cube") return GenerativeFunction::Cube;
  if (name == "xlogx") return GenerativeFunction::XLogX;
  return std::nullopt;
}

double generative_value(GenerativeFunction f, double x) noexcept {
  switch (f) {
    case GenerativeFunction::Square: return x * x;
    case GenerativeFunction::Cube: return x * x * x;
    case GenerativeFunction::XLogX: return x > 0.0 ? x * std::log(x) : 0.0;
  }
  return 0.0;
}

namespace {

long double gen_ld(GenerativeFunction f, long double x) {
  switch (f) {
    case GenerativeFunction::Square: return x * x;
    case GenerativeFunction::Cube: return x * x * x;
    case GenerativeFunction::XLogX: return x > 0.0L ? x * std::log(x) : 0.0L;
  }
  return 0.0L;
}

}  // namespace

MixingMatrix MixingMatrix::from_counts(std::size_t rows, std::size_t cols,
                                       std::vector<std::uint64_t> counts) {
  if (counts.size() != rows * cols) throw std::invalid_argument("count vector has wrong size");
  MixingMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.counts = std::move(counts);
  m.row_sums.assign(rows, 0);
  m.col_sums.assign(cols, 0);
  m.total = 0;
  for (std::size_t s = 0; s < rows; ++s) {
    for (std::size_t r = 0; r < cols; ++r) {
      const std::uint64_t c = m.counts[s * cols + r];
      m.row_sums[s] += c;
      m.col_sums[r] += c;
      m.total += c;
    }
  }
  return m;
}

void MixingMatrix::zero_level(std::size_t row_level, std::size_t col_level) {
  if (row_level >= rows || col_level >= cols) throw std::out_of_range("level index out of range");
  for (std::size_t r = 0; r < cols; ++r) counts[row_level * cols + r] = 0;
  for (std::size_t s = 0; s < rows; ++s) counts[s * cols + col_level] = 0;
  const std::size_t ai = attr_row, aj = attr_col;
  *this = from_counts(rows, cols, std::move(counts));
  attr_row = ai;
  attr_col = aj;
}

MixingMatrix mixing_matrix(const AttributedGraph& g, std::size_t i, std::size_t j) {
  const auto& schema = g.schema();
  const Attribute& ai = schema.attribute(i);
  const Attribute& aj = schema.attribute(j);
  if (!ai.discrete() || !aj.discrete()) {
    throw DataError("mixing matrix needs discrete attributes; discretize first");
  }

  MixingMatrix m;
  m.attr_row = i;
  m.attr_col = j;
  m.rows = ai.level_count();
  m.cols = aj.level_count();
  m.counts.assign(m.rows * m.cols, 0);

  const auto& ci = g.column(i).levels;
  const auto& cj = g.column(j).levels;
  // one linear scan; every undirected edge lands in both orientations
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v) {
        ++m.counts[ci[u] * m.cols + cj[v]];
        ++m.counts[ci[v] * m.cols + cj[u]];
      }
    }
  }

  m.row_sums.assign(m.rows, 0);
  m.col_sums.assign(m.cols, 0);
  for (std::size_t s = 0; s < m.rows; ++s) {
    for (std::size_t r = 0; r < m.cols; ++r) {
      const std::uint64_t c = m.counts[s * m.cols + r];
      m.row_sums[s] += c;
      m.col_sums[r] += c;
      m.total += c;
    }
  }
  return m;
}

std::optional<double> divergence(const MixingMatrix& m, GenerativeFunction f) {
  if (m.total == 0) return std::nullopt;
  const long double total = static_cast<long double>(m.total);

  long double f_rows = 0.0L;   // sum_i f(e_i.)
  long double f_cols = 0.0L;   // sum_j f(e_.j)
  long double f_cells = 0.0L;  // sum_ij f(e_ij)
  long double f_indep = 0.0L;  // sum_ij f(e_.j * e_i. / e_..)
  for (std::size_t s = 0; s < m.rows; ++s) {
    f_rows += gen_ld(f, static_cast<long double>(m.row_sums[s]));
  }
  for (std::size_t r = 0; r < m.cols; ++r) {
    f_cols += gen_ld(f, static_cast<long double>(m.col_sums[r]));
  }
  for (std::size_t s = 0; s < m.rows; ++s) {
    const long double row = static_cast<long double>(m.row_sums[s]);
    for (std::size_t r = 0; r < m.cols; ++r) {
      f_cells += gen_ld(f, static_cast<long double>(m.counts[s * m.cols + r]));
      f_indep += gen_ld(f, static_cast<long double>(m.col_sums[r]) * (row / total));
    }
  }

  const long double numerator = f_rows + f_cols - 2.0L * f_cells;
  const long double denominator = f_rows + f_cols - 2.0L * f_indep;
  if (denominator == 0.0L) return std::nullopt;
  return static_cast<double>(numerator / denominator);
}

ProneValue prone(const MixingMatrix& m, GenerativeFunction f) {
  auto d = divergence(m, f);
  if (!d) return {0.0, true};
  return {1.0 - *d, false};
}

ProclivityMatrix ProclivityMatrix::constant(std::size_t size, double value, GenerativeFunction f) {
  ProclivityMatrix p;
  p.size = size;
  p.generative = f;
  p.values.assign(size * size, value);
  p.undefined.assign(size * size, 0);
  return p;
}

ProclivityMatrix prone_matrix(const AttributedGraph& g, GenerativeFunction f,
                              const ProneOptions& opts) {
  const std::size_t t = g.schema().attribute_count();
  ProclivityMatrix p;
  p.size = t;
  p.generative = f;
  p.values.assign(t * t, 0.0);
  p.undefined.assign(t * t, 0);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = i; j < t; ++j) {
      MixingMatrix m = mixing_matrix(g, i, j);
      if (opts.exclude_missing) {
        m.zero_level(g.schema().attribute(i).missing_level,
                     g.schema().attribute(j).missing_level);
      }
      ProneValue v = prone(m, f);
      p.values[i * t + j] = v.value;
      p.undefined[i * t + j] = v.undefined_divergence ? 1 : 0;
      // both-orientation counting makes M(j,i) the transpose of M(i,j),
      // and the divergence is transpose-invariant
      p.values[j * t + i] = v.value;
      p.undefined[j * t + i] = p.undefined[i * t + j];
    }
  }
  return p;
}

std::string heatmap_csv(const ProclivityMatrix& p, const AttributeSchema& schema) {
  std::string out = "attribute";
  for (std::size_t j = 0; j < p.size; ++j) {
    out += ',';
    out += schema.attribute(j).name;
  }
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < p.size; ++i) {
    out += schema.attribute(i).name;
    for (std::size_t j = 0; j < p.size; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.6f", p.at(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void export_heatmap(const ProclivityMatrix& p, const AttributeSchema& schema,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write heatmap file: " + path);
  out << heatmap_csv(p, schema);
}

}  // namespace proclivity
