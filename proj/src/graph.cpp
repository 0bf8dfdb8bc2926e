#include "proclivity/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace proclivity {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + token.size() && std::isfinite(out);
}

std::string format_real(double v) {
  if (std::isnan(v)) return std::string(kMissingToken);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::optional<std::size_t> AttributeSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (attrs_[i].name == name) return i;
  }
  return std::nullopt;
}

AttributedGraph::AttributedGraph(std::vector<std::string> node_tokens,
                                 std::vector<std::pair<NodeId, NodeId>> edges,
                                 AttributeSchema schema,
                                 std::vector<AttributeColumn> columns,
                                 LoadStats* stats)
    : tokens_(std::move(node_tokens)),
      schema_(std::move(schema)),
      columns_(std::move(columns)) {
  const std::size_t n = tokens_.size();
  if (columns_.size() != schema_.attribute_count()) {
    throw DataError("column count does not match schema");
  }
  for (std::size_t a = 0; a < columns_.size(); ++a) {
    const auto& attr = schema_.attribute(a);
    const std::size_t cells = attr.discrete() ? columns_[a].levels.size() : columns_[a].reals.size();
    if (cells != n) throw DataError("attribute table row count does not match node count");
    if (attr.discrete()) {
      if (attr.level_count() < 2) throw DataError("attribute '" + attr.name + "' needs at least two levels");
      if (attr.missing_level >= attr.level_count()) throw DataError("missing level index out of range");
      for (std::uint32_t lv : columns_[a].levels) {
        if (lv >= attr.level_count()) throw DataError("level index out of range in attribute table");
      }
    }
  }

  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  std::vector<std::pair<NodeId, NodeId>> normalized;
  normalized.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw DataError("edge endpoint out of range");
    if (u == v) {
      ++st.self_loops_dropped;
      continue;
    }
    normalized.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(normalized.begin(), normalized.end());
  auto last = std::unique(normalized.begin(), normalized.end());
  st.duplicate_edges_dropped += static_cast<std::size_t>(normalized.end() - last);
  normalized.erase(last, normalized.end());
  edge_count_ = normalized.size();

  std::vector<std::uint32_t> deg(n, 0);
  for (auto [u, v] : normalized) {
    ++deg[u];
    ++deg[v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : normalized) {
    adjacency_[cursor[u]++] = v;
    adjacency_[cursor[v]++] = u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

AttributedGraph AttributedGraph::load(const std::string& edge_path, const std::string& attr_path,
                                      const LoadOptions& opts, LoadStats* stats) {
  std::ifstream attr_in(attr_path);
  if (!attr_in) throw DataError("cannot open attribute file: " + attr_path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(attr_in, line)) throw ParseError(attr_path, 1, "missing header row");
  ++line_no;
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "node") {
    throw ParseError(attr_path, 1, "header must be node,<attr1>,...");
  }
  const std::size_t t = header.size() - 1;

  std::vector<std::string> tokens;
  std::unordered_map<std::string, NodeId> index;
  std::vector<std::vector<std::string>> cells(t);  // column-major raw tokens
  while (std::getline(attr_in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != t + 1) {
      throw ParseError(attr_path, line_no,
                       "expected " + std::to_string(t + 1) + " cells, got " + std::to_string(row.size()));
    }
    if (row[0].empty()) throw ParseError(attr_path, line_no, "empty node token");
    if (index.count(row[0])) throw ParseError(attr_path, line_no, "duplicate node token '" + row[0] + "'");
    index.emplace(row[0], static_cast<NodeId>(tokens.size()));
    tokens.push_back(row[0]);
    for (std::size_t a = 0; a < t; ++a) cells[a].push_back(row[a + 1]);
  }
  if (tokens.empty()) throw DataError("attribute file has no rows: " + attr_path);

  std::vector<Attribute> attrs(t);
  std::vector<AttributeColumn> columns(t);
  for (std::size_t a = 0; a < t; ++a) {
    attrs[a].name = header[a + 1];
    const bool forced = std::find(opts.force_nominal.begin(), opts.force_nominal.end(),
                                  attrs[a].name) != opts.force_nominal.end();
    bool numeric = !forced;
    bool any_value = false;
    double parsed;
    for (const auto& cell : cells[a]) {
      if (cell == kMissingToken) continue;
      any_value = true;
      if (numeric && !parse_double(cell, parsed)) numeric = false;
    }
    if (!any_value) throw DataError("attribute '" + attrs[a].name + "' has no non-missing values");

    if (numeric) {
      attrs[a].kind = AttrKind::NumericContinuous;
      columns[a].reals.reserve(tokens.size());
      for (const auto& cell : cells[a]) {
        if (cell == kMissingToken) {
          columns[a].reals.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
          parse_double(cell, parsed);
          columns[a].reals.push_back(parsed);
        }
      }
    } else {
      attrs[a].kind = AttrKind::Nominal;
      std::unordered_map<std::string, std::uint32_t> level_index;
      columns[a].levels.reserve(tokens.size());
      for (const auto& cell : cells[a]) {
        auto it = level_index.find(cell);
        if (it == level_index.end()) {
          it = level_index.emplace(cell, static_cast<std::uint32_t>(attrs[a].levels.size())).first;
          attrs[a].levels.push_back(cell);
        }
        columns[a].levels.push_back(it->second);
      }
      auto missing_it = level_index.find(std::string(kMissingToken));
      if (missing_it == level_index.end()) {
        attrs[a].missing_level = attrs[a].levels.size();
        attrs[a].levels.emplace_back(kMissingToken);
      } else {
        attrs[a].missing_level = missing_it->second;
      }
    }
  }

  std::ifstream edge_in(edge_path);
  if (!edge_in) throw DataError("cannot open edge file: " + edge_path);
  std::vector<std::pair<NodeId, NodeId>> edges;
  line_no = 0;
  while (std::getline(edge_in, line)) {
    ++line_no;
    std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::istringstream iss(body);
    std::string a, b, extra;
    if (!(iss >> a >> b) || (iss >> extra)) {
      throw ParseError(edge_path, line_no, "expected exactly two node tokens");
    }
    auto ia = index.find(a);
    if (ia == index.end()) {
      throw ParseError(edge_path, line_no, "node '" + a + "' has no attribute row");
    }
    auto ib = index.find(b);
    if (ib == index.end()) {
      throw ParseError(edge_path, line_no, "node '" + b + "' has no attribute row");
    }
    edges.emplace_back(ia->second, ib->second);
  }

  return AttributedGraph(std::move(tokens), std::move(edges),
                         AttributeSchema(std::move(attrs)), std::move(columns), stats);
}

void AttributedGraph::serialize(const std::string& edge_path, const std::string& attr_path) const {
  const std::size_t n = tokens_.size();
  std::vector<NodeId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<NodeId>(i);
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return tokens_[a] < tokens_[b]; });

  std::ofstream edge_out(edge_path);
  if (!edge_out) throw DataError("cannot write edge file: " + edge_path);
  std::vector<std::pair<std::string, std::string>> lines;
  lines.reserve(edge_count_);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) {
        const std::string& tu = tokens_[u];
        const std::string& tv = tokens_[v];
        if (tu <= tv) {
          lines.emplace_back(tu, tv);
        } else {
          lines.emplace_back(tv, tu);
        }
      }
    }
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [a, b] : lines) edge_out << a << ' ' << b << '\n';

  std::ofstream attr_out(attr_path);
  if (!attr_out) throw DataError("cannot write attribute file: " + attr_path);
  attr_out << "node";
  for (const auto& attr : schema_.attributes()) attr_out << ',' << attr.name;
  attr_out << '\n';
  for (NodeId v : order) {
    attr_out << tokens_[v];
    for (std::size_t a = 0; a < schema_.attribute_count(); ++a) {
      const auto& attr = schema_.attribute(a);
      attr_out << ',';
      if (attr.discrete()) {
        attr_out << attr.levels[columns_[a].levels[v]];
      } else {
        attr_out << format_real(columns_[a].reals[v]);
      }
    }
    attr_out << '\n';
  }
}

std::uint32_t AttributedGraph::level_at(NodeId v, std::size_t attr) const {
  check_node(v);
  check_attr(attr);
  if (!schema_.attribute(attr).discrete()) {
    throw DataError("attribute '" + schema_.attribute(attr).name + "' is continuous; discretize first");
  }
  return columns_[attr].levels[v];
}

double AttributedGraph::real_at(NodeId v, std::size_t attr) const {
  check_node(v);
  check_attr(attr);
  if (schema_.attribute(attr).discrete()) {
    throw DataError("attribute '" + schema_.attribute(attr).name + "' is not continuous");
  }
  return columns_[attr].reals[v];
}

bool AttributedGraph::missing_at(NodeId v, std::size_t attr) const {
  check_node(v);
  check_attr(attr);
  const auto& a = schema_.attribute(attr);
  if (a.discrete()) return columns_[attr].levels[v] == a.missing_level;
  return std::isnan(columns_[attr].reals[v]);
}

std::vector<NodeId> AttributedGraph::hop_shell(NodeId v, std::uint32_t h) const {
  check_node(v);
  if (h == 0) return {v};
  ShellWalker walker(*this);
  std::vector<std::vector<NodeId>> shells;
  walker.collect(v, h, shells);
  std::vector<NodeId> result = std::move(shells[h - 1]);
  std::sort(result.begin(), result.end());
  return result;
}

void ShellWalker::collect(NodeId v, std::uint32_t h, std::vector<std::vector<NodeId>>& shells) {
  shells.assign(h, {});
  if (h == 0) return;
  ++stamp_;
  if (stamp_ == 0) {  // wrapped; reset marks
    std::fill(mark_.begin(), mark_.end(), 0);
    stamp_ = 1;
  }
  mark_[v] = stamp_;
  // depth 1 straight off the adjacency list; deeper shells expand level by level
  auto& first = shells[0];
  for (NodeId u : g_->neighbors(v)) {
    mark_[u] = stamp_;
    first.push_back(u);
  }
  for (std::uint32_t depth = 1; depth < h; ++depth) {
    const auto& frontier = shells[depth - 1];
    if (frontier.empty()) break;
    auto& next = shells[depth];
    for (NodeId u : frontier) {
      for (NodeId w : g_->neighbors(u)) {
        if (mark_[w] != stamp_) {
          mark_[w] = stamp_;
          next.push_back(w);
        }
      }
    }
  }
}

AttributedGraph AttributedGraph::discretize(std::size_t attr, std::size_t bins) const {
  check_attr(attr);
  const Attribute& a = schema_.attribute(attr);
  if (a.discrete()) throw DataError("attribute '" + a.name + "' is already discrete");
  if (bins < 2) throw std::invalid_argument("bins must be >= 2");

  const auto& reals = columns_[attr].reals;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : reals) {
    if (std::isnan(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!std::isfinite(lo)) throw DataError("attribute '" + a.name + "' has only missing values");

  Attribute binned;
  binned.name = a.name;
  binned.kind = AttrKind::NumericDiscretized;
  for (std::size_t b = 0; b < bins; ++b) binned.levels.push_back("bin" + std::to_string(b));
  binned.missing_level = bins;
  binned.levels.emplace_back(kMissingToken);

  const double width = (hi - lo) / static_cast<double>(bins);
  AttributeColumn col;
  col.levels.reserve(reals.size());
  for (double x : reals) {
    if (std::isnan(x)) {
      col.levels.push_back(static_cast<std::uint32_t>(bins));
    } else if (width <= 0.0) {
      col.levels.push_back(0);  // constant column: single occupied bin
    } else {
      auto b = static_cast<std::int64_t>(std::floor((x - lo) / width));
      b = std::clamp<std::int64_t>(b, 0, static_cast<std::int64_t>(bins) - 1);
      col.levels.push_back(static_cast<std::uint32_t>(b));
    }
  }

  AttributedGraph copy(*this);
  std::vector<Attribute> attrs = schema_.attributes();
  attrs[attr] = std::move(binned);
  copy.schema_ = AttributeSchema(std::move(attrs));
  copy.columns_[attr] = std::move(col);
  return copy;
}

AttributedGraph AttributedGraph::with_levels_masked(std::size_t attr,
                                                    std::span<const NodeId> nodes) const {
  check_attr(attr);
  const Attribute& a = schema_.attribute(attr);
  if (!a.discrete()) throw DataError("attribute '" + a.name + "' is continuous; cannot mask levels");
  AttributedGraph copy(*this);
  auto& levels = copy.columns_[attr].levels;
  for (NodeId v : nodes) {
    check_node(v);
    levels[v] = static_cast<std::uint32_t>(a.missing_level);
  }
  return copy;
}

}  // namespace proclivity
