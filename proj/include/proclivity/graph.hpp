#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace proclivity {

using NodeId = std::uint32_t;

// Token used for missing cells in attribute files.
inline constexpr std::string_view kMissingToken = "?";

// Input file is syntactically broken; message carries file and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

// Input parses but is semantically unusable (unknown node, empty column, ...).
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AttrKind { Nominal, NumericDiscretized, NumericContinuous };

struct Attribute {
  std::string name;
  AttrKind kind = AttrKind::Nominal;
  // Ordered level tokens; empty for NumericContinuous. Discrete attributes
  // carry exactly one reserved missing level.
  std::vector<std::string> levels;
  std::size_t missing_level = 0;

  std::size_t level_count() const noexcept { return levels.size(); }
  bool discrete() const noexcept { return kind != AttrKind::NumericContinuous; }
};

class AttributeSchema {
 public:
  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<Attribute> attrs) : attrs_(std::move(attrs)) {}

  std::size_t attribute_count() const noexcept { return attrs_.size(); }
  const Attribute& attribute(std::size_t i) const { return attrs_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::vector<Attribute>& attributes() const noexcept { return attrs_; }

 private:
  std::vector<Attribute> attrs_;
};

// One attribute column over all nodes. Discrete columns hold level indices,
// continuous ones hold reals with NaN as the missing marker.
struct AttributeColumn {
  std::vector<std::uint32_t> levels;
  std::vector<double> reals;
};

struct LoadOptions {
  // Attribute names that must stay nominal even if every cell parses as a number.
  std::vector<std::string> force_nominal;
};

struct LoadStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges_dropped = 0;
};

// Immutable undirected simple graph in CSR form plus the node attribute
// table. Safe for concurrent reads after construction.
class AttributedGraph {
 public:
  // Direct construction from in-memory parts (synthetic graphs, tests).
  // Edges may contain duplicates and self-loops; they are dropped and
  // counted in `stats` like the file loader does.
  AttributedGraph(std::vector<std::string> node_tokens,
                  std::vector<std::pair<NodeId, NodeId>> edges,
                  AttributeSchema schema,
                  std::vector<AttributeColumn> columns,
                  LoadStats* stats = nullptr);

  static AttributedGraph load(const std::string& edge_path,
                              const std::string& attr_path,
                              const LoadOptions& opts = {},
                              LoadStats* stats = nullptr);

  // Writes the same two text formats back, rows and edges ordered by node
  // token so output is deterministic.
  void serialize(const std::string& edge_path, const std::string& attr_path) const;

  std::uint32_t node_count() const noexcept { return static_cast<std::uint32_t>(tokens_.size()); }
  std::uint64_t edge_count() const noexcept { return edge_count_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    check_node(v);
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(NodeId v) const {
    check_node(v);
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }

  // Nodes at exact shortest-path distance h from v, ascending. h = 0 yields {v}.
  std::vector<NodeId> hop_shell(NodeId v, std::uint32_t h) const;

  const AttributeSchema& schema() const noexcept { return schema_; }
  const std::string& node_token(NodeId v) const { return tokens_.at(v); }
  const std::vector<std::string>& node_tokens() const noexcept { return tokens_; }
  const AttributeColumn& column(std::size_t attr) const { return columns_.at(attr); }

  std::uint32_t level_at(NodeId v, std::size_t attr) const;
  double real_at(NodeId v, std::size_t attr) const;
  bool missing_at(NodeId v, std::size_t attr) const;

  // Copy with one numeric-continuous attribute replaced by `bins` equal-width
  // levels over [min, max]; the maximum maps to the top bin, NaN to the
  // missing level. A constant column lands entirely in bin 0.
  AttributedGraph discretize(std::size_t attr, std::size_t bins) const;

  // Copy with the given nodes' cells of a discrete attribute set to the
  // missing level (transductive masking).
  AttributedGraph with_levels_masked(std::size_t attr, std::span<const NodeId> nodes) const;

 private:
  AttributedGraph() = default;
  void check_node(NodeId v) const {
    if (v >= tokens_.size()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
  }
  void check_attr(std::size_t attr) const {
    if (attr >= schema_.attribute_count()) throw std::out_of_range("attribute index out of range");
  }

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> offsets_;  // size n + 1
  std::vector<NodeId> adjacency_;       // both directions, sorted per node
  std::uint64_t edge_count_ = 0;        // undirected m
  AttributeSchema schema_;
  std::vector<AttributeColumn> columns_;
};

// Reusable truncated-BFS scratch. One instance per worker thread; collect()
// costs O(edges within distance h of v), independent of |V|.
class ShellWalker {
 public:
  explicit ShellWalker(const AttributedGraph& g)
      : g_(&g), mark_(g.node_count(), 0) {}

  // Fills shells[i-1] with the nodes at exact distance i, i = 1..h.
  // Shell order follows BFS discovery; callers that need sets must sort.
  void collect(NodeId v, std::uint32_t h, std::vector<std::vector<NodeId>>& shells);

 private:
  const AttributedGraph* g_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
};

}  // namespace proclivity
