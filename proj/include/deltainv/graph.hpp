#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace deltainv {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class GraphError : public std::runtime_error {
 public:
  enum class Kind { kInvalid, kNotATree, kNotNegativeDefinite };
  GraphError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Plumbing tree with Euler numbers and curve arrows. Vertices are stored in
/// increasing id order; "index" below always means the position in that order.
class ResolutionGraph {
 public:
  struct Arrow {
    int vertex;
    int multiplicity;
  };

  /// Validates tree shape and negative definiteness.
  ResolutionGraph(std::vector<std::pair<int, int>> vertices,
                  std::vector<std::pair<int, int>> edges,
                  std::vector<Arrow> arrows = {});

  std::size_t size() const { return ids_.size(); }
  int id(std::size_t i) const { return ids_[i]; }
  const std::vector<int>& ids() const { return ids_; }
  std::size_t index_of(int id) const;
  int euler(std::size_t i) const { return euler_[i]; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const {
    return adj_[i];
  }
  std::size_t valence(std::size_t i) const { return adj_[i].size(); }
  int arrow(std::size_t i) const { return arrow_[i]; }
  bool has_arrows() const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  IntMatrix intersection_matrix() const;

  /// Full subgraph on the given indices (must be connected); arrows dropped.
  ResolutionGraph induced(const std::vector<std::size_t>& indices) const;
  ResolutionGraph with_arrows(const std::vector<Arrow>& arrows) const;

  /// Serialization in the graph-file grammar.
  std::string to_text() const;

 private:
  std::vector<int> ids_;
  std::vector<int> euler_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<int> arrow_;
};

/// Grammar: `v <id> <euler>`, `e <id> <id>`, `a <id> [mult]`, `#` comments.
ResolutionGraph parse_graph(std::string_view text);
ResolutionGraph load_graph(const std::string& path);

/// Leading principal minors of a square matrix, exact.
std::vector<std::int64_t> leading_minors(const IntMatrix& m);

}  // namespace deltainv
