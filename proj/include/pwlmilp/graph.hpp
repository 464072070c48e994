#ifndef PWLMILP_GRAPH_HPP
#define PWLMILP_GRAPH_HPP

#include <string>
#include <utility>
#include <vector>

#include "pwlmilp/errors.hpp"

namespace pwlmilp::graph {

/// Small dense simple graph.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<std::pair<int, int>> edges);

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool has_edge(int u, int v) const { return adj_[idx(u, v)]; }
  int degree(int v) const { return deg_[v]; }

 private:
  std::size_t idx(int u, int v) const {
    return static_cast<std::size_t>(u) * n_ + v;
  }
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;  // u < v, sorted
  std::vector<char> adj_;
  std::vector<int> deg_;
};

/// Symmetric edge weights, zero off the edge set.
class EdgeWeights {
 public:
  EdgeWeights() = default;
  explicit EdgeWeights(const Graph& g, double initial = 1.0);
  double get(int u, int v) const { return w_[idx(u, v)]; }
  void set(int u, int v, double w) { w_[idx(u, v)] = w_[idx(v, u)] = w; }
  double total() const;

 private:
  std::size_t idx(int u, int v) const {
    return static_cast<std::size_t>(u) * n_ + v;
  }
  int n_ = 0;
  std::vector<double> w_;
};

Graph parse_graph_json(const std::string& text,
                       std::vector<double>* weights_out = nullptr);
std::string graph_to_json(const Graph& g,
                          const std::vector<double>* weights = nullptr);
Graph load_graph(const std::string& path,
                 std::vector<double>* weights_out = nullptr);
void save_graph(const Graph& g, const std::string& path,
                const std::vector<double>* weights = nullptr);

}  // namespace pwlmilp::graph

#endif  // PWLMILP_GRAPH_HPP
