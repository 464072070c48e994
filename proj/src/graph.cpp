#include "pwlmilp/graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pwlmilp::graph {

using nlohmann::json;

Graph::Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
  deg_.assign(n, 0);
  for (auto& [u, v] : edges) {
    if (u == v || u < 0 || v < 0 || u >= n || v >= n)
      throw Error(ErrorCode::ValidationError, "bad edge in graph");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  for (auto [u, v] : edges_) {
    adj_[idx(u, v)] = adj_[idx(v, u)] = 1;
    ++deg_[u];
    ++deg_[v];
  }
}

EdgeWeights::EdgeWeights(const Graph& g, double initial) : n_(g.n()) {
  w_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  for (auto [u, v] : g.edges()) set(u, v, initial);
}

double EdgeWeights::total() const {
  double s = 0.0;
  for (double x : w_) s += x;
  return s / 2.0;
}

Graph parse_graph_json(const std::string& text,
                       std::vector<double>* weights_out) {
  json j;
  try {
    j = json::parse(text);
    int n = j.at("n").get<int>();
    auto edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
    if (weights_out) {
      weights_out->clear();
      if (j.contains("weights")) {
        *weights_out = j["weights"].get<std::vector<double>>();
        if (weights_out->size() != edges.size())
          throw Error(ErrorCode::ParseError,
                      "weights length differs from edges");
      }
    }
    return Graph(n, std::move(edges));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("graph JSON: ") + e.what());
  }
}

std::string graph_to_json(const Graph& g, const std::vector<double>* weights) {
  json j;
  j["n"] = g.n();
  auto& edges = j["edges"] = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  if (weights) j["weights"] = *weights;
  return j.dump(2) + "\n";
}

Graph load_graph(const std::string& path, std::vector<double>* weights_out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open graph file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph_json(ss.str(), weights_out);
}

void save_graph(const Graph& g, const std::string& path,
                const std::vector<double>* weights) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write graph file: " + path);
  out << graph_to_json(g, weights);
}

}  // namespace pwlmilp::graph
