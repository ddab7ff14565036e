#include "folo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>
#include <unordered_map>

#include "folo/error.hpp"

namespace folo {

Topology make_topology(std::vector<int> buses, std::vector<std::pair<int, int>> lines) {
  std::set<int> bus_set(buses.begin(), buses.end());
  std::set<std::pair<int, int>> line_set;
  for (const auto& [a, b] : lines) {
    if (a == b) throw Error("topology: line from bus " + std::to_string(a) + " to itself");
    const auto key = std::minmax(a, b);
    if (!line_set.insert(key).second) {
      throw Error("topology: duplicate line " + std::to_string(key.first) + "-" +
                  std::to_string(key.second));
    }
    bus_set.insert(a);
    bus_set.insert(b);
  }
  if (bus_set.empty()) throw Error("topology: no buses");
  Topology t;
  t.buses.assign(bus_set.begin(), bus_set.end());
  t.lines.assign(line_set.begin(), line_set.end());
  return t;
}

bool Topology::has_bus(int bus) const {
  return std::binary_search(buses.begin(), buses.end(), bus);
}

int graph_distance(const Topology& topo, int from_bus, int to_bus) {
  if (!topo.has_bus(from_bus)) {
    throw Error("topology: unknown bus " + std::to_string(from_bus));
  }
  if (!topo.has_bus(to_bus)) throw Error("topology: unknown bus " + std::to_string(to_bus));
  if (from_bus == to_bus) return 0;

  std::unordered_map<int, std::vector<int>> adj;
  for (const auto& [a, b] : topo.lines) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::unordered_map<int, int> dist;
  dist[from_bus] = 0;
  std::deque<int> queue{from_bus};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (dist.count(v)) continue;
      dist[v] = dist[u] + 1;
      if (v == to_bus) return dist[v];
      queue.push_back(v);
    }
  }
  return kInfiniteDistance;
}

std::vector<int> vicinity_set(const Topology& topo, int bus, int n0) {
  if (n0 < 0) throw Error("topology: vicinity radius must be nonnegative");
  std::vector<int> out;
  for (int b : topo.buses) {
    if (graph_distance(topo, bus, b) <= n0) out.push_back(b);
  }
  return out;
}

bool is_counter_intuitive(const NormalizedMeasurementMatrix& yn, const Topology& topo,
                          int source_bus, int n0) {
  if (n0 < 0) throw Error("topology: vicinity radius must be nonnegative");
  const auto& values = yn.matrix.values;
  if (values.size() == 0) throw Error("topology: empty measurement matrix");
  if (yn.matrix.channels.size() != static_cast<std::size_t>(values.rows())) {
    throw Error("topology: channel metadata does not match row count");
  }
  Eigen::Index best_row = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double v = std::abs(values(i, j));
      if (v > best) {
        best = v;
        best_row = i;
      }
    }
  }
  const int loudest_bus = yn.matrix.channels[static_cast<std::size_t>(best_row)].bus;
  const int d = graph_distance(topo, source_bus, loudest_bus);
  return d == kInfiniteDistance || d > n0;
}

}  // namespace folo
