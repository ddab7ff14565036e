#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "folo/measurement.hpp"

namespace folo {

// Simple undirected bus graph. Lines are stored with the smaller id first;
// self-loops and duplicate lines are rejected.
struct Topology {
  std::vector<int> buses;                    // sorted, unique
  std::vector<std::pair<int, int>> lines;

  bool has_bus(int bus) const;
};

Topology make_topology(std::vector<int> buses, std::vector<std::pair<int, int>> lines);

inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

// Hop count of the shortest path, kInfiniteDistance when disconnected.
// Unknown bus ids are errors.
int graph_distance(const Topology& topo, int from_bus, int to_bus);

// Buses within n0 hops of `bus`, sorted ascending. n0 == 0 gives {bus}.
std::vector<int> vicinity_set(const Topology& topo, int bus, int n0);

// True when the largest-magnitude entry of the normalized matrix sits on a
// channel whose bus lies outside the n0-vicinity of the claimed source. Ties
// resolve to the smallest row, then smallest column.
bool is_counter_intuitive(const NormalizedMeasurementMatrix& yn, const Topology& topo,
                          int source_bus, int n0);

}  // namespace folo
