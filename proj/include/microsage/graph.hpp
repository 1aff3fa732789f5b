#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "microsage/dataset.hpp"
#include "microsage/features.hpp"
#include "microsage/matrix.hpp"

namespace microsage {

/// Species interaction graph G: one node per (species, condition) seen in a
/// record, one edge per co-culture record. Per-condition components never
/// touch.
struct InteractionGraph {
  struct Edge {
    int node_a;
    int node_b;
    int record_index;
  };
  std::vector<std::pair<SpeciesId, ConditionId>> nodes;
  std::vector<Edge> edges;
};

InteractionGraph build_interaction_graph(const Dataset& ds);

enum class Task { OneWay, TwoWay };

/// Undirected carries one edge-graph node per record (two-way labels);
/// Directed carries two oriented nodes per record (one-way sign labels).
enum class GraphMode { Undirected, Directed };

inline GraphMode mode_for_task(Task task) {
  return task == Task::OneWay ? GraphMode::Directed : GraphMode::Undirected;
}

/// The line graph L(G): one node per interaction instance, adjacency between
/// instances sharing an endpoint (species, condition). Adjacency is stored
/// as CSR with each neighbor list sorted ascending.
struct EdgeGraph {
  Task task = Task::TwoWay;
  GraphMode mode = GraphMode::Undirected;
  int node_count = 0;
  int n_classes = 0;
  Matrix features;                          // node_count×13
  std::vector<int> labels;                  // class_index values
  std::vector<int> record_index;            // source record per node
  std::vector<RecordOrientation> node_orientation;
  std::vector<std::int64_t> csr_offsets;    // node_count+1
  std::vector<int> csr_neighbors;
  std::vector<std::uint8_t> train_mask;
  std::vector<std::uint8_t> test_mask;

  int degree(int node) const {
    return static_cast<int>(csr_offsets[node + 1] - csr_offsets[node]);
  }
  std::span<const int> neighbors(int node) const {
    return {csr_neighbors.data() + csr_offsets[node],
            static_cast<std::size_t>(degree(node))};
  }
};

EdgeGraph to_edge_graph(const InteractionGraph& g, GraphMode mode, const FeatureContext& ctx,
                        Task task, const Dataset& ds);

}  // namespace microsage
