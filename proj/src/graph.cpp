#include "microsage/graph.hpp"

#include <algorithm>
#include <map>

#include "microsage/common.hpp"

namespace microsage {

InteractionGraph build_interaction_graph(const Dataset& ds) {
  InteractionGraph g;
  std::map<std::pair<SpeciesId, ConditionId>, int> node_index;
  auto node_of = [&](SpeciesId s, ConditionId c) {
    auto [it, inserted] = node_index.try_emplace({s, c}, static_cast<int>(g.nodes.size()));
    if (inserted) g.nodes.emplace_back(s, c);
    return it->second;
  };
  g.edges.reserve(ds.records.size());
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const CocultureRecord& rec = ds.records[r];
    g.edges.push_back({node_of(rec.species_x, rec.condition),
                       node_of(rec.species_y, rec.condition), static_cast<int>(r)});
  }
  return g;
}

EdgeGraph to_edge_graph(const InteractionGraph& g, GraphMode mode, const FeatureContext& ctx,
                        Task task, const Dataset& ds) {
  if (g.edges.empty()) fail(Errc::EmptyGraph, "interaction graph has no edges");
  if (mode != mode_for_task(task)) {
    fail(Errc::InvalidConfig, "one-way task needs Directed mode, two-way needs Undirected");
  }

  const int record_count = static_cast<int>(g.edges.size());
  const bool directed = mode == GraphMode::Directed;
  const int per_record = directed ? 2 : 1;

  EdgeGraph eg;
  eg.task = task;
  eg.mode = mode;
  eg.node_count = record_count * per_record;
  eg.n_classes = task == Task::OneWay ? 2 : 3;
  eg.features = Matrix(eg.node_count, kFeatureDim);
  eg.labels.resize(eg.node_count);
  eg.record_index.resize(eg.node_count);
  eg.node_orientation.resize(eg.node_count);

  for (int e = 0; e < record_count; ++e) {
    const CocultureRecord& rec = ds.records[g.edges[e].record_index];
    for (int o = 0; o < per_record; ++o) {
      const int node = e * per_record + o;
      const auto orientation = o == 0 ? RecordOrientation::XY : RecordOrientation::YX;
      eg.record_index[node] = g.edges[e].record_index;
      eg.node_orientation[node] = orientation;
      if (task == Task::OneWay) {
        eg.labels[node] =
            class_index(orientation == RecordOrientation::XY ? rec.label_xy : rec.label_yx);
      } else {
        eg.labels[node] = class_index(derive_two_way(rec.label_xy, rec.label_yx));
      }
      const FeatureVector values = assemble_features(rec, orientation, ctx);
      std::copy(values.begin(), values.end(), eg.features.row(node));
    }
  }

  // Records incident to each G-node; two records are adjacent in L(G) iff
  // they appear in some shared list. Distinct edges of a simple graph share
  // at most one endpoint, so no pair is produced twice.
  std::vector<std::vector<int>> incident(g.nodes.size());
  for (int e = 0; e < record_count; ++e) {
    incident[g.edges[e].node_a].push_back(e);
    incident[g.edges[e].node_b].push_back(e);
  }

  std::vector<std::vector<int>> adjacency(eg.node_count);
  auto connect = [&adjacency](int a, int b) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  };
  for (const std::vector<int>& list : incident) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        if (!directed) {
          connect(list[i], list[j]);
        } else {
          for (int oi = 0; oi < 2; ++oi) {
            for (int oj = 0; oj < 2; ++oj) {
              connect(list[i] * 2 + oi, list[j] * 2 + oj);
            }
          }
        }
      }
    }
  }
  if (directed) {
    // The two orientations of one record trivially share both species and
    // the condition.
    for (int e = 0; e < record_count; ++e) connect(e * 2, e * 2 + 1);
  }

  eg.csr_offsets.resize(eg.node_count + 1);
  eg.csr_offsets[0] = 0;
  for (int i = 0; i < eg.node_count; ++i) {
    std::sort(adjacency[i].begin(), adjacency[i].end());
    eg.csr_offsets[i + 1] = eg.csr_offsets[i] + static_cast<std::int64_t>(adjacency[i].size());
  }
  eg.csr_neighbors.reserve(static_cast<std::size_t>(eg.csr_offsets[eg.node_count]));
  for (int i = 0; i < eg.node_count; ++i) {
    eg.csr_neighbors.insert(eg.csr_neighbors.end(), adjacency[i].begin(), adjacency[i].end());
  }
  return eg;
}

}  // namespace microsage
