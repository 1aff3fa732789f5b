#pragma once

#include <array>
#include <cstdint>

#include "microsage/dataset.hpp"
#include "microsage/matrix.hpp"

namespace microsage {

// Seeded generative model for desk-scale validation. Defaults are
// calibrated so the two-way label distribution has competition as the modal
// class at roughly 57% of pairs, matching the skew of the real screen.
struct WorldConfig {
  int species_count = 20;
  int condition_count = 40;
  double uptake_sparsity = 0.90;     // expected fraction of nonzero uptake cells
  double competition_strength = 1.0; // alpha
  double crossfeed_strength = 1.0;   // beta
  double crossfeed_density = 0.40;   // fraction of ordered pairs that cross-feed
  double noise_sigma = 0.03;
  std::uint64_t seed = 42;
};

struct World {
  Matrix uptake;          // S×C resource-use efficiency per carbon condition
  Matrix crossfeed;       // S×S directed byproduct benefit, zero diagonal
  Matrix phylo_distance;  // S×S tree metric over two species clusters
};

/// Deterministic for a given config. Species split into two clusters with a
/// long joining branch, so every within-cluster phylogenetic distance is
/// strictly smaller than every between-cluster one.
World generate_world(const WorldConfig& config);

/// Emits all C(S,2)·C records. Monoculture yield of (s,c) is drawn once and
/// shared by every record that mentions it; the co-culture effect of y on x
/// under c is
///   delta = -alpha * min(uptake[x,c], uptake[y,c])
///           + beta * crossfeed[x,y] * uptake[y,c] + noise,
/// with yields truncated at zero and sign labels derived at epsilon = 0.
Dataset simulate_dataset(const World& world, const WorldConfig& config);

/// Count of each TwoWayLabel over a dataset, indexed by class_index.
std::array<std::int64_t, 3> two_way_distribution(const Dataset& ds);

}  // namespace microsage
