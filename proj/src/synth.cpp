#include "microsage/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "microsage/common.hpp"
#include "microsage/rng.hpp"

namespace microsage {

namespace {

// Independent substreams of the world seed.
constexpr std::uint64_t kTreeStream = 1;
constexpr std::uint64_t kUptakeStream = 2;
constexpr std::uint64_t kMonoStream = 3;
constexpr std::uint64_t kCoStream = 4;

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t cell) {
  return mix_seed(mix_seed(seed, stream), cell);
}

void validate(const WorldConfig& c) {
  if (c.species_count < 2) fail(Errc::InvalidConfig, "species_count must be >= 2");
  if (c.condition_count < 1) fail(Errc::InvalidConfig, "condition_count must be >= 1");
  if (!(c.uptake_sparsity > 0.0) || c.uptake_sparsity > 1.0) {
    fail(Errc::InvalidConfig, "uptake_sparsity must be in (0, 1]");
  }
  if (c.crossfeed_density < 0.0 || c.crossfeed_density > 1.0) {
    fail(Errc::InvalidConfig, "crossfeed_density must be in [0, 1]");
  }
  if (c.competition_strength < 0.0 || c.crossfeed_strength < 0.0 || c.noise_sigma < 0.0) {
    fail(Errc::InvalidConfig, "strengths and noise_sigma must be nonnegative");
  }
}

// Joins random subtrees until the cluster is a single binary tree, filling
// leaf-to-leaf path lengths into dist and leaf-to-cluster-root lengths into
// droot.
void build_cluster_tree(const std::vector<int>& leaves, SplitMix64& rng, Matrix& dist,
                        std::vector<double>& droot) {
  std::vector<std::vector<int>> subs;
  subs.reserve(leaves.size());
  for (int leaf : leaves) {
    droot[leaf] = 0.0;
    subs.push_back({leaf});
  }
  while (subs.size() > 1) {
    int a = static_cast<int>(rng.next_below(subs.size()));
    int b = static_cast<int>(rng.next_below(subs.size() - 1));
    if (b >= a) ++b;
    if (a > b) std::swap(a, b);
    const double len_a = rng.uniform(0.1, 0.5);
    const double len_b = rng.uniform(0.1, 0.5);
    for (int m : subs[a]) droot[m] += len_a;
    for (int m : subs[b]) droot[m] += len_b;
    for (int u : subs[a]) {
      for (int v : subs[b]) {
        dist.at(u, v) = dist.at(v, u) = droot[u] + droot[v];
      }
    }
    subs[a].insert(subs[a].end(), subs[b].begin(), subs[b].end());
    subs.erase(subs.begin() + b);
  }
}

std::string indexed_name(char prefix, int index, int count) {
  int width = 1;
  for (int v = count - 1; v >= 10; v /= 10) ++width;
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, index);
  return buf;
}

}  // namespace

World generate_world(const WorldConfig& config) {
  validate(config);
  const int s = config.species_count;
  const int c = config.condition_count;

  World world;
  world.phylo_distance = Matrix(s, s);

  // Two taxonomic clusters joined by a branch longer than either cluster's
  // diameter, so within-cluster distances stay strictly below between-cluster
  // ones.
  std::vector<int> cluster_a, cluster_b;
  for (int i = 0; i < s / 2; ++i) cluster_a.push_back(i);
  for (int i = s / 2; i < s; ++i) cluster_b.push_back(i);

  SplitMix64 tree_rng(mix_seed(config.seed, kTreeStream));
  std::vector<double> droot(s, 0.0);
  build_cluster_tree(cluster_a, tree_rng, world.phylo_distance, droot);
  build_cluster_tree(cluster_b, tree_rng, world.phylo_distance, droot);

  double max_within = 0.0;
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      max_within = std::max(max_within, world.phylo_distance.at(i, j));
    }
  }
  const double join_len = 0.75 * max_within + 0.5;
  for (int u : cluster_a) {
    for (int v : cluster_b) {
      const double d = droot[u] + droot[v] + 2.0 * join_len;
      world.phylo_distance.at(u, v) = world.phylo_distance.at(v, u) = d;
    }
  }

  SplitMix64 uptake_rng(mix_seed(config.seed, kUptakeStream));
  world.uptake = Matrix(s, c);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < c; ++j) {
      const bool present = uptake_rng.next_double() < config.uptake_sparsity;
      const double value = uptake_rng.uniform(0.2, 1.2);
      if (present) world.uptake.at(i, j) = value;
    }
  }

  // Cross-feeding links the most phylogenetically distant ordered pairs:
  // distant species have complementary metabolisms, so their byproducts are
  // the most usable. The benefit grows with normalized distance.
  world.crossfeed = Matrix(s, s);
  const auto pair_total = static_cast<std::int64_t>(s) * (s - 1);
  const auto selected =
      static_cast<std::int64_t>(std::llround(config.crossfeed_density * pair_total));
  if (selected > 0) {
    std::vector<std::tuple<double, int, int>> ranked;
    ranked.reserve(pair_total);
    double d_max = 0.0;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        if (i == j) continue;
        const double d = world.phylo_distance.at(i, j);
        d_max = std::max(d_max, d);
        ranked.emplace_back(d, i, j);
      }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& lhs, const auto& rhs) {
      if (std::get<0>(lhs) != std::get<0>(rhs)) return std::get<0>(lhs) > std::get<0>(rhs);
      if (std::get<1>(lhs) != std::get<1>(rhs)) return std::get<1>(lhs) < std::get<1>(rhs);
      return std::get<2>(lhs) < std::get<2>(rhs);
    });
    for (std::int64_t k = 0; k < selected && k < pair_total; ++k) {
      const auto& [d, i, j] = ranked[static_cast<std::size_t>(k)];
      world.crossfeed.at(i, j) = 0.2 + 0.8 * d / d_max;
    }
  }
  return world;
}

Dataset simulate_dataset(const World& world, const WorldConfig& config) {
  validate(config);
  const int s = config.species_count;
  const int c = config.condition_count;
  if (world.uptake.rows != s || world.uptake.cols != c || world.phylo_distance.rows != s) {
    fail(Errc::ShapeMismatch, "world shape does not match config");
  }
  const double alpha = config.competition_strength;
  const double beta = config.crossfeed_strength;
  const double sigma = config.noise_sigma;

  // Monoculture yields are drawn once per (species, condition) cell and
  // shared by every record mentioning the cell.
  Matrix mono(s, c);
  Matrix mono24(s, c);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < c; ++j) {
      SplitMix64 rng(cell_seed(config.seed, kMonoStream,
                               static_cast<std::uint64_t>(i) * c + j));
      mono.at(i, j) = std::max(0.0, world.uptake.at(i, j) + rng.gaussian(sigma));
      mono24.at(i, j) = std::max(0.0, 0.75 * world.uptake.at(i, j) + rng.gaussian(sigma));
    }
  }

  Dataset ds;
  ds.species_count = s;
  ds.condition_count = c;
  ds.mono_profile = mono;
  ds.phylo_distance = world.phylo_distance;
  for (int i = 0; i < s; ++i) ds.species_names.push_back(indexed_name('S', i, s));
  for (int j = 0; j < c; ++j) ds.condition_names.push_back(indexed_name('C', j, c));

  ds.records.reserve(static_cast<std::size_t>(s) * (s - 1) / 2 * c);
  std::int64_t pair_index = 0;
  for (int x = 0; x < s; ++x) {
    for (int y = x + 1; y < s; ++y, ++pair_index) {
      for (int j = 0; j < c; ++j) {
        SplitMix64 rng(cell_seed(config.seed, kCoStream,
                                 static_cast<std::uint64_t>(pair_index) * c + j));
        const double ux = world.uptake.at(x, j);
        const double uy = world.uptake.at(y, j);
        const double overlap = std::min(ux, uy);
        const double delta_x = -alpha * overlap + beta * world.crossfeed.at(x, y) * uy +
                               rng.gaussian(sigma);
        const double delta_y = -alpha * overlap + beta * world.crossfeed.at(y, x) * ux +
                               rng.gaussian(sigma);

        CocultureRecord rec;
        rec.species_x = x;
        rec.species_y = y;
        rec.condition = j;
        rec.mono_grow_x = mono.at(x, j);
        rec.mono_grow_y = mono.at(y, j);
        rec.mono_grow24_x = mono24.at(x, j);
        rec.mono_grow24_y = mono24.at(y, j);
        rec.co_yield_x = std::max(0.0, rec.mono_grow_x + delta_x);
        rec.co_yield_y = std::max(0.0, rec.mono_grow_y + delta_y);
        rec.label_xy = label_one_way(rec.mono_grow_x, *rec.co_yield_x, 0.0);
        rec.label_yx = label_one_way(rec.mono_grow_y, *rec.co_yield_y, 0.0);
        ds.records.push_back(rec);
      }
    }
  }
  return ds;
}

std::array<std::int64_t, 3> two_way_distribution(const Dataset& ds) {
  std::array<std::int64_t, 3> counts{0, 0, 0};
  for (const CocultureRecord& rec : ds.records) {
    ++counts[class_index(derive_two_way(rec.label_xy, rec.label_yx))];
  }
  return counts;
}

}  // namespace microsage
