#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "microsage/dataset.hpp"
#include "microsage/matrix.hpp"
#include "microsage/pca.hpp"

namespace microsage {

// Fixed 13-slot feature layout shared by every classifier:
//   monoGrow_x, monoGrow_y, monoGrow24_x, monoGrow24_y, metDis,
//   carbon_component_0..3, phy_strain_component_{0,1}_x,
//   phy_strain_component_{0,1}_y
inline constexpr int kFeatureDim = 13;
inline constexpr int kPhyloComponentCap = 2;
inline constexpr int kCarbonComponentCap = 4;

using FeatureVector = std::array<double, kFeatureDim>;

const std::array<std::string, kFeatureDim>& feature_names();

/// Which species of the record fills the focal "_x" slots.
enum class RecordOrientation { XY, YX };

double metabolic_dissimilarity(std::span<const double> profile_x,
                               std::span<const double> profile_y);

/// Everything needed to assemble features for any record of one dataset:
/// fitted PCA models plus precomputed per-species / per-condition
/// projections (capped at 2 phylo and 4 carbon slots, zero-padded when the
/// variance threshold is reached earlier).
struct FeatureContext {
  int species_count = 0;
  int condition_count = 0;
  PcaModel phylo_pca;              // fit on S×S distance rows at 95%
  PcaModel carbon_pca;             // fit on C×S condition yield rows at 90%
  Matrix phylo_components;         // S×2
  Matrix carbon_components;        // C×4
  Matrix mono_profile;             // S×C, for metDis recomputation
  Matrix metabolic_distance;       // S×S pairwise profile distances
};

FeatureContext build_feature_context(const Dataset& ds);

FeatureVector assemble_features(const CocultureRecord& record, RecordOrientation orientation,
                                const FeatureContext& ctx);

/// Feature matrix + masks -> per-column train moments. std is the population
/// standard deviation, floored at 1e-12.
struct Standardizer {
  std::array<double, kFeatureDim> mean{};
  std::array<double, kFeatureDim> std{};
};

Standardizer fit_standardizer(const Matrix& rows, const std::vector<std::uint8_t>& train_mask);
void apply_standardizer(const Standardizer& std, std::span<double> row);
void apply_standardizer(const Standardizer& std, Matrix& rows);

}  // namespace microsage
