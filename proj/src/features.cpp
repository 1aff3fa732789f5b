#include "microsage/features.hpp"

#include <algorithm>
#include <cmath>

#include "microsage/common.hpp"

namespace microsage {

const std::array<std::string, kFeatureDim>& feature_names() {
  static const std::array<std::string, kFeatureDim> names = {
      "monoGrow_x",
      "monoGrow_y",
      "monoGrow24_x",
      "monoGrow24_y",
      "metDis",
      "carbon_component_0",
      "carbon_component_1",
      "carbon_component_2",
      "carbon_component_3",
      "phy_strain_component_0_x",
      "phy_strain_component_1_x",
      "phy_strain_component_0_y",
      "phy_strain_component_1_y",
  };
  return names;
}

double metabolic_dissimilarity(std::span<const double> profile_x,
                               std::span<const double> profile_y) {
  if (profile_x.size() != profile_y.size()) {
    fail(Errc::DimensionMismatch, "metabolic profiles differ in length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < profile_x.size(); ++i) {
    const double diff = profile_x[i] - profile_y[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

namespace {

// Truncates a fitted model to at most cap components; projections through a
// truncated model are padded back to cap with zeros.
void cap_components(PcaModel& model, int cap) {
  if (model.component_count() <= cap) return;
  Matrix kept(cap, model.input_dim());
  for (int i = 0; i < cap; ++i) {
    std::copy_n(model.components.row(i), model.input_dim(), kept.row(i));
  }
  model.components = std::move(kept);
  model.explained_variance_ratio.resize(cap);
}

Matrix padded_projections(const PcaModel& model, const Matrix& data, int cap) {
  Matrix out(data.rows, cap);
  for (int i = 0; i < data.rows; ++i) {
    std::vector<double> proj = pca_project(model, data.row_span(i));
    for (int j = 0; j < cap && j < static_cast<int>(proj.size()); ++j) {
      out.at(i, j) = proj[j];
    }
  }
  return out;
}

}  // namespace

FeatureContext build_feature_context(const Dataset& ds) {
  FeatureContext ctx;
  ctx.species_count = ds.species_count;
  ctx.condition_count = ds.condition_count;
  ctx.mono_profile = ds.mono_profile;

  ctx.phylo_pca = pca_fit(ds.phylo_distance, 0.95);
  cap_components(ctx.phylo_pca, kPhyloComponentCap);
  ctx.phylo_components = padded_projections(ctx.phylo_pca, ds.phylo_distance, kPhyloComponentCap);

  // Each carbon condition is described by how all species grow in it.
  Matrix condition_rows(ds.condition_count, ds.species_count);
  for (int s = 0; s < ds.species_count; ++s) {
    for (int c = 0; c < ds.condition_count; ++c) {
      condition_rows.at(c, s) = ds.mono_profile.at(s, c);
    }
  }
  ctx.carbon_pca = pca_fit(condition_rows, 0.90);
  cap_components(ctx.carbon_pca, kCarbonComponentCap);
  ctx.carbon_components = padded_projections(ctx.carbon_pca, condition_rows, kCarbonComponentCap);

  ctx.metabolic_distance = Matrix(ds.species_count, ds.species_count);
  for (int i = 0; i < ds.species_count; ++i) {
    for (int j = i + 1; j < ds.species_count; ++j) {
      const double d = metabolic_dissimilarity(ds.mono_profile.row_span(i),
                                               ds.mono_profile.row_span(j));
      ctx.metabolic_distance.at(i, j) = ctx.metabolic_distance.at(j, i) = d;
    }
  }
  return ctx;
}

FeatureVector assemble_features(const CocultureRecord& record, RecordOrientation orientation,
                                const FeatureContext& ctx) {
  if (record.species_x < 0 || record.species_x >= ctx.species_count || record.species_y < 0 ||
      record.species_y >= ctx.species_count) {
    fail(Errc::UnknownSpecies, "record references a species outside the feature context");
  }
  if (record.condition < 0 || record.condition >= ctx.condition_count) {
    fail(Errc::UnknownCondition, "record references a condition outside the feature context");
  }

  const bool swap = orientation == RecordOrientation::YX;
  const SpeciesId focal = swap ? record.species_y : record.species_x;
  const SpeciesId partner = swap ? record.species_x : record.species_y;

  FeatureVector out{};
  out[0] = swap ? record.mono_grow_y : record.mono_grow_x;
  out[1] = swap ? record.mono_grow_x : record.mono_grow_y;
  out[2] = swap ? record.mono_grow24_y : record.mono_grow24_x;
  out[3] = swap ? record.mono_grow24_x : record.mono_grow24_y;
  out[4] = ctx.metabolic_distance.at(record.species_x, record.species_y);
  for (int j = 0; j < kCarbonComponentCap; ++j) {
    out[5 + j] = ctx.carbon_components.at(record.condition, j);
  }
  out[9] = ctx.phylo_components.at(focal, 0);
  out[10] = ctx.phylo_components.at(focal, 1);
  out[11] = ctx.phylo_components.at(partner, 0);
  out[12] = ctx.phylo_components.at(partner, 1);
  return out;
}

Standardizer fit_standardizer(const Matrix& rows, const std::vector<std::uint8_t>& train_mask) {
  if (rows.cols != kFeatureDim) fail(Errc::ShapeMismatch, "feature rows must have 13 columns");
  if (train_mask.size() != static_cast<std::size_t>(rows.rows)) {
    fail(Errc::ShapeMismatch, "train mask length must match row count");
  }
  int count = 0;
  Standardizer std_out;
  for (int i = 0; i < rows.rows; ++i) {
    if (!train_mask[i]) continue;
    ++count;
    const double* row = rows.row(i);
    for (int j = 0; j < kFeatureDim; ++j) std_out.mean[j] += row[j];
  }
  if (count < 2) fail(Errc::TooFewRows, "standardizer needs at least 2 training rows");
  for (double& m : std_out.mean) m /= count;

  for (int i = 0; i < rows.rows; ++i) {
    if (!train_mask[i]) continue;
    const double* row = rows.row(i);
    for (int j = 0; j < kFeatureDim; ++j) {
      const double diff = row[j] - std_out.mean[j];
      std_out.std[j] += diff * diff;
    }
  }
  for (double& v : std_out.std) v = std::max(std::sqrt(v / count), 1e-12);
  return std_out;
}

void apply_standardizer(const Standardizer& std, std::span<double> row) {
  for (int j = 0; j < kFeatureDim; ++j) row[j] = (row[j] - std.mean[j]) / std.std[j];
}

void apply_standardizer(const Standardizer& std, Matrix& rows) {
  if (rows.cols != kFeatureDim) fail(Errc::ShapeMismatch, "feature rows must have 13 columns");
  for (int i = 0; i < rows.rows; ++i) apply_standardizer(std, rows.row_span(i));
}

}  // namespace microsage
