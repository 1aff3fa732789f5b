#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "microsage/dataset.hpp"
#include "microsage/features.hpp"
#include "microsage/gbdt.hpp"
#include "microsage/graph.hpp"
#include "microsage/sage.hpp"
#include "microsage/synth.hpp"

namespace microsage {

enum class Stage { Synth, Featurize, BuildGraph, Train, Evaluate, Compare, All };

Stage parse_stage(const std::string& name);
const char* stage_name(Stage stage);

enum class DataSource { Synth, Csv };

// Effective run configuration. The run seed drives every stochastic
// component: it becomes the world seed and, through fixed stream offsets,
// the split and init seeds, unless a section pins its own seed explicitly.
struct RunConfig {
  Task task = Task::OneWay;
  DataSource source = DataSource::Synth;
  WorldConfig world;
  std::string records_csv;
  std::string phylo_csv;
  double epsilon = 0.0;
  bool standardize = true;
  TrainConfig train;
  int knn_k = 5;
  GbdtConfig gbdt;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  bool world_seed_set = false;
  bool train_seed_set = false;
};

struct ResolvedSeeds {
  std::uint64_t world = 0;
  std::uint64_t split = 0;
  std::uint64_t train = 0;
};

ResolvedSeeds resolve_seeds(const RunConfig& config);

RunConfig config_from_json(const nlohmann::json& doc);

// Effective config with resolved seeds; excludes out_dir so relocating a run
// does not change its identity. Embedded in every artifact.
nlohmann::json config_echo(const RunConfig& config);

// FNV-1a hash of the config echo, as 16 hex digits.
std::string run_id_for(const RunConfig& config);

// Ingests from the configured CSV paths, or from the synth artifacts in
// out_dir when the source is synthetic.
Dataset load_dataset(const RunConfig& config);

struct PreparedGraph {
  Dataset dataset;
  FeatureContext context;
  EdgeGraph graph;
  std::optional<Standardizer> standardizer;
};

// Dataset -> features -> line graph -> split masks -> (optional)
// standardization, all derived deterministically from the config.
PreparedGraph prepare_graph(const RunConfig& config);

void save_model_json(const GraphSageModel& model, const RunConfig& config,
                     const std::filesystem::path& path);
GraphSageModel load_model_json(const std::filesystem::path& path);

// Executes one stage (or the whole chain) and writes its artifacts into
// config.out_dir. Throws Error on any failure.
void run_pipeline(const RunConfig& config, Stage stage);

}  // namespace microsage
