#include "microsage/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "microsage/common.hpp"
#include "microsage/knn.hpp"
#include "microsage/metrics.hpp"
#include "microsage/rng.hpp"

namespace fs = std::filesystem;

namespace microsage {

namespace {

// Stream offsets that derive per-component seeds from the run seed. Kept
// well away from the small offsets the world generator uses internally.
constexpr std::uint64_t kSplitStream = 101;
constexpr std::uint64_t kTrainStream = 102;

const char* task_name(Task task) { return task == Task::OneWay ? "one-way" : "two-way"; }

const char* mode_name(GraphMode mode) {
  return mode == GraphMode::Directed ? "directed" : "undirected";
}

const char* orientation_name(RecordOrientation o) {
  return o == RecordOrientation::XY ? "xy" : "yx";
}

std::vector<std::string> class_names_for(Task task) {
  if (task == Task::OneWay) return {"negative", "positive"};
  return {"mutualism", "competition", "parasitism"};
}

std::optional<int> positive_class_for(Task task) {
  if (task == Task::OneWay) return class_index(SignLabel::Positive);
  return std::nullopt;
}

void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                const char* where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(Errc::ConfigParse, std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

double num_or(const nlohmann::json& obj, const char* key, double def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number()) fail(Errc::ConfigParse, std::string(key) + " must be a number");
  return obj[key].get<double>();
}

int int_or(const nlohmann::json& obj, const char* key, int def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number_integer()) {
    fail(Errc::ConfigParse, std::string(key) + " must be an integer");
  }
  return obj[key].get<int>();
}

std::uint64_t u64_or(const nlohmann::json& obj, const char* key, std::uint64_t def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number_integer()) {
    fail(Errc::ConfigParse, std::string(key) + " must be an integer");
  }
  return obj[key].get<std::uint64_t>();
}

bool bool_or(const nlohmann::json& obj, const char* key, bool def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_boolean()) fail(Errc::ConfigParse, std::string(key) + " must be a boolean");
  return obj[key].get<bool>();
}

std::string str_or(const nlohmann::json& obj, const char* key, std::string def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_string()) fail(Errc::ConfigParse, std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

nlohmann::json json_matrix(const Matrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["data"] = m.data;
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    fail(Errc::ConfigParse, std::string(what) + ": expected {rows, cols, data}");
  }
  Matrix m(j["rows"].get<int>(), j["cols"].get<int>());
  const auto& data = j["data"];
  if (!data.is_array() || data.size() != m.data.size()) {
    fail(Errc::ConfigParse, std::string(what) + ": data length does not match shape");
  }
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = data[i].get<double>();
  return m;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_preamble(std::ostream& out, const RunConfig& cfg) {
  out << "# run_id=" << run_id_for(cfg) << '\n';
  out << "# seed=" << cfg.seed << '\n';
  out << "# config=" << config_echo(cfg).dump() << '\n';
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  return out;
}

void finish_out(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) fail(Errc::IoFailure, "write failed for " + path.string());
}

Matrix collect_rows(const Matrix& m, const std::vector<std::uint8_t>& mask) {
  int count = 0;
  for (std::uint8_t v : mask) count += v ? 1 : 0;
  Matrix out(count, m.cols);
  int k = 0;
  for (int i = 0; i < m.rows; ++i) {
    if (!mask[i]) continue;
    const double* src = m.row(i);
    std::copy(src, src + m.cols, out.row(k));
    ++k;
  }
  return out;
}

std::vector<int> collect_ints(const std::vector<int>& values,
                              const std::vector<std::uint8_t>& mask) {
  std::vector<int> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) out.push_back(values[i]);
  }
  return out;
}

ModelReport score_model(const std::string& name, const RunConfig& cfg,
                        const std::vector<int>& test_preds, const std::vector<int>& test_truths,
                        int n_classes) {
  ModelReport report;
  report.name = name;
  report.task = task_name(cfg.task);
  report.confusion = confusion_matrix(test_preds, test_truths, n_classes);
  report.metrics = metrics_from_confusion(report.confusion, positive_class_for(cfg.task));
  report.class_names = class_names_for(cfg.task);
  return report;
}

}  // namespace

Stage parse_stage(const std::string& name) {
  if (name == "synth") return Stage::Synth;
  if (name == "featurize") return Stage::Featurize;
  if (name == "build-graph") return Stage::BuildGraph;
  if (name == "train") return Stage::Train;
  if (name == "evaluate") return Stage::Evaluate;
  if (name == "compare") return Stage::Compare;
  if (name == "all") return Stage::All;
  fail(Errc::ConfigParse, "unknown stage '" + name + "'");
}

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::Synth: return "synth";
    case Stage::Featurize: return "featurize";
    case Stage::BuildGraph: return "build-graph";
    case Stage::Train: return "train";
    case Stage::Evaluate: return "evaluate";
    case Stage::Compare: return "compare";
    case Stage::All: return "all";
  }
  return "?";
}

ResolvedSeeds resolve_seeds(const RunConfig& config) {
  ResolvedSeeds seeds;
  seeds.world = config.world_seed_set ? config.world.seed : config.seed;
  seeds.split = mix_seed(config.seed, kSplitStream);
  seeds.train = config.train_seed_set ? config.train.seed : mix_seed(config.seed, kTrainStream);
  return seeds;
}

RunConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(Errc::ConfigParse, "config root must be a JSON object");
  check_keys(doc,
             {"task", "source", "world", "records_csv", "phylo_csv", "epsilon", "standardize",
              "train", "knn_k", "gbdt", "out_dir", "seed"},
             "config");
  RunConfig cfg;

  const std::string task = str_or(doc, "task", "one-way");
  if (task == "one-way") {
    cfg.task = Task::OneWay;
  } else if (task == "two-way") {
    cfg.task = Task::TwoWay;
  } else {
    fail(Errc::ConfigParse, "task must be 'one-way' or 'two-way', got '" + task + "'");
  }

  const std::string source = str_or(doc, "source", "synth");
  if (source == "synth") {
    cfg.source = DataSource::Synth;
  } else if (source == "csv") {
    cfg.source = DataSource::Csv;
  } else {
    fail(Errc::ConfigParse, "source must be 'synth' or 'csv', got '" + source + "'");
  }

  if (doc.contains("world")) {
    if (cfg.source != DataSource::Synth) {
      fail(Errc::ConfigParse, "world section is only valid with source=synth");
    }
    const nlohmann::json& w = doc["world"];
    if (!w.is_object()) fail(Errc::ConfigParse, "world must be an object");
    check_keys(w,
               {"species_count", "condition_count", "uptake_sparsity", "competition_strength",
                "crossfeed_strength", "crossfeed_density", "noise_sigma", "seed"},
               "world");
    cfg.world.species_count = int_or(w, "species_count", cfg.world.species_count);
    cfg.world.condition_count = int_or(w, "condition_count", cfg.world.condition_count);
    cfg.world.uptake_sparsity = num_or(w, "uptake_sparsity", cfg.world.uptake_sparsity);
    cfg.world.competition_strength =
        num_or(w, "competition_strength", cfg.world.competition_strength);
    cfg.world.crossfeed_strength = num_or(w, "crossfeed_strength", cfg.world.crossfeed_strength);
    cfg.world.crossfeed_density = num_or(w, "crossfeed_density", cfg.world.crossfeed_density);
    cfg.world.noise_sigma = num_or(w, "noise_sigma", cfg.world.noise_sigma);
    if (w.contains("seed")) {
      cfg.world.seed = u64_or(w, "seed", cfg.world.seed);
      cfg.world_seed_set = true;
    }
  }

  cfg.records_csv = str_or(doc, "records_csv", "");
  cfg.phylo_csv = str_or(doc, "phylo_csv", "");
  if (cfg.source == DataSource::Csv) {
    if (cfg.records_csv.empty() || cfg.phylo_csv.empty()) {
      fail(Errc::ConfigParse, "source=csv requires records_csv and phylo_csv paths");
    }
  } else if (!cfg.records_csv.empty() || !cfg.phylo_csv.empty()) {
    fail(Errc::ConfigParse, "csv paths are only valid with source=csv (exactly one data source)");
  }

  cfg.epsilon = num_or(doc, "epsilon", cfg.epsilon);
  cfg.standardize = bool_or(doc, "standardize", cfg.standardize);

  if (doc.contains("train")) {
    const nlohmann::json& t = doc["train"];
    if (!t.is_object()) fail(Errc::ConfigParse, "train must be an object");
    check_keys(t, {"epochs", "lr", "hidden_dim", "train_fraction", "seed"}, "train");
    cfg.train.epochs = int_or(t, "epochs", cfg.train.epochs);
    cfg.train.lr = num_or(t, "lr", cfg.train.lr);
    cfg.train.hidden_dim = int_or(t, "hidden_dim", cfg.train.hidden_dim);
    cfg.train.train_fraction = num_or(t, "train_fraction", cfg.train.train_fraction);
    if (t.contains("seed")) {
      cfg.train.seed = u64_or(t, "seed", cfg.train.seed);
      cfg.train_seed_set = true;
    }
  }

  cfg.knn_k = int_or(doc, "knn_k", cfg.knn_k);

  if (doc.contains("gbdt")) {
    const nlohmann::json& g = doc["gbdt"];
    if (!g.is_object()) fail(Errc::ConfigParse, "gbdt must be an object");
    check_keys(g, {"rounds", "max_depth", "eta", "lambda", "min_child_weight"}, "gbdt");
    cfg.gbdt.rounds = int_or(g, "rounds", cfg.gbdt.rounds);
    cfg.gbdt.max_depth = int_or(g, "max_depth", cfg.gbdt.max_depth);
    cfg.gbdt.eta = num_or(g, "eta", cfg.gbdt.eta);
    cfg.gbdt.lambda = num_or(g, "lambda", cfg.gbdt.lambda);
    cfg.gbdt.min_child_weight = num_or(g, "min_child_weight", cfg.gbdt.min_child_weight);
  }

  cfg.out_dir = str_or(doc, "out_dir", cfg.out_dir);
  cfg.seed = u64_or(doc, "seed", cfg.seed);
  return cfg;
}

nlohmann::json config_echo(const RunConfig& config) {
  const ResolvedSeeds seeds = resolve_seeds(config);
  nlohmann::json j;
  j["task"] = task_name(config.task);
  j["source"] = config.source == DataSource::Synth ? "synth" : "csv";
  if (config.source == DataSource::Synth) {
    nlohmann::json w;
    w["species_count"] = config.world.species_count;
    w["condition_count"] = config.world.condition_count;
    w["uptake_sparsity"] = config.world.uptake_sparsity;
    w["competition_strength"] = config.world.competition_strength;
    w["crossfeed_strength"] = config.world.crossfeed_strength;
    w["crossfeed_density"] = config.world.crossfeed_density;
    w["noise_sigma"] = config.world.noise_sigma;
    w["seed"] = seeds.world;
    j["world"] = std::move(w);
  } else {
    j["records_csv"] = config.records_csv;
    j["phylo_csv"] = config.phylo_csv;
  }
  j["epsilon"] = config.epsilon;
  j["standardize"] = config.standardize;
  nlohmann::json t;
  t["epochs"] = config.train.epochs;
  t["lr"] = config.train.lr;
  t["hidden_dim"] = config.train.hidden_dim;
  t["train_fraction"] = config.train.train_fraction;
  t["seed"] = seeds.train;
  j["train"] = std::move(t);
  j["split_seed"] = seeds.split;
  j["knn_k"] = config.knn_k;
  nlohmann::json g;
  g["rounds"] = config.gbdt.rounds;
  g["max_depth"] = config.gbdt.max_depth;
  g["eta"] = config.gbdt.eta;
  g["lambda"] = config.gbdt.lambda;
  g["min_child_weight"] = config.gbdt.min_child_weight;
  j["gbdt"] = std::move(g);
  j["seed"] = config.seed;
  return j;
}

std::string run_id_for(const RunConfig& config) {
  const std::string payload = config_echo(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : payload) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Dataset load_dataset(const RunConfig& config) {
  fs::path records_path;
  fs::path phylo_path;
  double epsilon = 0.0;
  if (config.source == DataSource::Synth) {
    records_path = fs::path(config.out_dir) / "dataset.csv";
    phylo_path = fs::path(config.out_dir) / "phylo.csv";
    if (!fs::exists(records_path) || !fs::exists(phylo_path)) {
      fail(Errc::MissingInput,
           "no synthetic dataset in " + config.out_dir + "; run the synth stage first");
    }
  } else {
    records_path = config.records_csv;
    phylo_path = config.phylo_csv;
    if (!fs::exists(records_path)) {
      fail(Errc::MissingInput, "records csv not found: " + records_path.string());
    }
    if (!fs::exists(phylo_path)) {
      fail(Errc::MissingInput, "phylo csv not found: " + phylo_path.string());
    }
    epsilon = config.epsilon;
  }
  std::ifstream records(records_path, std::ios::binary);
  std::ifstream phylo(phylo_path, std::ios::binary);
  if (!records) fail(Errc::IoFailure, "cannot read " + records_path.string());
  if (!phylo) fail(Errc::IoFailure, "cannot read " + phylo_path.string());
  return ingest_csv(records, phylo, epsilon);
}

PreparedGraph prepare_graph(const RunConfig& config) {
  PreparedGraph pg;
  pg.dataset = load_dataset(config);
  pg.context = build_feature_context(pg.dataset);
  const InteractionGraph g = build_interaction_graph(pg.dataset);
  pg.graph = to_edge_graph(g, mode_for_task(config.task), pg.context, config.task, pg.dataset);

  const ResolvedSeeds seeds = resolve_seeds(config);
  SplitMasks masks =
      split_train_test(pg.graph.node_count, config.train.train_fraction, seeds.split);
  pg.graph.train_mask = std::move(masks.train);
  pg.graph.test_mask = std::move(masks.test);

  if (config.standardize) {
    const Standardizer st = fit_standardizer(pg.graph.features, pg.graph.train_mask);
    apply_standardizer(st, pg.graph.features);
    pg.standardizer = st;
  }
  return pg;
}

void save_model_json(const GraphSageModel& model, const RunConfig& config,
                     const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["run_id"] = run_id_for(config);
  doc["seed"] = config.seed;
  doc["config_echo"] = config_echo(config);
  doc["input_dim"] = model.input_dim();
  doc["hidden_dim"] = model.hidden_dim();
  doc["n_classes"] = model.n_classes();
  doc["layer1_w1"] = json_matrix(model.layer1.w1);
  doc["layer1_w2"] = json_matrix(model.layer1.w2);
  doc["layer2_w1"] = json_matrix(model.layer2.w1);
  doc["layer2_w2"] = json_matrix(model.layer2.w2);
  std::ofstream out = open_out(path);
  out << doc.dump() << '\n';
  finish_out(out, path);
}

GraphSageModel load_model_json(const std::filesystem::path& path) {
  if (!fs::exists(path)) {
    fail(Errc::MissingInput, "model checkpoint not found: " + path.string() +
                                 "; run the train stage first");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoFailure, "cannot read " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ConfigParse, "model checkpoint is not valid JSON: " + std::string(e.what()));
  }
  GraphSageModel model;
  model.layer1.w1 = matrix_from_json(doc.at("layer1_w1"), "layer1_w1");
  model.layer1.w2 = matrix_from_json(doc.at("layer1_w2"), "layer1_w2");
  model.layer2.w1 = matrix_from_json(doc.at("layer2_w1"), "layer2_w1");
  model.layer2.w2 = matrix_from_json(doc.at("layer2_w2"), "layer2_w2");
  if (!model.layer1.w1.same_shape(model.layer1.w2) ||
      !model.layer2.w1.same_shape(model.layer2.w2) ||
      model.layer2.w1.cols != model.layer1.w1.rows) {
    fail(Errc::ShapeMismatch, "model checkpoint weight shapes are inconsistent");
  }
  return model;
}

namespace {

void stage_synth(const RunConfig& cfg) {
  if (cfg.source != DataSource::Synth) {
    fail(Errc::InvalidConfig, "synth stage requires a synthetic data source");
  }
  WorldConfig wc = cfg.world;
  wc.seed = resolve_seeds(cfg).world;
  const World world = generate_world(wc);
  const Dataset ds = simulate_dataset(world, wc);

  const fs::path out_dir(cfg.out_dir);
  {
    const fs::path path = out_dir / "dataset.csv";
    std::ofstream out = open_out(path);
    write_preamble(out, cfg);
    export_records_csv(ds, out);
    finish_out(out, path);
  }
  {
    const fs::path path = out_dir / "phylo.csv";
    std::ofstream out = open_out(path);
    write_preamble(out, cfg);
    export_phylo_csv(ds, out);
    finish_out(out, path);
  }
  {
    nlohmann::json doc;
    doc["run_id"] = run_id_for(cfg);
    doc["seed"] = cfg.seed;
    doc["config_echo"] = config_echo(cfg);
    doc["uptake"] = json_matrix(world.uptake);
    doc["crossfeed"] = json_matrix(world.crossfeed);
    doc["phylo_distance"] = json_matrix(world.phylo_distance);
    const auto counts = two_way_distribution(ds);
    doc["two_way_counts"] = {{"mutualism", counts[0]},
                             {"competition", counts[1]},
                             {"parasitism", counts[2]}};
    const fs::path path = out_dir / "world.json";
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    finish_out(out, path);
  }
}

void stage_featurize(const RunConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const FeatureContext ctx = build_feature_context(ds);
  const fs::path path = fs::path(cfg.out_dir) / "features.csv";
  std::ofstream out = open_out(path);
  write_preamble(out, cfg);
  out << "record,orientation,focal,partner,condition";
  for (const std::string& name : feature_names()) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const CocultureRecord& rec = ds.records[r];
    for (RecordOrientation o : {RecordOrientation::XY, RecordOrientation::YX}) {
      const SpeciesId focal = o == RecordOrientation::XY ? rec.species_x : rec.species_y;
      const SpeciesId partner = o == RecordOrientation::XY ? rec.species_y : rec.species_x;
      const FeatureVector fv = assemble_features(rec, o, ctx);
      out << r << ',' << orientation_name(o) << ',' << ds.species_names[focal] << ','
          << ds.species_names[partner] << ',' << ds.condition_names[rec.condition];
      for (double v : fv) out << ',' << fmt17(v);
      out << '\n';
    }
  }
  finish_out(out, path);
}

void stage_build_graph(const RunConfig& cfg) {
  const PreparedGraph pg = prepare_graph(cfg);
  const EdgeGraph& eg = pg.graph;
  nlohmann::json doc;
  doc["run_id"] = run_id_for(cfg);
  doc["seed"] = cfg.seed;
  doc["config_echo"] = config_echo(cfg);
  doc["task"] = task_name(eg.task);
  doc["mode"] = mode_name(eg.mode);
  doc["n_classes"] = eg.n_classes;
  doc["node_count"] = eg.node_count;
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < eg.node_count; ++i) {
    nlohmann::json node;
    node["record"] = eg.record_index[i];
    node["orientation"] = orientation_name(eg.node_orientation[i]);
    node["label"] = eg.labels[i];
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  doc["csr_offsets"] = eg.csr_offsets;
  doc["csr_neighbors"] = eg.csr_neighbors;
  doc["train_mask"] = std::vector<int>(eg.train_mask.begin(), eg.train_mask.end());
  doc["test_mask"] = std::vector<int>(eg.test_mask.begin(), eg.test_mask.end());
  if (pg.standardizer) {
    nlohmann::json st;
    st["mean"] = std::vector<double>(pg.standardizer->mean.begin(), pg.standardizer->mean.end());
    st["std"] = std::vector<double>(pg.standardizer->std.begin(), pg.standardizer->std.end());
    doc["standardizer"] = std::move(st);
  } else {
    doc["standardizer"] = nullptr;
  }
  const fs::path path = fs::path(cfg.out_dir) / "graph.json";
  std::ofstream out = open_out(path);
  out << doc.dump() << '\n';
  finish_out(out, path);
}

void stage_train(const RunConfig& cfg) {
  const PreparedGraph pg = prepare_graph(cfg);
  TrainConfig tc = cfg.train;
  tc.seed = resolve_seeds(cfg).train;
  const TrainResult result = train(pg.graph, tc);

  save_model_json(result.model, cfg, fs::path(cfg.out_dir) / "model.json");

  const fs::path path = fs::path(cfg.out_dir) / "history.csv";
  std::ofstream out = open_out(path);
  write_preamble(out, cfg);
  out << "epoch,train_loss,train_accuracy,test_accuracy\n";
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    const EpochStats& s = result.history[i];
    out << (i + 1) << ',' << fmt17(s.train_loss) << ',' << fmt17(s.train_accuracy) << ','
        << fmt17(s.test_accuracy) << '\n';
  }
  finish_out(out, path);
}

void stage_evaluate(const RunConfig& cfg) {
  const PreparedGraph pg = prepare_graph(cfg);
  const GraphSageModel model = load_model_json(fs::path(cfg.out_dir) / "model.json");
  if (model.input_dim() != pg.graph.features.cols || model.n_classes() != pg.graph.n_classes) {
    fail(Errc::ShapeMismatch, "model checkpoint does not match the configured graph");
  }
  const std::vector<int> preds = predict(model_forward(model, pg.graph));
  const std::vector<int> test_preds = collect_ints(preds, pg.graph.test_mask);
  const std::vector<int> test_truths = collect_ints(pg.graph.labels, pg.graph.test_mask);
  const ModelReport report =
      score_model("graphsage", cfg, test_preds, test_truths, pg.graph.n_classes);
  emit_report({report}, run_id_for(cfg), cfg.seed, config_echo(cfg),
              fs::path(cfg.out_dir) / "report.json", fs::path(cfg.out_dir) / "report.csv");
}

void stage_compare(const RunConfig& cfg) {
  const PreparedGraph pg = prepare_graph(cfg);
  const EdgeGraph& eg = pg.graph;
  TrainConfig tc = cfg.train;
  tc.seed = resolve_seeds(cfg).train;

  const TrainResult result = train(eg, tc);
  const std::vector<int> sage_preds = predict(model_forward(result.model, eg));

  const Matrix train_rows = collect_rows(eg.features, eg.train_mask);
  const std::vector<int> train_labels = collect_ints(eg.labels, eg.train_mask);
  const Matrix test_rows = collect_rows(eg.features, eg.test_mask);
  const std::vector<int> test_truths = collect_ints(eg.labels, eg.test_mask);

  const KnnModel knn = knn_fit(train_rows, train_labels, cfg.knn_k, eg.n_classes);
  const GbdtModel gbdt = gbdt_fit(train_rows, train_labels, eg.n_classes, cfg.gbdt);

  std::vector<ModelReport> reports;
  reports.push_back(score_model("graphsage", cfg, collect_ints(sage_preds, eg.test_mask),
                                test_truths, eg.n_classes));
  reports.push_back(score_model("knn", cfg, knn_predict(knn, test_rows), test_truths,
                                eg.n_classes));
  reports.push_back(score_model("gbdt", cfg, gbdt_predict(gbdt, test_rows), test_truths,
                                eg.n_classes));
  emit_report(reports, run_id_for(cfg), cfg.seed, config_echo(cfg),
              fs::path(cfg.out_dir) / "compare_report.json",
              fs::path(cfg.out_dir) / "compare_report.csv");
}

}  // namespace

void run_pipeline(const RunConfig& config, Stage stage) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) fail(Errc::IoFailure, "cannot create output directory " + config.out_dir);

  switch (stage) {
    case Stage::Synth: stage_synth(config); return;
    case Stage::Featurize: stage_featurize(config); return;
    case Stage::BuildGraph: stage_build_graph(config); return;
    case Stage::Train: stage_train(config); return;
    case Stage::Evaluate: stage_evaluate(config); return;
    case Stage::Compare: stage_compare(config); return;
    case Stage::All:
      if (config.source == DataSource::Synth) stage_synth(config);
      stage_featurize(config);
      stage_build_graph(config);
      stage_train(config);
      stage_evaluate(config);
      stage_compare(config);
      return;
  }
  fail(Errc::InvalidConfig, "unhandled stage");
}

}  // namespace microsage
