#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "microsage/common.hpp"
#include "microsage/pipeline.hpp"
#include "microsage/rng.hpp"

namespace fs = std::filesystem;
using microsage::RunConfig;
using microsage::Stage;
using nlohmann::json;

namespace {

microsage::Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const microsage::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return microsage::Errc::InvalidConfig;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Small world so end-to-end runs stay fast.
RunConfig small_config(const fs::path& out_dir) {
  RunConfig cfg = microsage::config_from_json(json::object());
  cfg.world.species_count = 8;
  cfg.world.condition_count = 6;
  cfg.world.noise_sigma = 0.02;
  cfg.train.epochs = 30;
  cfg.train.hidden_dim = 16;
  cfg.gbdt.rounds = 10;
  cfg.out_dir = out_dir.string();
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("stage names parse and round-trip") {
  const char* names[] = {"synth", "featurize", "build-graph", "train",
                         "evaluate", "compare", "all"};
  for (const char* name : names) {
    CHECK(microsage::stage_name(microsage::parse_stage(name)) == std::string(name));
  }
  CHECK(code_of([] { (void)microsage::parse_stage("bogus"); }) == microsage::Errc::ConfigParse);
}

TEST_CASE("an empty config produces the documented defaults") {
  RunConfig cfg = microsage::config_from_json(json::object());
  CHECK(cfg.task == microsage::Task::OneWay);
  CHECK(cfg.source == microsage::DataSource::Synth);
  CHECK(cfg.world.species_count == 20);
  CHECK(cfg.world.condition_count == 40);
  CHECK(cfg.world.uptake_sparsity == 0.90);
  CHECK(cfg.world.crossfeed_density == 0.40);
  CHECK(cfg.world.noise_sigma == 0.03);
  CHECK(cfg.train.epochs == 300);
  CHECK(cfg.train.lr == 0.01);
  CHECK(cfg.train.train_fraction == 0.8);
  CHECK(cfg.knn_k == 5);
  CHECK(cfg.gbdt.rounds == 100);
  CHECK(cfg.gbdt.max_depth == 4);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.seed == 42);
  CHECK_FALSE(cfg.world_seed_set);
  CHECK_FALSE(cfg.train_seed_set);
}

TEST_CASE("config overrides are honored") {
  json doc = json::parse(R"({
    "task": "two-way",
    "world": {"species_count": 6, "condition_count": 4, "noise_sigma": 0.0},
    "train": {"epochs": 12, "hidden_dim": 8, "lr": 0.05},
    "knn_k": 3,
    "gbdt": {"rounds": 7},
    "seed": 9,
    "out_dir": "elsewhere"
  })");
  RunConfig cfg = microsage::config_from_json(doc);
  CHECK(cfg.task == microsage::Task::TwoWay);
  CHECK(cfg.world.species_count == 6);
  CHECK(cfg.world.condition_count == 4);
  CHECK(cfg.world.noise_sigma == 0.0);
  CHECK(cfg.train.epochs == 12);
  CHECK(cfg.train.hidden_dim == 8);
  CHECK(cfg.train.lr == 0.05);
  CHECK(cfg.knn_k == 3);
  CHECK(cfg.gbdt.rounds == 7);
  CHECK(cfg.gbdt.max_depth == 4);  // untouched default
  CHECK(cfg.seed == 9);
  CHECK(cfg.out_dir == "elsewhere");
}

TEST_CASE("unknown or ill-typed config keys are rejected") {
  auto expect_parse_error = [](const char* text) {
    CHECK(code_of([&] { (void)microsage::config_from_json(json::parse(text)); }) ==
          microsage::Errc::ConfigParse);
  };
  expect_parse_error(R"({"bogus": 1})");
  expect_parse_error(R"({"world": {"bogus": 1}})");
  expect_parse_error(R"({"train": {"bogus": 1}})");
  expect_parse_error(R"({"gbdt": {"bogus": 1}})");
  expect_parse_error(R"({"task": "sideways"})");
  expect_parse_error(R"({"source": "carrier-pigeon"})");
  expect_parse_error(R"({"train": {"epochs": 1.5}})");
  expect_parse_error(R"({"standardize": "yes"})");
  expect_parse_error(R"({"seed": "forty-two"})");
  expect_parse_error(R"([1, 2, 3])");
}

TEST_CASE("exactly one data source must be configured") {
  auto expect_parse_error = [](const char* text) {
    CHECK(code_of([&] { (void)microsage::config_from_json(json::parse(text)); }) ==
          microsage::Errc::ConfigParse);
  };
  // csv source without paths
  expect_parse_error(R"({"source": "csv"})");
  expect_parse_error(R"({"source": "csv", "records_csv": "r.csv"})");
  // synth source with csv leftovers, or csv source with a world section
  expect_parse_error(R"({"source": "synth", "records_csv": "r.csv"})");
  expect_parse_error(R"({"source": "csv", "records_csv": "r.csv", "phylo_csv": "p.csv",
                         "world": {"species_count": 4}})");

  RunConfig csv_cfg = microsage::config_from_json(
      json::parse(R"({"source": "csv", "records_csv": "r.csv", "phylo_csv": "p.csv"})"));
  CHECK(csv_cfg.source == microsage::DataSource::Csv);
  CHECK(csv_cfg.records_csv == "r.csv");
}

TEST_CASE("the run seed fans out to world, split, and train seeds") {
  RunConfig cfg = microsage::config_from_json(json::parse(R"({"seed": 42})"));
  microsage::ResolvedSeeds seeds = microsage::resolve_seeds(cfg);
  CHECK(seeds.world == 42);
  CHECK(seeds.split == microsage::mix_seed(42, 101));
  CHECK(seeds.train == microsage::mix_seed(42, 102));
  CHECK(seeds.split != seeds.train);
  CHECK(seeds.split != seeds.world);

  SUBCASE("a pinned world seed wins") {
    RunConfig pinned = microsage::config_from_json(json::parse(R"({"seed": 42,
      "world": {"seed": 7}})"));
    microsage::ResolvedSeeds s = microsage::resolve_seeds(pinned);
    CHECK(s.world == 7);
    CHECK(s.split == seeds.split);  // still derived from the run seed
  }
  SUBCASE("a pinned train seed wins") {
    RunConfig pinned = microsage::config_from_json(json::parse(R"({"seed": 42,
      "train": {"seed": 9}})"));
    CHECK(microsage::resolve_seeds(pinned).train == 9);
  }
}

TEST_CASE("run ids identify the effective config but not its location") {
  RunConfig a = microsage::config_from_json(json::object());
  RunConfig b = a;
  const std::string id_a = microsage::run_id_for(a);
  CHECK(id_a.size() == 16);
  CHECK(id_a.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(microsage::run_id_for(b) == id_a);

  b.out_dir = "/somewhere/else";
  CHECK(microsage::run_id_for(b) == id_a);  // out_dir excluded
  CHECK_FALSE(microsage::config_echo(b).contains("out_dir"));

  b.seed = 43;
  CHECK(microsage::run_id_for(b) != id_a);
  RunConfig c = a;
  c.world.noise_sigma = 0.05;
  CHECK(microsage::run_id_for(c) != id_a);
}

TEST_CASE("config echo embeds the resolved seeds") {
  RunConfig cfg = microsage::config_from_json(json::parse(R"({"seed": 5})"));
  json echo = microsage::config_echo(cfg);
  CHECK(echo["seed"] == 5);
  CHECK(echo["world"]["seed"] == 5);
  CHECK(echo["split_seed"] == microsage::mix_seed(5, 101));
  CHECK(echo["train"]["seed"] == microsage::mix_seed(5, 102));
  CHECK(echo["task"] == "one-way");
  CHECK(echo["source"] == "synth");
}

TEST_CASE("model checkpoints round-trip exactly") {
  TempDir tmp("microsage_model_roundtrip");
  RunConfig cfg = small_config(tmp.path);
  microsage::GraphSageModel model = microsage::init_model(13, 16, 2, 99);
  const fs::path path = tmp.path / "model.json";
  microsage::save_model_json(model, cfg, path);
  microsage::GraphSageModel loaded = microsage::load_model_json(path);
  CHECK(loaded.layer1.w1.data == model.layer1.w1.data);
  CHECK(loaded.layer1.w2.data == model.layer1.w2.data);
  CHECK(loaded.layer2.w1.data == model.layer2.w1.data);
  CHECK(loaded.layer2.w2.data == model.layer2.w2.data);

  SUBCASE("missing checkpoint") {
    CHECK(code_of([&] { (void)microsage::load_model_json(tmp.path / "nope.json"); }) ==
          microsage::Errc::MissingInput);
  }
  SUBCASE("corrupt checkpoint") {
    std::ofstream(tmp.path / "junk.json") << "not json";
    CHECK(code_of([&] { (void)microsage::load_model_json(tmp.path / "junk.json"); }) ==
          microsage::Errc::ConfigParse);
  }
}

TEST_CASE("stages demand their upstream artifacts") {
  TempDir tmp("microsage_stage_order");
  RunConfig cfg = small_config(tmp.path);
  CHECK(code_of([&] { microsage::run_pipeline(cfg, Stage::Featurize); }) ==
        microsage::Errc::MissingInput);
  CHECK(code_of([&] { microsage::run_pipeline(cfg, Stage::Train); }) ==
        microsage::Errc::MissingInput);

  microsage::run_pipeline(cfg, Stage::Synth);
  CHECK(code_of([&] { microsage::run_pipeline(cfg, Stage::Evaluate); }) ==
        microsage::Errc::MissingInput);  // dataset exists, model does not
}

TEST_CASE("degenerate split fractions surface as errors") {
  TempDir tmp("microsage_degenerate_split");
  RunConfig cfg = small_config(tmp.path);
  microsage::run_pipeline(cfg, Stage::Synth);
  cfg.train.train_fraction = 1.0;
  CHECK(code_of([&] { microsage::run_pipeline(cfg, Stage::BuildGraph); }) ==
        microsage::Errc::DegenerateSplit);
}

TEST_CASE("prepare_graph wires dataset, features, graph, and split together") {
  TempDir tmp("microsage_prepare_graph");
  RunConfig cfg = small_config(tmp.path);
  microsage::run_pipeline(cfg, Stage::Synth);

  microsage::PreparedGraph pg = microsage::prepare_graph(cfg);
  const int records = 8 * 7 / 2 * 6;
  CHECK(static_cast<int>(pg.dataset.records.size()) == records);
  CHECK(pg.graph.node_count == 2 * records);  // one-way keeps both orientations
  CHECK(pg.graph.features.rows == pg.graph.node_count);
  CHECK(pg.graph.features.cols == 13);
  REQUIRE(pg.standardizer.has_value());

  int train = 0, test = 0;
  for (int i = 0; i < pg.graph.node_count; ++i) {
    train += pg.graph.train_mask[i] ? 1 : 0;
    test += pg.graph.test_mask[i] ? 1 : 0;
  }
  CHECK(train + test == pg.graph.node_count);
  CHECK(train == static_cast<int>(std::llround(pg.graph.node_count * 0.8)));

  cfg.standardize = false;
  microsage::PreparedGraph raw = microsage::prepare_graph(cfg);
  CHECK_FALSE(raw.standardizer.has_value());
}

TEST_CASE("the full pipeline writes every artifact and is reproducible") {
  TempDir dir_a("microsage_e2e_a");
  TempDir dir_b("microsage_e2e_b");
  RunConfig cfg_a = small_config(dir_a.path);
  RunConfig cfg_b = small_config(dir_b.path);

  microsage::run_pipeline(cfg_a, Stage::All);
  microsage::run_pipeline(cfg_b, Stage::All);

  const char* artifacts[] = {"dataset.csv",  "phylo.csv",   "world.json",
                             "features.csv", "graph.json",  "model.json",
                             "history.csv",  "report.json", "report.csv",
                             "compare_report.json", "compare_report.csv"};
  for (const char* name : artifacts) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir_a.path / name));
    // out_dir is excluded from the run identity, so reruns elsewhere are
    // byte-identical.
    CHECK(read_file(dir_a.path / name) == read_file(dir_b.path / name));
  }

  SUBCASE("evaluation report covers the trained model") {
    json report = json::parse(read_file(dir_a.path / "report.json"));
    REQUIRE(report["models"].size() == 1);
    CHECK(report["models"][0]["name"] == "graphsage");
    CHECK(report["models"][0]["task"] == "one-way");
    CHECK(report["run_id"] == microsage::run_id_for(cfg_a));
    CHECK(report["config_echo"] == microsage::config_echo(cfg_a));
  }

  SUBCASE("comparison report covers all three models") {
    json report = json::parse(read_file(dir_a.path / "compare_report.json"));
    REQUIRE(report["models"].size() == 3);
    CHECK(report["models"][0]["name"] == "graphsage");
    CHECK(report["models"][1]["name"] == "knn");
    CHECK(report["models"][2]["name"] == "gbdt");
  }

  SUBCASE("history has one row per epoch") {
    std::istringstream in(read_file(dir_a.path / "history.csv"));
    std::string line;
    int data_rows = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!saw_header) {
        CHECK(line == "epoch,train_loss,train_accuracy,test_accuracy");
        saw_header = true;
        continue;
      }
      ++data_rows;
    }
    CHECK(data_rows == cfg_a.train.epochs);
  }

  SUBCASE("world summary records the label distribution") {
    json world = json::parse(read_file(dir_a.path / "world.json"));
    CHECK(world.contains("uptake"));
    CHECK(world.contains("crossfeed"));
    CHECK(world.contains("phylo_distance"));
    const auto& counts = world["two_way_counts"];
    const int total = counts["mutualism"].get<int>() + counts["competition"].get<int>() +
                      counts["parasitism"].get<int>();
    CHECK(total == 8 * 7 / 2 * 6);
  }
}

TEST_CASE("synth stage rejects a csv data source") {
  TempDir tmp("microsage_synth_source");
  RunConfig cfg = small_config(tmp.path);
  cfg.source = microsage::DataSource::Csv;
  cfg.records_csv = (tmp.path / "r.csv").string();
  cfg.phylo_csv = (tmp.path / "p.csv").string();
  CHECK(code_of([&] { microsage::run_pipeline(cfg, Stage::Synth); }) ==
        microsage::Errc::InvalidConfig);
}

TEST_CASE("csv source round-trips through the exported synthetic data") {
  TempDir synth_dir("microsage_csv_src_a");
  TempDir csv_dir("microsage_csv_src_b");
  RunConfig cfg = small_config(synth_dir.path);
  microsage::run_pipeline(cfg, Stage::Synth);

  RunConfig csv_cfg = small_config(csv_dir.path);
  csv_cfg.source = microsage::DataSource::Csv;
  csv_cfg.records_csv = (synth_dir.path / "dataset.csv").string();
  csv_cfg.phylo_csv = (synth_dir.path / "phylo.csv").string();

  microsage::Dataset from_csv = microsage::load_dataset(csv_cfg);
  microsage::Dataset from_synth = microsage::load_dataset(cfg);
  CHECK(from_csv == from_synth);

  csv_cfg.records_csv = (synth_dir.path / "missing.csv").string();
  CHECK(code_of([&] { (void)microsage::load_dataset(csv_cfg); }) ==
        microsage::Errc::MissingInput);
}
