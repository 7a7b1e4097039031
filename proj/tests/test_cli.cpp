#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bebp/cli.hpp"
#include "bebp/config.hpp"
#include "oracles.hpp"

using namespace bebp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "bebp_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path kdd_pool() {
  auto path = fs::temp_directory_path() / "bebp_test_cli_pool.txt";
  oracle::write_synthetic_kdd(path,
                              {{"normal", 400}, {"satan", 80}, {"smurf", 200},
                               {"buffer_overflow", 10}, {"guess_passwd", 40}},
                              3);
  return path;
}

std::string kdd_config(const fs::path& out) {
  return "[dataset]\nsource = kdd\ntrain_path = " + kdd_pool().string() +
         "\ntrain_counts = NORMAL:150,PROB:30,DOS:80,U2R:4,R2L:16"
         "\neval_counts = NORMAL:150,PROB:30,DOS:80,U2R:4,R2L:16\n"
         "[victims]\nmodels = lr\n[experiment]\nrounds = 2\nrepetitions = 2\n"
         "[output]\ndir = " + out.string() + "\n";
}

}  // namespace

TEST_CASE("minimal config applies defaults") {
  auto cfg = parse_config_text("[dataset]\nsource = moons\n");
  CHECK(cfg.experiment.attack.eta == 0.07);
  CHECK(cfg.experiment.attack.rounds == 15);
  CHECK(cfg.experiment.repetitions == 10);
  CHECK(cfg.experiment.victims.size() == 6);
  CHECK(cfg.eta_list == std::vector<double>{0.01, 0.04, 0.07, 0.1});
}

TEST_CASE("unknown keys and out-of-range values are named") {
  try {
    parse_config_text("[attack]\netaa = 0.1\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("etaa") != std::string::npos);
  }
  try {
    parse_config_text("[attack]\neta = 1.5\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("eta") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(fs::temp_directory_path() / "no_such_config.ini"), IoError);
}

TEST_CASE("overrides win and are rendered") {
  auto cfg = parse_config_text("[attack]\neta = 0.05\n", {"attack.eta=0.1", "experiment.rounds=3"});
  CHECK(cfg.experiment.attack.eta == 0.1);
  CHECK(cfg.experiment.attack.rounds == 3);
  auto again = parse_config_text(cfg.render());
  CHECK(again.values == cfg.values);
}

TEST_CASE("experiment on moons writes reports and a manifest") {
  auto out = scratch("experiment");
  auto cfg = parse_config_text("[dataset]\nsource = moons\nmoons_eval_n = 200\n"
                               "[experiment]\nrounds = 5\nrepetitions = 1\n",
                               {"output.dir=" + out.string()});
  std::ostringstream log, err;
  CHECK(dispatch("experiment", cfg, log, err) == 0);
  for (const auto& v : VictimSpec::standard_names())
    CHECK(fs::exists(out / ("report_" + v + ".csv")));
  CHECK(fs::exists(out / "manifest.txt"));
  CHECK(slurp(out / "manifest.txt").find("status = complete") != std::string::npos);
}

TEST_CASE("unknown command") {
  auto cfg = parse_config_text("", {"output.dir=" + scratch("unknown").string()});
  std::ostringstream log, err;
  CHECK(dispatch("nonsense", cfg, log, err) == 2);
}

TEST_CASE("raster on 41-feature data fails") {
  auto out = scratch("raster41");
  std::ostringstream log, err;
  CHECK(dispatch("raster", parse_config_text(kdd_config(out)), log, err) != 0);
  CHECK_FALSE(err.str().empty());
}

TEST_CASE("compare-baselines joins three methods") {
  auto out = scratch("baselines");
  std::ostringstream log, err;
  REQUIRE(dispatch("compare-baselines", parse_config_text(kdd_config(out)), log, err) == 0);
  std::ifstream in(out / "baselines.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.find("dr_bebp") != std::string::npos);
  CHECK(header.find("dr_basic") != std::string::npos);
  CHECK(header.find("dr_random") != std::string::npos);
  std::size_t rows = 0;
  for (std::string l; std::getline(in, l);) ++rows;
  CHECK(rows == 3 * 1);  // rounds 0..2, one victim, evaluating set only
}

TEST_CASE("prepare writes the sampled splits") {
  auto out = scratch("prepare");
  std::ostringstream log, err;
  REQUIRE(dispatch("prepare", parse_config_text(kdd_config(out)), log, err) == 0);
  auto train = read_dataset_csv(out / "train.csv");
  CHECK(train.size() == 280);
  CHECK(train.dim() == 41);
  CHECK(fs::exists(out / "normalization.csv"));
}

TEST_CASE("manifest rerun reproduces outputs byte-for-byte") {
  auto first = scratch("rerun_a"), second = scratch("rerun_b");
  auto cfg = parse_config_text("[dataset]\nsource = moons\nmoons_eval_n = 200\n"
                               "[victims]\nmodels = nb,svm-rbf\n"
                               "[experiment]\nrounds = 3\nrepetitions = 2\n",
                               {"output.dir=" + first.string()});
  std::ostringstream log, err;
  REQUIRE(dispatch("attack", cfg, log, err) == 0);
  REQUIRE(rerun(first / "manifest.txt", second.string(), log, err) == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    if (entry.path().filename() == "manifest.txt") continue;
    CHECK(slurp(entry.path()) == slurp(second / entry.path().filename()));
    ++compared;
  }
  CHECK(compared >= 6);
}
