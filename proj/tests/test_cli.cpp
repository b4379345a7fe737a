#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraclab/cli.hpp"
#include "fraclab/config.hpp"
#include "fraclab/errors.hpp"
#include "json.hpp"

using namespace fraclab;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"grid": {"n": 64}, "model": {"V": {"kind": "constant", "value": 1.0},
                           "f": {"kind": "power", "p": 4.0, "lambda": 1.0}}})";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fraclab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class E>
std::string error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, MinimalDocumentGetsDefaults) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.grid.n(), 64);
  EXPECT_EQ(cfg.grid.dim(), 1);
  EXPECT_DOUBLE_EQ(cfg.solve_s, 1.0);
  EXPECT_DOUBLE_EQ(cfg.solver.tol_residual, 1e-8);
  EXPECT_DOUBLE_EQ(cfg.solver.tol_nehari, 1e-10);
  EXPECT_EQ(cfg.sweep.s_grid, (std::vector<double>{0.6, 0.7, 0.8, 0.9, 0.95, 0.99}));
  EXPECT_EQ(cfg.sweep.nu_list, (std::vector<double>{2.0}));
  EXPECT_EQ(cfg.sweep.grid, cfg.grid);
  EXPECT_EQ(cfg.output.dir, "out");
  EXPECT_EQ(cfg.hash.size(), 16u);
}

TEST(Config, EmptyModelSectionUsesDefaultModel) {
  const auto cfg = parse_config(R"({"grid": {"n": 32}, "model": {}})");
  EXPECT_DOUBLE_EQ(cfg.f.p(), 4.0);
  EXPECT_DOUBLE_EQ(cfg.V.v_min(), 1.0);
}

TEST(Config, OrderBelowHalfIsRejectedWithWindow) {
  const auto msg = error_message<RangeError>(R"({"model": {}, "sweep": {"s_grid": [0.4, 0.8]}})");
  EXPECT_NE(msg.find("1/2<s<1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("sweep.s_grid[0]"), std::string::npos) << msg;
}

TEST(Config, NonpositivePotentialIsRejectedWithAssumption) {
  const auto msg = error_message<RangeError>(R"({"model": {"V": {"kind": "constant", "value": 0}}})");
  EXPECT_NE(msg.find("inf V > 0"), std::string::npos) << msg;
  EXPECT_NE(msg.find("model.V.value"), std::string::npos) << msg;
}

TEST(Config, UnknownKeysNameTheirPath) {
  try {
    parse_config(R"({"model": {"f": {"kind": "power", "p": 4, "lamda": 1}}})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "model.f.lamda");
  }
  try {
    parse_config(R"({"model": {}, "extra": 1})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "extra");
  }
}

TEST(Config, TypeErrorsNameTheirPath) {
  try {
    parse_config(R"({"grid": {"n": "many"}, "model": {}})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "grid.n");
  }
  try {
    parse_config(R"({"model": {}, "sweep": {"nu_list": [2, "x"]}})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "sweep.nu_list[1]");
  }
  EXPECT_THROW(parse_config("{not json"), SchemaError);
}

TEST(Config, GrowthAndExponentWindows) {
  EXPECT_THROW(parse_config(R"({"grid": {"dim": 2, "n": 8}, "model": {"f": {"kind": "power", "p": 4.5}}})"),
               RangeError);
  EXPECT_NO_THROW(parse_config(R"({"grid": {"dim": 2, "n": 8}, "model": {"f": {"kind": "power", "p": 3.5}}})"));
  EXPECT_THROW(parse_config(R"({"model": {"f": {"kind": "power", "p": 2}}})"), RangeError);
  EXPECT_THROW(parse_config(R"({"model": {}, "sweep": {"nu_list": [2, 3]}})"), RangeError);
  EXPECT_NO_THROW(parse_config(R"({"model": {}, "sweep": {"N": 2, "nu_list": [2, 3.5]}})"));
  const auto msg =
      error_message<RangeError>(R"({"model": {"f": {"kind": "power_sum", "terms": [{"p": 3}, {"p": 1.5}]}}})");
  EXPECT_NE(msg.find("model.f.terms[1].p"), std::string::npos) << msg;
}

TEST(Config, HashIsCanonical) {
  const auto a = parse_config(R"({"model": {"f": {"p": 4, "kind": "power"}}, "grid": {"n": 64}})");
  const auto b = parse_config(R"({"grid": {"n": 64, "dim": 1}, "model": {"f": {"kind": "power", "p": 4.0}}})");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.canonical_json, b.canonical_json);
  const auto c = parse_config(R"({"grid": {"n": 65}, "model": {}})");
  EXPECT_NE(a.hash, c.hash);
}

TEST(Config, SolverAndOutputSections) {
  const auto cfg = parse_config(R"({"model": {}, "solver": {"s": 0.75, "init": "random", "seed": 9, "max_iters": 5},
                                     "output": {"dir": "results", "formats": ["csv"]}})");
  EXPECT_DOUBLE_EQ(cfg.solve_s, 0.75);
  EXPECT_EQ(cfg.solver.init, InitialGuess::random);
  EXPECT_EQ(cfg.solver.seed, 9u);
  EXPECT_EQ(cfg.sweep.solver.max_iters, 5);
  EXPECT_EQ(cfg.output.dir, "results");
  EXPECT_THROW(parse_config(R"({"model": {}, "solver": {"init": "zero"}})"), SchemaError);
  EXPECT_THROW(parse_config(R"({"model": {}, "solver": {"s": 0.5}})"), RangeError);
}

TEST(Config, MissingFileIsIoError) { EXPECT_THROW(load_config("/nonexistent/config.json"), IoError); }

TEST(Dispatch, ConstantsPrintsReport) {
  const auto r = run({"constants", "--N", "3", "--s", "0.75"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["N"], 3);
  EXPECT_NEAR(j["C"].get<double>() * j["A"].get<double>() * j["B"].get<double>(), 0.1875, 1e-12);
}

TEST(Dispatch, MissingConfigFileExitsOne) {
  const auto r = run({"sweep", "--config", "missing.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("not found"), std::string::npos) << r.err;
}

TEST(Dispatch, UnknownSubcommandPrintsUsage) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("usage"), std::string::npos);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"constants", "--N", "3"}).code, 1);
}

TEST(Dispatch, CheckModelReportsAssumptions) {
  const auto dir = scratch_dir("check");
  const auto cfg = write_file(dir / "c.json", kMinimal);
  const auto r = run({"check-model", "--config", cfg.string(), "--samples", "2000"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["all_passed"].get<bool>());
  EXPECT_EQ(j["config_hash"], parse_config(kMinimal).hash);
  fs::remove_all(dir);
}

TEST(Dispatch, SolveWritesFieldAndSidecar) {
  const auto dir = scratch_dir("solve");
  const auto cfg = write_file(dir / "c.json", kMinimal);
  const auto r = run({"solve", "--config", cfg.string(), "--out", (dir / "u.csv").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir / "u.csv");
  EXPECT_EQ(csv.rfind("x,u\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 65);
  const auto side = nlohmann::json::parse(slurp(dir / "u.json"));
  EXPECT_TRUE(side["converged"].get<bool>());
  EXPECT_EQ(side["config_hash"], parse_config(kMinimal).hash);
  EXPECT_GT(side["energy"].get<double>(), 0.0);
  fs::remove_all(dir);
}

TEST(Dispatch, ForcedNonConvergenceExitsTwoWithPartialResult) {
  const auto dir = scratch_dir("nonconv");
  const auto cfg = write_file(dir / "c.json", R"({"grid": {"n": 64}, "model": {}, "solver": {"max_iters": 1}})");
  const auto r = run({"solve", "--config", cfg.string(), "--out", (dir / "u.csv").string()});
  EXPECT_EQ(r.code, 2);
  const auto side = nlohmann::json::parse(slurp(dir / "u.json"));
  EXPECT_FALSE(side["converged"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "u.csv"));
  fs::remove_all(dir);
}

TEST(Dispatch, SweepWritesAllOutputsAndIsDeterministic) {
  const auto dir = scratch_dir("sweep");
  const auto cfg = write_file(dir / "c.json", kMinimal);
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir / "b").string()}).code, 0);
  for (const char* name : {"sweep.csv", "plotdata.csv", "meta.json"}) EXPECT_TRUE(fs::exists(dir / "a" / name));
  EXPECT_EQ(slurp(dir / "a" / "sweep.csv"), slurp(dir / "b" / "sweep.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "a" / "meta.json"));
  EXPECT_EQ(meta["config_hash"], parse_config(kMinimal).hash);
  EXPECT_TRUE(meta.contains("version"));
  fs::remove_all(dir);
}

TEST(Dispatch, SweepNonConvergenceAndAllowPartial) {
  const auto dir = scratch_dir("sweep_partial");
  const auto cfg = write_file(dir / "c.json", R"({"grid": {"n": 32}, "model": {}, "solver": {"max_iters": 1}})");
  EXPECT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir / "a").string()}).code, 2);
  const auto r = run({"sweep", "--config", cfg.string(), "--out", (dir / "b").string(), "--allow-partial"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir / "b" / "sweep.csv");
  EXPECT_NE(csv.find("converged"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Dispatch, ValidationFailureExitsOne) {
  const auto dir = scratch_dir("invalid");
  const auto cfg = write_file(dir / "c.json", R"({"model": {"V": {"kind": "constant", "value": -1}}})");
  const auto r = run({"solve", "--config", cfg.string(), "--out", (dir / "u.csv").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("model.V.value"), std::string::npos);
  fs::remove_all(dir);
}
