#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "latent/cli.hpp"
#include "latent/report.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = LATENT_TEST_DATA;
const std::string kTwoBlocks = kData + "/two_blocks.json";

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation lctool(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = latent::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("lctool_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(CliLaplacian, TwoBlocksJson) {
  const Invocation r = lctool({"laplacian", kTwoBlocks, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["matrix"], nlohmann::json::parse("[[1,-1,0,0],[-3,3,0,0],[0,0,1,-1],[0,0,-4,4]]"));
}

TEST(CliLaplacian, TextAndEmptyGraph) {
  TempDir tmp;
  const Invocation r = lctool({"laplacian", tmp.write("empty.json", R"({"n":2,"arcs":[]})")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "   0.000000   0.000000\n   0.000000   0.000000\n");
}

TEST(CliLaplacian, BadFileNamesParseError) {
  TempDir tmp;
  const Invocation r = lctool({"laplacian", tmp.write("bad.json", R"({"n":2,"arcs":[[1,2,"x"]]})")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("weight must be a number"), std::string::npos) << r.err;
  const Invocation missing = lctool({"laplacian", tmp.file("missing.json")});
  EXPECT_NE(missing.code, 0);
  EXPECT_NE(missing.err.find("cannot open"), std::string::npos);
}

TEST(CliEigenprojection, AllMethodsAgree) {
  const Invocation r = lctool({"eigenprojection", kTwoBlocks, "--method", "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("method: algebraic"), std::string::npos);
  EXPECT_NE(r.out.find("method: resolvent"), std::string::npos);
  EXPECT_NE(r.out.find("method: forest"), std::string::npos);
  EXPECT_NE(r.out.find("0.7500000000   0.2500000000"), std::string::npos);
  EXPECT_NE(r.out.find("agreement: max pairwise difference"), std::string::npos);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(CliEigenprojection, JsonMatchesJbarPerMethod) {
  for (const char* m : {"algebraic", "resolvent", "forest"}) {
    const Invocation r = lctool({"--format", "json", "eigenprojection", kTwoBlocks, "--method", m});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    const auto& mat = doc["projections"][0]["matrix"];
    EXPECT_NEAR(mat[0][0].get<double>(), 0.75, 1e-6) << m;
    EXPECT_NEAR(mat[2][3].get<double>(), 0.2, 1e-6) << m;
  }
}

TEST(CliEigenprojection, ForestRefusesAboveCap) {
  const Invocation r = lctool({"eigenprojection", kData + "/cycle10.json", "--method", "forest"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("enumeration cap"), std::string::npos) << r.err;
}

TEST(CliConsensus, BackgroundLimit) {
  const Invocation r = lctool({"consensus", kTwoBlocks, "--method", "background", "--x0", "1,2,3,4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const latent::ConsensusReport rep = latent::parse_consensus_report(r.out);
  EXPECT_EQ(rep.method, "background");
  ASSERT_TRUE(rep.value);
  EXPECT_NEAR(*rep.value, 2.225, 1e-12);
  EXPECT_NEAR(rep.weights(0), 0.375, 1e-12);
}

TEST(CliConsensus, SpecFileAndOrthoproj) {
  TempDir tmp;
  const std::string spec = tmp.write("spec.json", R"({"method":"orthoproj","delta":null})");
  const Invocation r = lctool({"consensus", kTwoBlocks, "--spec", spec, "--x0", "1,2,3,4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const latent::ConsensusReport rep = latent::parse_consensus_report(r.out);
  EXPECT_NEAR(rep.weights(0), 0.3908, 5e-5);
  EXPECT_NEAR(rep.weights(1), 0.1303, 5e-5);
  EXPECT_NEAR(rep.weights(2), 0.3831, 5e-5);
  EXPECT_NEAR(rep.weights(3), 0.0958, 5e-5);
  ASSERT_TRUE(rep.value);
  EXPECT_NEAR(*rep.value, rep.weights.dot(Eigen::Vector4d(1, 2, 3, 4)), 1e-12);
}

TEST(CliConsensus, SimulateAddsResidual) {
  const Invocation r = lctool({"consensus", kTwoBlocks, "--method", "hub-symmetric", "--delta", "0.01",
                        "--x0", "1,2,3,4,0", "--simulate"});
  ASSERT_EQ(r.code, 0) << r.err;
  const latent::ConsensusReport rep = latent::parse_consensus_report(r.out);
  ASSERT_TRUE(rep.diagnostics.count("trajectory_residual"));
  EXPECT_LE(rep.diagnostics.at("trajectory_residual"), 1e-6);
  EXPECT_EQ(*rep.delta_used, 0.01);
}

TEST(CliConsensus, TrajectoryCsv) {
  TempDir tmp;
  const std::string csv = tmp.file("traj.csv");
  const Invocation r = lctool({"consensus", kTwoBlocks, "--method", "background", "--delta", "0.1", "--x0",
                        "1,2,3,4", "--trajectory", csv, "--samples", "5", "--t-max", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "t,x1,x2,x3,x4");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(CliConsensus, DiscreteMethodsNeedSmallDiagonal) {
  const Invocation r = lctool({"consensus", kTwoBlocks, "--method", "pagerank", "--x0", "1,2,3,4"});
  EXPECT_EQ(r.code, latent::cli::kExitUsage);
  EXPECT_NE(r.err.find("L_ii <= 1"), std::string::npos);

  TempDir tmp;
  const std::string p = tmp.write("p.json", R"({"matrix":[[0,1],[1,0]]})");
  const Invocation ok = lctool({"consensus", "--matrix-file", p, "--method", "pagerank", "--x0", "2,6"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NEAR(*latent::parse_consensus_report(ok.out).value, 4.0, 1e-12);
}

TEST(CliConsensus, TextFormat) {
  const Invocation r = lctool({"--format", "text", "consensus", kTwoBlocks, "--method", "background",
                        "--x0", "1,2,3,4"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("method: background"), std::string::npos);
  EXPECT_NE(r.out.find("value: 2.225"), std::string::npos);
}

TEST(CliConsensus, UsageErrors) {
  EXPECT_EQ(lctool({"consensus", kTwoBlocks, "--x0", "1,2,3,4"}).code, latent::cli::kExitUsage);
  EXPECT_EQ(lctool({"consensus", kTwoBlocks, "--method", "background"}).code, latent::cli::kExitUsage);
  EXPECT_EQ(lctool({"consensus", kTwoBlocks, "--method", "nope", "--x0", "1"}).code,
            latent::cli::kExitUsage);
  EXPECT_EQ(lctool({}).code, latent::cli::kExitUsage);
  EXPECT_EQ(lctool({"frobnicate"}).code, latent::cli::kExitUsage);
  EXPECT_EQ(lctool({"--help"}).code, 0);
}

TEST(CliVerify, TwoBlocksPasses) {
  const Invocation r = lctool({"verify", kTwoBlocks});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("pair_identity_hub"), std::string::npos);
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
}

TEST(CliVerify, RandomIsDeterministic) {
  const Invocation a = lctool({"verify", "--random", "5", "42", "--format", "json"});
  const Invocation b = lctool({"verify", "--random", "5", "42", "--format", "json"});
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  const auto doc = nlohmann::json::parse(a.out);
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_GT(doc["checks"].size(), 10u);
}

TEST(CliVerify, CorruptedLaplacianFails) {
  TempDir tmp;
  const std::string m = tmp.write("m.json", R"({"matrix":[[1,1],[-1,-1]]})");
  const Invocation r = lctool({"verify", "--matrix-file", m});
  EXPECT_EQ(r.code, latent::cli::kExitCheckFailed);
  EXPECT_NE(r.out.find("laplacian_class"), std::string::npos);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(CliVerify, TolMultiplierScalesTolerances) {
  const Invocation r = lctool({"--tol", "0", "verify", kTwoBlocks});
  EXPECT_EQ(r.code, latent::cli::kExitUsage);
  const Invocation tight = lctool({"--tol", "1e-20", "verify", kTwoBlocks});
  EXPECT_EQ(tight.code, latent::cli::kExitCheckFailed);
}

TEST(CliSweep, BackgroundApproachesLimit) {
  const Invocation r = lctool({"sweep", kTwoBlocks, "--method", "background", "--x0", "1,2,3,4",
                        "--deltas", "0.1,0.001,0.00001"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line, last;
  std::getline(lines, line);
  EXPECT_EQ(line, "delta,w1,w2,w3,w4,value,limit_distance");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 3);
  std::vector<double> cells;
  std::istringstream cs(last);
  for (std::string cell; std::getline(cs, cell, ',');) cells.push_back(std::stod(cell));
  EXPECT_NEAR(cells[1], 0.375, 1e-4);
  EXPECT_NEAR(cells[3], 0.4, 1e-4);
  EXPECT_LE(cells.back(), 1e-4);
}

TEST(CliSweep, SingleDeltaAndSubordinateSchedule) {
  const Invocation one = lctool({"sweep", kTwoBlocks, "--method", "background", "--deltas", "0.5"});
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(std::count(one.out.begin(), one.out.end(), '\n'), 2);

  const Invocation sub = lctool({"sweep", kTwoBlocks, "--method", "hub-subordinate", "--deltas",
                          "1e-2,1e-4,1e-6", "--with-limit"});
  ASSERT_EQ(sub.code, 0) << sub.err;
  std::istringstream lines(sub.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "delta,w1,w2,w3,w4,w_hub,limit_distance");
  double previous = 1e300;
  int rows = 0;
  while (std::getline(lines, line)) {
    const double d = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_LT(d, previous);
    previous = d;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(previous, 0.0);
}

TEST(CliOut, WritesToFile) {
  TempDir tmp;
  const std::string path = tmp.file("l.json");
  const Invocation r = lctool({"--out", path, "laplacian", kTwoBlocks, "--format", "json"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(nlohmann::json::parse(slurp(path))["order"], 4);
}
