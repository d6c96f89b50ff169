#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "shiftval/cli.hpp"
#include "shiftval/dataset.hpp"
#include "shiftval/report.hpp"

using namespace shiftval;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

// Splits cohort.csv by its trailing center column into dev.csv (all but
// `ext_center`) and ext.csv.
void split_cohort(const fs::path& dir, const std::string& ext_center) {
  std::ifstream in(dir / "cohort.csv");
  std::ofstream dev(dir / "dev.csv"), ext(dir / "ext.csv");
  std::string line;
  std::getline(in, line);
  dev << line << "\n";
  ext << line << "\n";
  while (std::getline(in, line)) {
    const std::string center = line.substr(line.rfind(',') + 1);
    (center == ext_center ? ext : dev) << line << "\n";
  }
}

class CliPipeline : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = oracle::temp_dir("cli");
    ASSERT_EQ(cli({"simulate", "centers", "--preset", "covariate-shift", "--n-per-center", "300", "--out", p(dir)}).code,
              0);
    split_cohort(dir, "C5");
    auto a = cli({"fit-ae", "--data", p(dir / "dev.csv"), "--out", p(dir / "ae.json"), "--epochs", "20"});
    ASSERT_EQ(a.code, 0) << a.err;
    auto m = cli({"fit-model", "--data", p(dir / "dev.csv"), "--out", p(dir / "model.json")});
    ASSERT_EQ(m.code, 0) << m.err;
  }
  void TearDown() override { fs::remove_all(dir); }
};

}  // namespace

TEST(CliExitCodes, UsageDataAndHelp) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"loco", "--data", "x.csv", "--out", "o", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"validate", "--scenario", "sideways", "--model", "m", "--ae", "a", "--data", "d", "--out", "o"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"loco", "--help"}).code, kExitOk);
  auto missing = cli({"loco", "--data", "/nonexistent/cohort.csv", "--out", "/tmp/unused"});
  EXPECT_EQ(missing.code, kExitData);
  EXPECT_NE(missing.err.find("cohort.csv"), std::string::npos);
}

TEST(CliSimulate, Gauss2dWritesThreeFiles) {
  auto dir = oracle::temp_dir("gauss");
  auto r = cli({"simulate", "gauss2d", "--seed", "7", "--n", "300", "--epochs", "20", "--out", p(dir)});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"dev.csv", "contrast.csv", "grid_scores.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream grid(dir / "grid_scores.csv");
  std::string header;
  std::getline(grid, header);
  EXPECT_EQ(header, "x1,x2,ae_dissimilarity,membership_dissimilarity,mahalanobis");
  std::size_t rows = 0;
  for (std::string line; std::getline(grid, line);) ++rows;
  EXPECT_EQ(rows, 41u * 41u);
  fs::remove_all(dir);
}

TEST(CliSimulate, SeedFromEnvironmentAndConfig) {
  auto dir = oracle::temp_dir("seed");
  auto gen = [&](const std::string& sub, std::vector<std::string> extra) {
    std::vector<std::string> args{"simulate", "centers", "--n-per-center", "50", "--out", p(dir / sub)};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(cli(args).code, 0);
    return read_file(p(dir / sub / "cohort.csv"));
  };
  const std::string s5 = gen("a", {"--seed", "5"});
  const std::string s6 = gen("b", {"--seed", "6"});
  EXPECT_NE(s5, s6);

  setenv("SHIFTVAL_SEED", "5", 1);
  EXPECT_EQ(gen("c", {}), s5);
  EXPECT_EQ(gen("d", {"--seed", "6"}), s6);  // flag beats environment
  write_file_atomic(p(dir / "cfg.json"), R"({"seed": 6, "unrelated_key": true})");
  EXPECT_EQ(gen("e", {"--config", p(dir / "cfg.json")}), s6);  // config beats environment
  EXPECT_EQ(gen("f", {"--config", p(dir / "cfg.json"), "--seed", "5"}), s5);
  unsetenv("SHIFTVAL_SEED");
  fs::remove_all(dir);
}

TEST_F(CliPipeline, ScoreNeedsOnlyArtifactAndExternalFile) {
  auto first = cli({"score", "--ae", p(dir / "ae.json"), "--data", p(dir / "ext.csv")});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out.substr(0, first.out.find('\n')), "instance_id,dissimilarity,scorer_kind");
  fs::remove(dir / "dev.csv");
  fs::remove(dir / "cohort.csv");
  auto second = cli({"score", "--ae", p(dir / "ae.json"), "--data", p(dir / "ext.csv")});
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(first.out, second.out);
  auto negated = cli({"score", "--ae", p(dir / "ae.json"), "--data", p(dir / "ext.csv"), "--negate"});
  EXPECT_NE(negated.out.find("similarity"), std::string::npos);
}

TEST_F(CliPipeline, ExtDeployValidateWritesConsistentReport) {
  fs::remove(dir / "dev.csv");
  auto r = cli({"validate", "--scenario", "ext-deploy", "--model", p(dir / "model.json"), "--ae", p(dir / "ae.json"),
                "--data", p(dir / "ext.csv"), "--out", p(dir / "ext.json"), "--plots", p(dir / "plots"),
                "--bootstrap-b", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  ValidationReport rep = read_report(p(dir / "ext.json"));
  ASSERT_TRUE(rep.idlike && rep.ood);
  EXPECT_EQ(rep.idlike->fraction + rep.ood->fraction, 1.0);
  EXPECT_EQ(rep.idlike->n + rep.ood->n, rep.external.n);
  EXPECT_LE(rep.max_recombination_error, 1e-12);
  for (const char* f : {"strata_bars.csv", "scores.csv", "decile_curve.csv"})
    EXPECT_TRUE(fs::exists(dir / "plots" / f)) << f;
  const std::string text = read_file(p(dir / "ext.json"));
  EXPECT_EQ(text.find(p(dir)), std::string::npos) << "report must not embed file paths";

  auto rr = cli({"report", "--in", p(dir / "ext.json")});
  EXPECT_EQ(rr.code, 0) << rr.err;
  EXPECT_NE(rr.out.find("OOD"), std::string::npos);
}

TEST_F(CliPipeline, DevDeployRequiresInternalSplit) {
  auto bad = cli({"validate", "--scenario", "dev-deploy", "--model", p(dir / "model.json"), "--ae", p(dir / "ae.json"),
                  "--data", p(dir / "ext.csv"), "--out", p(dir / "dev.json")});
  EXPECT_EQ(bad.code, kExitUsage);
  auto ok = cli({"validate", "--scenario", "dev-deploy", "--model", p(dir / "model.json"), "--ae", p(dir / "ae.json"),
                 "--data", p(dir / "ext.csv"), "--dev-test", p(dir / "dev.csv"), "--dev", p(dir / "dev.csv"), "--out",
                 p(dir / "dev.json"), "--epochs", "20", "--bootstrap-b", "200"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  ValidationReport rep = read_report(p(dir / "dev.json"));
  ASSERT_TRUE(rep.matched && rep.internal && rep.drift && rep.decile_curve);
  EXPECT_NEAR(rep.matched->mean_weight, 1.0, 1e-9);
  EXPECT_GT(rep.matched->ess, 0.0);
}

TEST_F(CliPipeline, TamperedReportIsRejected) {
  ASSERT_EQ(cli({"validate", "--scenario", "ext-deploy", "--model", p(dir / "model.json"), "--ae", p(dir / "ae.json"),
                 "--data", p(dir / "ext.csv"), "--out", p(dir / "ext.json"), "--bootstrap-b", "200"})
                .code,
            0);
  auto j = nlohmann::ordered_json::parse(read_file(p(dir / "ext.json")));
  j["idlike"]["brier"] = j["idlike"]["brier"].get<double>() * 1.01;
  write_file_atomic(p(dir / "bad.json"), j.dump(2));
  EXPECT_EQ(cli({"report", "--in", p(dir / "bad.json")}).code, kExitNumeric);
  j.erase("ood");
  write_file_atomic(p(dir / "bad.json"), j.dump(2));
  EXPECT_EQ(cli({"report", "--in", p(dir / "bad.json")}).code, kExitData);
}

TEST(CliLoco, RerunIsByteIdentical) {
  auto dir = oracle::temp_dir("loco");
  ASSERT_EQ(cli({"simulate", "centers", "--preset", "null", "--n-per-center", "200", "--out", p(dir)}).code, 0);
  auto run = [&](const std::string& sub, const std::string& jobs) {
    auto r = cli({"loco", "--data", p(dir / "cohort.csv"), "--out", p(dir / sub), "--top-k", "3", "--epochs", "10",
                  "--bootstrap-b", "100", "--jobs", jobs});
    EXPECT_EQ(r.code, 0) << r.err;
  };
  run("a", "1");
  run("b", "3");
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir / "a");
    EXPECT_EQ(read_file(p(e.path())), read_file(p(dir / "b" / rel))) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 3u * 5u + 4u);
  fs::remove_all(dir);
}

TEST(CliSimulate, MalformedEnvironmentSeedIsUsageError) {
  auto dir = oracle::temp_dir("badseed");
  setenv("SHIFTVAL_SEED", "twelve", 1);
  EXPECT_EQ(cli({"simulate", "centers", "--n-per-center", "50", "--out", p(dir)}).code, kExitUsage);
  unsetenv("SHIFTVAL_SEED");
  fs::remove_all(dir);
}

TEST(CliConfig, NestedSectionSuppliesRequiredOptions) {
  auto dir = oracle::temp_dir("cfg");
  const std::string cfg = p(dir / "cfg.json");
  write_file_atomic(cfg, R"({"simulate": {"centers": {"out": ")" + p(dir / "sim") +
                             R"(", "n_per_center": 60, "preset": "prevalence-shift"}}, "loco": {"top_k": 99}})");
  auto r = cli({"simulate", "centers", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("prevalence-shift, 5 centers x 60 rows"), std::string::npos) << r.out;
  write_file_atomic(cfg, "[1, 2]");
  EXPECT_EQ(cli({"simulate", "centers", "--config", cfg, "--out", p(dir / "x")}).code, kExitUsage);
  fs::remove_all(dir);
}
