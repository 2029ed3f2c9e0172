#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dfm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dfm::cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "dfm_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string small_config() {
  const auto path = scratch("small.cfg");
  dfm::write_text_file(path,
                       "experiment = custom\nn = 24\nK = 2\ndistribution = bernoulli\n"
                       "rho_grid = 0.4:0.4:0.8\nP = 1, 0.1, 0.1, 0.9\nreps = 2\n");
  return path.string();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 1);
  const auto bad = run({"frobnicate"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(bad.err.empty());
  EXPECT_EQ(run({"sweep", "--bogus"}).code, 1);
  EXPECT_EQ(run({"sweep", "--experiment", "1a"}).code, 1);  // --out missing
  EXPECT_EQ(run({"realdata", "--dataset", "football", "--out", "x.csv"}).code, 1);
  EXPECT_EQ(run({"sweep", "--out", scratch("none.csv").string()}).code, 1);
}

TEST(Cli, RuntimeErrors) {
  const auto missing = run({"sweep", "--config", scratch("does_not_exist.cfg").string(), "--out",
                            scratch("x.csv").string()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("cannot open"), std::string::npos);
  const auto bad = scratch("bad.cfg");
  dfm::write_text_file(bad, "n = 10\nK = 2\ndistribution = exponential\nrho = 1\nP = -1, 0, 0, 1\n");
  EXPECT_EQ(run({"check", "--config", bad.string()}).code, 2);
}

TEST(Cli, SweepWritesDeterministicCsv) {
  const auto cfg = small_config();
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  const auto r1 = run({"sweep", "--config", cfg, "--out", a.string()});
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_NE(r1.out.find(a.string()), std::string::npos);
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", b.string()}).code, 0);
  const auto text = dfm::read_text_file(a);
  EXPECT_EQ(text, dfm::read_text_file(b));
  EXPECT_EQ(count_lines(text), 1u + 2 * (2 + 2));
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", b.string(), "--seed", "7"}).code, 0);
  EXPECT_NE(text, dfm::read_text_file(b));
  EXPECT_EQ(dfm::parse_results_csv(dfm::read_text_file(b))[0].seed, 7u);
}

TEST(Cli, SweepOverridesReps) {
  const auto out = scratch("reps.csv");
  ASSERT_EQ(run({"sweep", "--config", small_config(), "--reps", "1", "--resample-labels", "--out",
                 out.string()})
                .code,
            0);
  EXPECT_EQ(count_lines(dfm::read_text_file(out)), 1u + 2 * (1 + 2));
}

TEST(Cli, GenerateThenDetect) {
  const auto prefix = scratch("gen").string();
  const auto g = run({"generate", "--config", small_config(), "--out", prefix});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(count_lines(g.out), 4u);
  const auto omega = dfm::parse_matrix(dfm::read_text_file(prefix + "_omega.txt"));
  EXPECT_EQ(omega.rows(), 24);
  const auto d = run({"detect", "--input", prefix + "_omega.txt", "--k", "2", "--seed", "7"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(count_lines(d.out), 24u);
  std::vector<int> est;
  std::istringstream in(d.out);
  for (int v; in >> v;) est.push_back(v - 1);
  std::vector<int> truth;
  std::istringstream lin(dfm::read_text_file(prefix + "_labels.txt"));
  for (int v; lin >> v;) truth.push_back(v - 1);
  EXPECT_EQ(dfm::hamming_error(truth, est, 2), 0.0);
}

TEST(Cli, DetectOnGml) {
  const auto karate = (dfm::default_data_dir() / "karate.gml").string();
  const auto r = run({"detect", "--input", karate, "--k", "2", "--k0", "2", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 34u);
  for (char c : r.out) EXPECT_TRUE(c == '1' || c == '2' || c == '\n');
  EXPECT_EQ(run({"detect", "--input", karate, "--k", "2", "--k0", "3"}).code, 2);
}

TEST(Cli, RealdataKarate) {
  const auto out = scratch("karate.csv");
  const auto r = run({"realdata", "--dataset", "karate", "--reps", "2", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = dfm::parse_results_csv(dfm::read_text_file(out));
  EXPECT_EQ(rows.size(), 21u * (2 + 2));
  EXPECT_EQ(rows.front().experiment, "karate");
  EXPECT_EQ(rows.back().sigma2w, 0.2);
}

TEST(Cli, RealdataMissingFile) {
  const auto r = run({"realdata", "--dataset", "polbooks", "--data-dir",
                      scratch("empty_dir").string(), "--out", scratch("p.csv").string()});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, CheckReportsEveryGridPoint) {
  const auto r = run({"check", "--experiment", "2b"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("m=20 "), std::string::npos);
  EXPECT_NE(r.out.find("bound_holds=yes"), std::string::npos);
}
