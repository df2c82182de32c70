// Runs the built pkghallu binary and checks exit codes and output.

#include <sys/wait.h>

#include <cstdlib>
#include <set>

#include <gtest/gtest.h>

#include "pkghallu/report.hpp"
#include "test_support.hpp"

using pkghallu::testing::read_file;
using pkghallu::testing::TempDir;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli(const std::string& args) {
  TempDir tmp;
  auto out = tmp / "out.txt", err = tmp / "err.txt";
  std::string cmd =
      std::string("'") + PKGHALLU_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_file(out), read_file(err)};
}

const std::string kSamples = PKGHALLU_SAMPLES_DIR;
const std::string kPypi = "--catalog " + kSamples + "/catalogs/pypi.csv";
const std::string kAllCatalogs = kPypi + " --catalog npm=" + kSamples + "/catalogs/npm.csv --catalog " + kSamples +
                                 "/catalogs/crates.csv";

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
  EXPECT_EQ(cli("scan " + kSamples + "/bad.py").status, 2);  // --catalog missing
  EXPECT_EQ(cli("report -i x.json -f html").status, 2);
  EXPECT_EQ(cli("analyze").status, 2);
  EXPECT_EQ(cli("--help").status, 0);
}

TEST(Cli, ScanFlagsHallucinatedImport) {
  auto r = cli("scan " + kSamples + "/bad.py " + kPypi);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("bad.py:5: hallucinated: 'securehashlib'"), std::string::npos) << r.out;
}

TEST(Cli, ScanCleanFileExitsZero) {
  auto r = cli("scan " + kSamples + "/clean.py " + kPypi);
  EXPECT_EQ(r.status, 0) << r.out;
}

TEST(Cli, ScanJsonOverAllSamples) {
  auto r = cli("scan " + kSamples + "/bad.py " + kSamples + "/server.js " + kSamples + "/main.rs " + kAllCatalogs +
               " --format json");
  EXPECT_EQ(r.status, 1);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["files_scanned"], 3);
  std::set<std::string> flagged;
  for (const auto& f : j["findings"])
    if (f["severity"] != "ok") flagged.insert(f["normalized"].get<std::string>());
  EXPECT_EQ(flagged, (std::set<std::string>{"securehashlib", "quick-secure-hash", "tokio-fast-db"}));
}

TEST(Cli, ScanMissingCatalogFileIsRuntimeFailure) {
  EXPECT_EQ(cli("scan " + kSamples + "/bad.py --catalog /nonexistent/pypi.csv").status, 1);
}

TEST(Cli, ReportRendersMarkdown) {
  TempDir dir;
  pkghallu::GenerationVerdict v{{"m", {pkghallu::SourceLanguage::python, "s", "t", 1}}, {}, false, false};
  pkghallu::save_verdicts(dir / "v.json", {v});
  auto r = cli("report -i " + (dir / "v.json").string() + " -f md");
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("| m | Python | 1 | 0 | 0.00 |"), std::string::npos) << r.out;
  EXPECT_EQ(cli("report -i " + (dir / "missing.json").string() + " -f md").status, 1);
}

TEST(Cli, CatalogStats) {
  auto r = cli("catalog stats " + kSamples + "/catalogs/pypi.csv --json");
  EXPECT_EQ(r.status, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["packages"], 4);
  EXPECT_EQ(j["snapshot_date"], "2025-01-30");
}

TEST(Cli, FixtureReproductionReportsEveryCriterion) {
  TempDir dir;
  auto r = cli("analyze --fixtures paper --format json -o " + dir.path().string());
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(r.status, j["passed"].get<bool>() ? 0 : 1);
  EXPECT_TRUE(std::filesystem::exists(dir / "reproduction.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plots" / "size_phr.csv"));
}
