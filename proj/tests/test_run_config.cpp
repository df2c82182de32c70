#include <gtest/gtest.h>

#include "pkghallu/pipeline.hpp"
#include "test_support.hpp"

using namespace pkghallu;
using pkghallu::testing::TempDir;
using pkghallu::testing::write_file;

namespace {

void write_inputs(const TempDir& dir) {
  write_file(dir / "models.json",
             R"([{"name":"m","params_billions":7,"is_coding":true,"knowledge_cutoff":"2023-09-01"}])");
  write_file(dir / "cat" / "pypi.csv", "name,first_seen\nrequests,2011-02-14\n");
  write_file(dir / "cat" / "pypi.csv.meta.json", R"({"registry":"pypi","snapshot_date":"2025-01-30"})");
}

}  // namespace

TEST(RunConfig, ParsesAndResolvesRelativePaths) {
  TempDir dir;
  write_inputs(dir);
  write_file(dir / "run.json", R"({"profiles":"models.json","catalogs":{"pypi":"cat/pypi.csv"},
    "languages":["python"],"repetitions":2,"sampling":{"temperature":0.1},"retry":{"max_retries":1,
    "initial_backoff_ms":5},"trial_unit":"prompt","output_dir":"out"})");
  auto c = load_run_config(dir / "run.json");
  EXPECT_EQ(c.profiles, dir / "models.json");
  EXPECT_EQ(c.catalogs.at(RegistryId::pypi), dir / "cat/pypi.csv");
  EXPECT_EQ(c.languages, std::vector<SourceLanguage>{SourceLanguage::python});
  EXPECT_EQ(c.repetitions, 2);
  EXPECT_DOUBLE_EQ(c.sampling.temperature, 0.1);
  EXPECT_EQ(c.sampling.max_tokens, 1024);
  EXPECT_EQ(c.retry.initial_backoff.count(), 5);
  EXPECT_EQ(c.trial_unit, TrialUnit::prompt);
  EXPECT_FALSE(c.matrix.has_value());
  EXPECT_EQ(c.store_path(), dir / "out" / "generations.jsonl");
  EXPECT_EQ(config_prompts(c).size(), 7u * 13u * 2u);
}

TEST(RunConfig, Errors) {
  TempDir dir;
  write_inputs(dir);
  auto expect_config_error = [&](const std::string& body) {
    write_file(dir / "run.json", body);
    EXPECT_THROW(load_run_config(dir / "run.json"), ConfigError) << body;
  };
  // Rust needs a crates catalog.
  expect_config_error(R"({"profiles":"models.json","catalogs":{"pypi":"cat/pypi.csv"},"output_dir":"o"})");
  expect_config_error(R"({"profiles":"nope.json","catalogs":{"pypi":"cat/pypi.csv"},"languages":["python"],"output_dir":"o"})");
  expect_config_error(R"({"profiles":"models.json","catalogs":{"pypi":"cat/pypi.csv"},"languages":["cobol"],"output_dir":"o"})");
  expect_config_error(R"({"profiles":"models.json","catalogs":{"pypi":"cat/pypi.csv"},"languages":["python"],"repetitions":0,"output_dir":"o"})");
  expect_config_error(R"({"profiles":"models.json","catalogs":{"pypi":"cat/pypi.csv"},"languages":["python"]})");
  write_file(dir / "run.json", "{");
  EXPECT_THROW(load_run_config(dir / "run.json"), LoadError);
}

TEST(Pipeline, AnalyzeWritesReports) {
  TempDir dir;
  write_inputs(dir);
  write_file(dir / "matrix.json", R"({"stubs":[{"id":"s","template":"<task> in <language>"}],
    "tasks":[{"id":"t1","description":"a"},{"id":"t2","description":"b","induced":true}]})");
  write_file(dir / "run.json", R"({"matrix":"matrix.json","profiles":"models.json",
    "catalogs":{"pypi":"cat/pypi.csv"},"languages":["python"],"repetitions":2,"output_dir":"out"})");
  auto c = load_run_config(dir / "run.json");
  std::filesystem::create_directories(c.output_dir);
  {
    GenerationStore store(c.store_path());
    store.append({"m", {SourceLanguage::python, "s", "t1", 1}, "import requests", "", "stop"});
    store.append({"m", {SourceLanguage::python, "s", "t1", 2}, "import fakepkg", "", "stop"});
    store.append({"m", {SourceLanguage::python, "s", "t2", 1}, "import stromberg", "", "stop"});
    store.append({"m", {SourceLanguage::python, "s", "t2", 2}, "", "", "error"});
  }
  auto out = analyze_run(c);
  ASSERT_EQ(out.cells.size(), 1u);
  EXPECT_EQ(out.cells[0].trials, 4u);
  EXPECT_EQ(out.cells[0].hallucinated_trials, 2u);
  for (auto name : {"verdicts.json", "report.json", "report.md", "plots/size_phr.csv", "plots/language_phr.csv"})
    EXPECT_TRUE(std::filesystem::exists(c.output_dir / name)) << name;
  auto set = load_verdicts(c.verdicts_path());
  EXPECT_EQ(set.verdicts.size(), 4u);
  EXPECT_TRUE(set.verdicts[2].induced);
}

TEST(RunConfig, BundledSampleLoads) {
  auto c = load_run_config(PKGHALLU_SAMPLES_DIR "/run_config.json");
  EXPECT_EQ(config_prompts(c).size(), 7u * 13u * 3u * 5u);
  auto profiles = load_profiles(c.profiles);
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_EQ(effective_cutoff(profiles[1]), Date(2024, 4, 24));
  EXPECT_EQ(profiles[1].endpoint.api_key_env, "CHAT_API_KEY");
}
