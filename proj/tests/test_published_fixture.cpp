#include <set>

#include <gtest/gtest.h>

#include "pkghallu/published_fixture.hpp"

using namespace pkghallu;

namespace {

double cell_percent(const std::vector<PhrCell>& cells, const std::string& model, SourceLanguage lang) {
  for (const auto& c : cells)
    if (c.model == model && c.language == lang) return c.percent();
  ADD_FAILURE() << "no cell " << model;
  return -1;
}

}  // namespace

// Values typed in from the published table, not read from the fixture.
TEST(PublishedFixture, CellsMatchThePrintedTable) {
  const auto& t = published_tables();
  EXPECT_EQ(t.trials_per_cell, 455u);
  ASSERT_EQ(t.models.size(), 11u);
  auto cells = t.cells();
  ASSERT_EQ(cells.size(), 33u);
  struct Row {
    const char* model;
    double js, rust, py;
  };
  const Row rows[] = {
      {"CodeGemma", 23.74, 42.20, 33.85},        {"Dracarys", 20.44, 15.38, 2.42},
      {"GPT-4o", 1.76, 10.99, 3.52},             {"Granite-3.0", 24.62, 42.86, 46.15},
      {"Llama-3.1-8B", 11.43, 28.79, 5.49},      {"Llama-3.1-70B", 24.40, 18.02, 25.93},
      {"Mamba-Codestral", 14.95, 14.29, 33.85},  {"Minitron-Mistral", 10.77, 24.62, 33.41},
      {"Nemotron-Llama-3.1", 0.22, 0.22, 4.84}, {"Qwen2.5-Coder", 15.16, 43.08, 38.02},
      {"StarCoder2", 14.51, 31.65, 27.03},
  };
  for (const auto& r : rows) {
    EXPECT_NEAR(cell_percent(cells, r.model, SourceLanguage::javascript), r.js, 0.005) << r.model;
    EXPECT_NEAR(cell_percent(cells, r.model, SourceLanguage::rust), r.rust, 0.005) << r.model;
    EXPECT_NEAR(cell_percent(cells, r.model, SourceLanguage::python), r.py, 0.005) << r.model;
  }
}

TEST(PublishedFixture, ReportedFiguresMatchThePrintedText) {
  const auto& rep = published_tables().reported;
  EXPECT_EQ(rep["language_stddev"]["python"], 16.03);
  EXPECT_EQ(rep["language_stddev"]["javascript"], 8.43);
  EXPECT_EQ(rep["language_mean"]["rust"], 24.74);
  EXPECT_EQ(rep["group"]["javascript"]["coding_stddev"], 4.59);
  EXPECT_EQ(rep["group"]["python"]["noncoding_stddev"], 13.5);
  EXPECT_EQ(rep["overall_group"]["coding_mean"], 26.9);
  EXPECT_EQ(rep["overall_group"]["noncoding_stddev"], 11.41);
  EXPECT_EQ(rep["size_correlation"]["rho"], -0.541);
  EXPECT_EQ(rep["size_correlation"]["p_value"], 0.00114);
  EXPECT_EQ(rep["log_size_correlation"]["p_value"], 0.00028);
  EXPECT_EQ(rep["humaneval_correlation"]["rho"], -0.7887);
  EXPECT_EQ(rep["mbpp_correlation"]["rho"], -0.2919);
}

TEST(PublishedFixture, LanguageColumnsReproduce) {
  const auto& t = published_tables();
  auto cells = t.cells();
  auto py = stats::summarize(language_column(cells, SourceLanguage::python));
  auto js = stats::summarize(language_column(cells, SourceLanguage::javascript));
  auto rs = stats::summarize(language_column(cells, SourceLanguage::rust));
  EXPECT_NEAR(py.mean, 23.14, 0.01);
  EXPECT_NEAR(py.sample_stddev, 16.03, 0.01);
  EXPECT_NEAR(js.mean, 14.73, 0.01);
  EXPECT_NEAR(js.sample_stddev, 8.43, 0.01);
  EXPECT_NEAR(rs.mean, 24.74, 0.01);
  EXPECT_NEAR(rs.sample_stddev, 14.37, 0.01);
  EXPECT_NEAR(py.median, 27.033, 0.001);
}

TEST(PublishedFixture, GroupMeansAndCorrelationsReproduce) {
  const auto& t = published_tables();
  auto cells = t.cells();
  auto profiles = t.profiles();
  EXPECT_NEAR(group_comparison(cells, profiles, SourceLanguage::javascript).coding.mean, 18.90, 0.01);
  EXPECT_NEAR(group_comparison(cells, profiles, SourceLanguage::rust).non_coding.mean, 16.53, 0.01);
  EXPECT_NEAR(group_comparison(cells, profiles, SourceLanguage::python).coding.mean, 30.22, 0.01);
  auto overall = overall_group_comparison(cells, profiles);
  EXPECT_NEAR(overall.coding.mean, 26.90, 0.01);
  EXPECT_NEAR(overall.non_coding.mean, 13.63, 0.01);

  auto lin = size_correlation(cells, profiles, SizeScale::linear);
  EXPECT_NEAR(lin.rho, -0.541, 0.005);
  EXPECT_NEAR(lin.p_value, 0.00114, 0.0005);
  auto log = size_correlation(cells, profiles, SizeScale::log);
  EXPECT_NEAR(log.rho, -0.593, 0.005);
  EXPECT_NEAR(log.p_value, 0.00028, 0.0002);
  EXPECT_NEAR(benchmark_correlation(profiles, model_average_phr(cells)).humaneval.rho, -0.7887, 0.005);
}

TEST(PublishedFixture, ReproductionReportListsEveryCriterion) {
  auto r = reproduce_published(published_tables());
  std::set<int> criteria;
  for (const auto& c : r.checks) criteria.insert(c.criterion);
  EXPECT_EQ(criteria, (std::set<int>{1, 2, 3, 4}));
  auto j = r.to_json();
  EXPECT_EQ(j["checks"].size(), r.checks.size());
  EXPECT_EQ(j["passed"].get<bool>(), r.passed());
  for (const auto& c : r.checks)
    if (c.criterion == 1 && c.expected) EXPECT_TRUE(c.passed) << c.name;
}

TEST(PublishedFixture, CountsMustMatchPrintedRates) {
  auto doc = nlohmann::json::parse(embedded::published_tables);
  EXPECT_NO_THROW(published_tables_from_json(doc));
  doc["models"][0]["hallucinated_trials"]["rust"] = 193;
  EXPECT_THROW(published_tables_from_json(doc), ConfigError);
}
