#include <gtest/gtest.h>

#include "pkghallu/pipeline.hpp"
#include "pkghallu/verdict_metrics.hpp"
#include "test_support.hpp"

using namespace pkghallu;
using pkghallu::testing::Gen;

namespace {

GenerationVerdict verdict(const std::string& model, SourceLanguage lang, const std::string& task, int rep,
                          bool hallucinated, bool induced = false) {
  return {{model, {lang, "s1", task, rep}}, {}, hallucinated, induced};
}

ModelProfile profile(const std::string& name, double params, bool coding, std::optional<double> he = {},
                     std::optional<double> mbpp = {}) {
  ModelProfile p;
  p.name = name;
  p.params_billions = params;
  p.is_coding = coding;
  p.knowledge_cutoff = Date(2023, 9, 1);
  p.humaneval = he;
  p.mbpp = mbpp;
  return p;
}

PackageCatalog pypi() {
  return PackageCatalog(RegistryId::pypi, Date(2025, 1, 30),
                        {{"requests", Date(2011, 2, 14)}, {"freshpkg", Date(2024, 9, 1)}});
}

}  // namespace

TEST(JudgeGeneration, FlagsAbsentAndLatePackages) {
  auto cfg = ExtractionConfig::with_default_builtins();
  Generation g{"m", {SourceLanguage::python, "s", "t", 1}, "import os\nimport requests\nimport securehashlib\n", "", ""};
  auto v = judge_generation(g, SourceLanguage::python, pypi(), Date(2023, 9, 1), cfg);
  EXPECT_TRUE(v.hallucinated);
  ASSERT_EQ(v.packages.size(), 2u);
  EXPECT_EQ(v.packages[0].verdict.status, LookupStatus::registered_before_cutoff);
  EXPECT_EQ(v.packages[1].verdict.status, LookupStatus::not_registered);

  g.raw_text = "import freshpkg";
  EXPECT_TRUE(judge_generation(g, SourceLanguage::python, pypi(), Date(2023, 9, 1), cfg).hallucinated);
  EXPECT_FALSE(judge_generation(g, SourceLanguage::python, pypi(), Date(2024, 9, 1), cfg).hallucinated);

  g.raw_text = "";
  auto empty = judge_generation(g, SourceLanguage::python, pypi(), Date(2023, 9, 1), cfg, true);
  EXPECT_FALSE(empty.hallucinated);
  EXPECT_TRUE(empty.induced);
}

TEST(JudgeGeneration, LanguageAndCatalogMustAgree) {
  auto cfg = ExtractionConfig::with_default_builtins();
  Generation g{"m", {SourceLanguage::python, "s", "t", 1}, "import x", "", ""};
  EXPECT_THROW(judge_generation(g, SourceLanguage::rust, pypi(), Date(2023, 9, 1), cfg), InputError);
  g.prompt.language = SourceLanguage::rust;
  EXPECT_THROW(judge_generation(g, SourceLanguage::python, pypi(), Date(2023, 9, 1), cfg), InputError);
}

TEST(Phr, FortyThreeOfHundred) {
  std::vector<GenerationVerdict> v;
  for (int i = 0; i < 100; ++i) v.push_back(verdict("m", SourceLanguage::python, "t", i + 1, i < 43));
  EXPECT_DOUBLE_EQ(phr(v), 0.43);
  EXPECT_THROW(phr(std::vector<GenerationVerdict>{}), InputError);
}

TEST(PhrTable, GenerationAndPromptUnits) {
  std::vector<GenerationVerdict> v{
      verdict("b", SourceLanguage::python, "t1", 1, true),  verdict("b", SourceLanguage::python, "t1", 2, false),
      verdict("b", SourceLanguage::python, "t2", 1, false), verdict("b", SourceLanguage::python, "t2", 2, false),
      verdict("a", SourceLanguage::rust, "t1", 1, true),
  };
  auto cells = phr_table(v);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0], PhrCell::from_counts("a", SourceLanguage::rust, 1, 1));
  EXPECT_EQ(cells[1], PhrCell::from_counts("b", SourceLanguage::python, 4, 1));
  EXPECT_DOUBLE_EQ(cells[1].percent(), 25.0);

  auto per_prompt = phr_table(v, TrialUnit::prompt);
  EXPECT_EQ(per_prompt[1], PhrCell::from_counts("b", SourceLanguage::python, 2, 1));
  EXPECT_THROW(PhrCell::from_counts("x", SourceLanguage::rust, 0, 0), InputError);
  EXPECT_THROW(PhrCell::from_counts("x", SourceLanguage::rust, 2, 3), InputError);
}

TEST(PhrTableProperty, CountsAreConsistent) {
  Gen g(77);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<GenerationVerdict> v;
    for (int i = 0, n = g.integer(1, 80); i < n; ++i)
      v.push_back(verdict(g.pick(std::vector<std::string>{"m1", "m2", "m3"}),
                          kAllLanguages[std::size_t(g.integer(0, 2))], "t" + std::to_string(g.integer(1, 3)),
                          i, g.coin(0.3)));
    auto cells = phr_table(v);
    std::size_t trials = 0, hallucinated = 0;
    for (const auto& c : cells) {
      trials += c.trials;
      hallucinated += c.hallucinated_trials;
      EXPECT_GE(c.phr, 0.0);
      EXPECT_LE(c.phr, 1.0);
    }
    EXPECT_EQ(trials, v.size());
    EXPECT_EQ(hallucinated, std::size_t(std::count_if(v.begin(), v.end(), [](auto& x) { return x.hallucinated; })));
    // Collapsing repetitions never adds trials or hits, and keeps a cell clean iff it was clean.
    auto collapsed = phr_table(v, TrialUnit::prompt);
    ASSERT_EQ(collapsed.size(), cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      EXPECT_LE(collapsed[i].trials, cells[i].trials);
      EXPECT_LE(collapsed[i].hallucinated_trials, cells[i].hallucinated_trials);
      EXPECT_EQ(collapsed[i].hallucinated_trials == 0, cells[i].hallucinated_trials == 0);
    }
  }
}

TEST(Metrics, AveragesGroupsAndCorrelations) {
  std::vector<ModelProfile> profiles{profile("a", 1, true, 30, 40), profile("b", 10, true, 50),
                                     profile("c", 100, false, 70, 60), profile("d", 1000, false, 80, 70)};
  std::vector<PhrCell> cells;
  const std::map<std::string, std::array<std::size_t, 3>> counts{
      {"a", {40, 30, 20}}, {"b", {30, 20, 10}}, {"c", {12, 8, 4}}, {"d", {6, 3, 0}}};
  for (const auto& [m, k] : counts)
    for (std::size_t i = 0; i < 3; ++i) cells.push_back(PhrCell::from_counts(m, kAllLanguages[i], 100, k[i]));

  auto avg = model_average_phr(cells);
  EXPECT_DOUBLE_EQ(avg["a"], 30.0);
  EXPECT_DOUBLE_EQ(avg["d"], 3.0);
  EXPECT_EQ(language_column(cells, SourceLanguage::javascript), (std::vector<double>{30, 20, 8, 3}));

  auto py = group_comparison(cells, profiles, SourceLanguage::python);
  EXPECT_DOUBLE_EQ(py.coding.mean, 35.0);
  EXPECT_DOUBLE_EQ(py.non_coding.mean, 9.0);
  auto overall = overall_group_comparison(cells, profiles);
  EXPECT_EQ(overall.coding.n, 6u);
  EXPECT_NEAR(overall.coding.mean, 25.0, 1e-12);

  auto pooled = size_correlation(cells, profiles, SizeScale::log);
  EXPECT_EQ(pooled.n, 12u);
  EXPECT_LT(pooled.rho, -0.8);
  EXPECT_EQ(size_vs_average_correlation(avg, profiles).n, 4u);

  auto bench = benchmark_correlation(profiles, avg);
  EXPECT_EQ(bench.humaneval.n, 4u);
  EXPECT_EQ(bench.mbpp.n, 3u);  // b has no MBPP score
  EXPECT_LT(bench.humaneval.rho, -0.9);

  EXPECT_THROW(find_profile(profiles, "zzz"), InputError);
  std::vector<ModelProfile> only_coding{profiles[0], profiles[1]};
  std::vector<PhrCell> coding_cells(cells.begin(), cells.begin() + 6);
  EXPECT_THROW(group_comparison(coding_cells, only_coding, SourceLanguage::python), InputError);
}

TEST(Metrics, InducedSplit) {
  std::vector<GenerationVerdict> v{verdict("m", SourceLanguage::python, "t1", 1, true, true),
                                   verdict("m", SourceLanguage::python, "t1", 2, false, true),
                                   verdict("m", SourceLanguage::python, "t2", 1, false),
                                   verdict("m", SourceLanguage::python, "t2", 2, false),
                                   verdict("m", SourceLanguage::python, "t2", 3, true)};
  auto s = induced_split(v);
  EXPECT_EQ(s.induced_trials, 2u);
  EXPECT_EQ(s.natural_trials, 3u);
  EXPECT_DOUBLE_EQ(*s.induced, 0.5);
  EXPECT_DOUBLE_EQ(*s.natural, 1.0 / 3.0);
  v.resize(0);
  EXPECT_FALSE(induced_split(v).induced.has_value());
}

TEST(JudgeGenerations, ParallelMatchesSerialAndKeepsOrder) {
  auto prompts = build_prompts({{"s1", "<task> in <language>"}}, {{"t1", "a", false}, {"t2", "b", true}},
                               {SourceLanguage::python}, 200);
  std::vector<ModelProfile> profiles{profile("m", 7, true)};
  std::map<RegistryId, PackageCatalog> catalogs;
  catalogs.emplace(RegistryId::pypi, pypi());
  std::vector<Generation> gens;
  for (std::size_t i = 0; i < prompts.size(); ++i)
    gens.push_back({"m", PromptRef::of(prompts[i]), i % 3 ? "import requests" : "import nothere", "", "stop"});
  auto cfg = ExtractionConfig::with_default_builtins();
  auto serial = judge_generations(gens, prompts, profiles, catalogs, cfg, 1);
  auto parallel = judge_generations(gens, prompts, profiles, catalogs, cfg, 4);
  ASSERT_EQ(serial.size(), gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    EXPECT_EQ(parallel[i].key, gens[i].key());
    EXPECT_EQ(parallel[i].hallucinated, serial[i].hallucinated);
    EXPECT_EQ(parallel[i].hallucinated, i % 3 == 0);
    EXPECT_EQ(parallel[i].induced, prompts[i].induced);
  }

  gens.push_back({"m", {SourceLanguage::python, "s1", "t9", 1}, "", "", ""});
  EXPECT_THROW(judge_generations(gens, prompts, profiles, catalogs, cfg, 4), InputError);
  gens.back() = {"ghost", PromptRef::of(prompts[0]), "", "", ""};
  EXPECT_THROW(judge_generations(gens, prompts, profiles, catalogs, cfg, 1), InputError);
}
