#include <set>

#include <gtest/gtest.h>

#include "pkghallu/generation_store.hpp"
#include "pkghallu/prompt_factory.hpp"
#include "test_support.hpp"

using namespace pkghallu;
using pkghallu::testing::Gen;
using pkghallu::testing::read_file;
using pkghallu::testing::TempDir;
using pkghallu::testing::write_file;

TEST(BuildPrompts, CountOrderAndSubstitution) {
  std::vector<RequestStub> stubs{{"s1", "Write <language> code to <task>."}, {"s2", "<task> (<language>)"}};
  std::vector<CodingTask> tasks{{"t1", "parse a file", false}, {"t2", "talk to StrombergDB", true}};
  std::vector<SourceLanguage> langs{SourceLanguage::rust, SourceLanguage::python};
  auto prompts = build_prompts(stubs, tasks, langs, 3);
  ASSERT_EQ(prompts.size(), 2u * 2u * 2u * 3u);
  EXPECT_EQ(prompts[0].text, "Write Rust code to parse a file.");
  EXPECT_EQ(prompts[0].language, SourceLanguage::rust);
  EXPECT_EQ(prompts[0].repetition, 1);
  EXPECT_EQ(prompts[2].repetition, 3);
  EXPECT_EQ(prompts[3].task_id, "t2");
  EXPECT_TRUE(prompts[3].induced);
  EXPECT_EQ(prompts[6].stub_id, "s2");
  EXPECT_EQ(prompts[6].text, "parse a file (Rust)");
  EXPECT_EQ(prompts[12].language, SourceLanguage::python);
  EXPECT_EQ(prompts[12].text, "Write Python code to parse a file.");
}

TEST(BuildPrompts, ZeroRepetitionsOrEmptyInputsGiveNothing) {
  std::vector<RequestStub> stubs{{"s", "<task>"}};
  std::vector<CodingTask> tasks{{"t", "x", false}};
  EXPECT_TRUE(build_prompts(stubs, tasks, {SourceLanguage::python}, 0).empty());
  EXPECT_TRUE(build_prompts(stubs, tasks, {}, 5).empty());
  EXPECT_TRUE(build_prompts({}, tasks, {SourceLanguage::python}, 5).empty());
  EXPECT_THROW(build_prompts(stubs, tasks, {SourceLanguage::python}, -1), InputError);
}

TEST(BuildPrompts, MatrixErrors) {
  std::vector<CodingTask> tasks{{"t", "x", false}};
  EXPECT_THROW(build_prompts({{"s", "no placeholder for <language>"}}, tasks, {SourceLanguage::python}, 1),
               ConfigError);
  EXPECT_THROW(build_prompts({{"s", "<task>"}, {"s", "<task>!"}}, tasks, {SourceLanguage::python}, 1), ConfigError);
  EXPECT_THROW(build_prompts({{"s", "<task>"}}, {{"t", "a", false}, {"t", "b", false}}, {SourceLanguage::python}, 1),
               ConfigError);
  EXPECT_THROW(build_prompts({{"s", "<task>"}}, {{"t", "", false}}, {SourceLanguage::python}, 1), ConfigError);
}

TEST(DefaultMatrix, SevenStubsThirteenTasksOneInduced) {
  auto m = default_matrix();
  EXPECT_EQ(m.stubs.size(), 7u);
  ASSERT_EQ(m.tasks.size(), 13u);
  std::vector<std::string> induced;
  for (const auto& t : m.tasks)
    if (t.induced) induced.push_back(t.id);
  ASSERT_EQ(induced.size(), 1u);
  auto all = build_prompts(m.stubs, m.tasks, {kAllLanguages.begin(), kAllLanguages.end()}, 5);
  EXPECT_EQ(all.size(), 7u * 13u * 3u * 5u);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m)).stubs.size(), 7u);
}

TEST(BuildPromptsProperty, CountNoPlaceholdersDeterministic) {
  Gen g(1234);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<RequestStub> stubs;
    for (int i = 0, n = g.integer(0, 4); i < n; ++i) {
      std::string t = g.from_alphabet("ab <>", 0, 6) + "<task>" + (g.coin() ? " in <language>" : "") +
                      (g.coin() ? " <task>" : "");
      stubs.push_back({"s" + std::to_string(i), t});
    }
    std::vector<CodingTask> tasks;
    for (int i = 0, n = g.integer(0, 5); i < n; ++i)
      tasks.push_back({"t" + std::to_string(i), g.from_alphabet("xyz ", 1, 8), g.coin(0.2)});
    std::vector<SourceLanguage> langs;
    for (auto l : kAllLanguages)
      if (g.coin()) langs.push_back(l);
    int reps = g.integer(0, 4);

    auto prompts = build_prompts(stubs, tasks, langs, reps);
    ASSERT_EQ(prompts.size(), stubs.size() * tasks.size() * langs.size() * std::size_t(reps));
    std::set<std::tuple<SourceLanguage, std::string, std::string, int>> keys;
    for (const auto& p : prompts) {
      EXPECT_EQ(p.text.find("<task>"), std::string::npos);
      EXPECT_EQ(p.text.find("<language>"), std::string::npos);
      EXPECT_TRUE(keys.emplace(p.language, p.stub_id, p.task_id, p.repetition).second);
    }
    auto again = build_prompts(stubs, tasks, langs, reps);
    ASSERT_EQ(again.size(), prompts.size());
    for (std::size_t i = 0; i < prompts.size(); ++i) EXPECT_EQ(again[i].text, prompts[i].text);
    EXPECT_EQ(matrix_hash(again), matrix_hash(prompts));
  }
}

namespace {

Generation gen(const std::string& model, const std::string& task, int rep, const std::string& text = "x") {
  return {model, {SourceLanguage::python, "s1", task, rep}, text, "2025-01-01T00:00:00Z", "stop"};
}

}  // namespace

TEST(GenerationStore, AppendIsIdempotentPerKeyAndSurvivesReopen) {
  TempDir dir;
  auto path = dir / "g.jsonl";
  {
    GenerationStore s(path);
    EXPECT_TRUE(s.append(gen("m", "t1", 1, "first")));
    EXPECT_FALSE(s.append(gen("m", "t1", 1, "second")));
    EXPECT_TRUE(s.append(gen("m", "t1", 2)));
    EXPECT_EQ(s.size(), 2u);
  }
  GenerationStore s(path);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(gen("m", "t1", 1).key()));
  EXPECT_EQ(s.records()[0].raw_text, "first");
  EXPECT_EQ(load_generations(path), s.records());
}

TEST(GenerationStore, PartialTailIsDroppedOnResume) {
  TempDir dir;
  auto path = dir / "g.jsonl";
  {
    GenerationStore s(path);
    s.append(gen("m", "t1", 1));
  }
  auto good = read_file(path);
  write_file(path, good + R"({"model":"m","language":"pyth)");
  EXPECT_EQ(load_generations(path).size(), 1u);
  {
    GenerationStore s(path);
    EXPECT_EQ(s.size(), 1u);
    s.append(gen("m", "t1", 2));
  }
  EXPECT_EQ(load_generations(path).size(), 2u);
  auto text = read_file(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(GenerationStore, CompleteTailWithoutNewlineIsKept) {
  TempDir dir;
  auto path = dir / "g.jsonl";
  write_file(path, generation_to_json(gen("m", "t1", 1)).dump());
  {
    GenerationStore s(path);
    EXPECT_EQ(s.size(), 1u);
    s.append(gen("m", "t1", 2));
  }
  EXPECT_EQ(load_generations(path).size(), 2u);
}

TEST(GenerationStore, CorruptMiddleLineIsALoadError) {
  TempDir dir;
  auto path = dir / "g.jsonl";
  write_file(path, generation_to_json(gen("m", "t1", 1)).dump() + "\ngarbage\n" +
                       generation_to_json(gen("m", "t1", 2)).dump() + "\n");
  try {
    GenerationStore s(path);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_generations(path), LoadError);
}

TEST(GenerationStore, JsonRoundTrip) {
  auto g = gen("m", "t", 4, "import os\n\"quoted\" ✓");
  EXPECT_EQ(generation_from_json(generation_to_json(g)), g);
}
