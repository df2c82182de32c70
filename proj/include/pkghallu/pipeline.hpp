#pragma once

// Glue between a RunConfig and the probe / judge / report stages.

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stop_token>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pkghallu/error.hpp"
#include "pkghallu/generation_store.hpp"
#include "pkghallu/import_extract.hpp"
#include "pkghallu/model_profile.hpp"
#include "pkghallu/probe_runner.hpp"
#include "pkghallu/prompt_factory.hpp"
#include "pkghallu/registry_catalog.hpp"
#include "pkghallu/report.hpp"
#include "pkghallu/run_config.hpp"
#include "pkghallu/verdict_metrics.hpp"

namespace pkghallu {

inline PromptMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open prompt matrix");
  try {
    return matrix_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string(), 0, e.what());
  }
}

inline std::vector<Prompt> config_prompts(const RunConfig& c) {
  auto m = c.matrix ? load_matrix(*c.matrix) : default_matrix();
  return build_prompts(m.stubs, m.tasks, c.languages, c.repetitions);
}

inline ExtractionConfig config_extraction(const RunConfig& c) {
  return c.builtins_dir ? ExtractionConfig::from_directory(*c.builtins_dir) : ExtractionConfig::with_default_builtins();
}

inline ProbeSummary run_configured_probe(const RunConfig& c, std::stop_token stop = {},
                                         std::function<void(const Generation&)> on_record = {}) {
  auto profiles = load_profiles(c.profiles);
  auto prompts = config_prompts(c);
  std::filesystem::create_directories(c.output_dir);

  RunMetadata meta{matrix_hash(prompts), prompts.size(), c.sampling, c.parallelism, {}};
  for (const auto& p : profiles) meta.models.push_back(p.name);
  write_run_metadata(c.store_path(), meta);

  GenerationStore store(c.store_path());
  ProbeOptions opt;
  opt.parallelism = c.parallelism;
  opt.sampling = c.sampling;
  opt.retry = c.retry;
  opt.timeout = c.timeout;
  opt.stop = stop;
  opt.on_record = std::move(on_record);
  return run_probe(profiles, prompts, store, opt);
}

// Judges every generation against its language's catalog at its model's
// cutoff. Generations must belong to a known model and to a prompt of the
// matrix. Work fans out over threads; output order follows the input.
inline std::vector<GenerationVerdict> judge_generations(const std::vector<Generation>& generations,
                                                        const std::vector<Prompt>& prompts,
                                                        const std::vector<ModelProfile>& profiles,
                                                        const std::map<RegistryId, PackageCatalog>& catalogs,
                                                        const ExtractionConfig& config, int threads = 0) {
  std::map<PromptRef, const Prompt*> by_ref;
  for (const auto& p : prompts) by_ref.emplace(PromptRef::of(p), &p);
  std::map<std::string, Date> cutoffs;
  for (const auto& p : profiles) cutoffs.emplace(p.name, effective_cutoff(p));

  std::vector<GenerationVerdict> out(generations.size());
  auto judge_one = [&](std::size_t i) {
    const auto& g = generations[i];
    auto prompt = by_ref.find(g.prompt);
    if (prompt == by_ref.end())
      throw InputError("generation " + g.model + "/" + g.prompt.stub_id + "/" + g.prompt.task_id +
                       " does not belong to the configured prompt matrix");
    auto cutoff = cutoffs.find(g.model);
    if (cutoff == cutoffs.end()) throw InputError("generation from unknown model '" + g.model + "'");
    auto catalog = catalogs.find(registry_for(g.prompt.language));
    if (catalog == catalogs.end())
      throw InputError("no catalog for " + std::string(to_string(registry_for(g.prompt.language))));
    out[i] = judge_generation(g, g.prompt.language, catalog->second, cutoff->second, config,
                              prompt->second->induced);
  };

  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, int(std::max<std::size_t>(1, generations.size() / 64)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < generations.size(); ++i) judge_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < generations.size();) {
          try {
            judge_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = generations.size();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct AnalysisOutput {
  std::vector<GenerationVerdict> verdicts;
  std::vector<PhrCell> cells;
  std::vector<ModelProfile> profiles;
};

// Judges the run's store and writes verdicts.json, report.json, report.md and
// plots/*.csv into the output directory.
inline AnalysisOutput analyze_run(const RunConfig& c) {
  AnalysisOutput a;
  a.profiles = load_profiles(c.profiles);
  auto prompts = config_prompts(c);
  std::map<RegistryId, PackageCatalog> catalogs;
  for (auto lang : c.languages) {
    auto reg = registry_for(lang);
    if (!catalogs.contains(reg)) catalogs.emplace(reg, load_snapshot(c.catalogs.at(reg), reg));
  }
  auto generations = load_generations(c.store_path());
  a.verdicts = judge_generations(generations, prompts, a.profiles, catalogs, config_extraction(c));
  a.cells = phr_table(a.verdicts, c.trial_unit);

  VerdictSet set{a.verdicts, c.trial_unit};
  save_verdicts(c.verdicts_path(), a.verdicts, c.trial_unit);
  write_text_atomic(c.output_dir / "report.json", render_report(set, ReportFormat::json));
  write_text_atomic(c.output_dir / "report.md", render_report(set, ReportFormat::md));
  write_plot_data(c.output_dir / "plots", a.cells, a.profiles);
  return a;
}

}  // namespace pkghallu
