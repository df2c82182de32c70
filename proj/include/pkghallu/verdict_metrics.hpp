#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <set>
#include <string>
#include <vector>

#include "pkghallu/date.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/generation_store.hpp"
#include "pkghallu/import_extract.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/model_profile.hpp"
#include "pkghallu/registry_catalog.hpp"
#include "pkghallu/statistics.hpp"

namespace pkghallu {

struct JudgedPackage {
  PackageRef ref;
  LookupVerdict verdict;

  friend bool operator==(const JudgedPackage&, const JudgedPackage&) = default;
};

struct GenerationVerdict {
  GenerationKey key;
  std::vector<JudgedPackage> packages;
  bool hallucinated = false;  // at least one package absent or registered after the cutoff
  bool induced = false;

  friend bool operator==(const GenerationVerdict&, const GenerationVerdict&) = default;
};

inline GenerationVerdict judge_generation(const Generation& gen, SourceLanguage language,
                                          const PackageCatalog& catalog, Date cutoff,
                                          const ExtractionConfig& config, bool induced = false) {
  if (catalog.registry() != registry_for(language))
    throw InputError("catalog for " + std::string(to_string(catalog.registry())) + " cannot judge " +
                     std::string(to_string(language)) + " output");
  if (gen.prompt.language != language)
    throw InputError("generation language does not match the requested language");
  GenerationVerdict v{gen.key(), {}, false, induced};
  if (gen.raw_text.empty()) return v;
  for (auto& ref : extract_imports(gen.raw_text, language, config)) {
    auto verdict = lookup(catalog, ref.normalized, cutoff);
    v.hallucinated = v.hallucinated || verdict.hallucinated();
    v.packages.push_back({std::move(ref), verdict});
  }
  return v;
}

// What counts as one trial in a PHR denominator.
enum class TrialUnit {
  generation,  // every (prompt, repetition) response
  prompt,      // repetitions of the same prompt collapse; hallucinated if any repetition is
};

inline double phr(std::span<const GenerationVerdict> verdicts) {
  if (verdicts.empty()) throw InputError("PHR of an empty verdict set is undefined");
  auto n = std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.hallucinated; });
  return double(n) / double(verdicts.size());
}

struct PhrCell {
  std::string model;
  SourceLanguage language = SourceLanguage::python;
  std::size_t trials = 0;
  std::size_t hallucinated_trials = 0;
  double phr = 0;

  static PhrCell from_counts(std::string model, SourceLanguage lang, std::size_t trials,
                             std::size_t hallucinated) {
    if (trials == 0) throw InputError("PHR cell needs at least one trial");
    if (hallucinated > trials) throw InputError("hallucinated trials exceed trials");
    return {std::move(model), lang, trials, hallucinated, double(hallucinated) / double(trials)};
  }

  double percent() const { return 100.0 * phr; }

  friend bool operator==(const PhrCell&, const PhrCell&) = default;
};

// One cell per (model, language) present, ordered by model then language.
inline std::vector<PhrCell> phr_table(std::span<const GenerationVerdict> verdicts,
                                      TrialUnit unit = TrialUnit::generation) {
  struct Counts {
    std::size_t trials = 0, hallucinated = 0;
  };
  std::map<std::pair<std::string, SourceLanguage>, Counts> cells;
  if (unit == TrialUnit::generation) {
    for (const auto& v : verdicts) {
      auto& c = cells[{v.key.model, v.key.prompt.language}];
      ++c.trials;
      c.hallucinated += v.hallucinated;
    }
  } else {
    std::map<std::tuple<std::string, SourceLanguage, std::string, std::string>, bool> prompts;
    for (const auto& v : verdicts) {
      auto& any = prompts[{v.key.model, v.key.prompt.language, v.key.prompt.stub_id, v.key.prompt.task_id}];
      any = any || v.hallucinated;
    }
    for (const auto& [k, any] : prompts) {
      auto& c = cells[{std::get<0>(k), std::get<1>(k)}];
      ++c.trials;
      c.hallucinated += any;
    }
  }
  std::vector<PhrCell> out;
  for (const auto& [k, c] : cells) out.push_back(PhrCell::from_counts(k.first, k.second, c.trials, c.hallucinated));
  return out;
}

// PHR percentages of every model for one language, in cell order.
inline std::vector<double> language_column(std::span<const PhrCell> cells, SourceLanguage lang) {
  std::vector<double> out;
  for (const auto& c : cells)
    if (c.language == lang) out.push_back(c.percent());
  return out;
}

// Mean PHR percentage across the languages present for each model.
inline std::map<std::string, double> model_average_phr(std::span<const PhrCell> cells) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& c : cells) {
    auto& [sum, n] = acc[c.model];
    sum += c.percent();
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [m, a] : acc) out[m] = a.first / a.second;
  return out;
}

inline const ModelProfile& find_profile(std::span<const ModelProfile> profiles, const std::string& name) {
  for (const auto& p : profiles)
    if (p.name == name) return p;
  throw InputError("no profile for model '" + name + "'");
}

struct GroupComparison {
  stats::GroupStats coding;
  stats::GroupStats non_coding;
  double t_statistic = 0;
  double degrees_of_freedom = 0;
  double p_value = 1;
};

namespace detail {
inline GroupComparison compare_groups(const std::vector<double>& coding, const std::vector<double>& other) {
  if (coding.empty() || other.empty()) throw InputError("group comparison needs both coding and non-coding models");
  auto w = stats::welch_t_test(coding, other);
  return {w.group_a, w.group_b, w.t_statistic, w.degrees_of_freedom, w.p_value};
}
}  // namespace detail

// Coding vs non-coding models for one language, Welch two-sided.
inline GroupComparison group_comparison(std::span<const PhrCell> cells, std::span<const ModelProfile> profiles,
                                        SourceLanguage language) {
  std::vector<double> coding, other;
  for (const auto& c : cells) {
    if (c.language != language) continue;
    (find_profile(profiles, c.model).is_coding ? coding : other).push_back(c.percent());
  }
  return detail::compare_groups(coding, other);
}

// Coding vs non-coding over every model x language cell.
inline GroupComparison overall_group_comparison(std::span<const PhrCell> cells,
                                                std::span<const ModelProfile> profiles) {
  std::vector<double> coding, other;
  for (const auto& c : cells) (find_profile(profiles, c.model).is_coding ? coding : other).push_back(c.percent());
  return detail::compare_groups(coding, other);
}

enum class SizeScale { linear, log };

// Parameter count against PHR with one point per model x language cell.
inline stats::CorrelationResult size_correlation(std::span<const PhrCell> cells,
                                                 std::span<const ModelProfile> profiles,
                                                 SizeScale scale = SizeScale::linear) {
  std::vector<double> x, y;
  for (const auto& c : cells) {
    double params = find_profile(profiles, c.model).params_billions;
    x.push_back(scale == SizeScale::log ? std::log(params) : params);
    y.push_back(c.percent());
  }
  return stats::pearson(x, y);
}

// Parameter count against each model's average PHR (one point per model).
inline stats::CorrelationResult size_vs_average_correlation(const std::map<std::string, double>& avg_phr,
                                                            std::span<const ModelProfile> profiles,
                                                            SizeScale scale = SizeScale::linear) {
  std::vector<double> x, y;
  for (const auto& [model, phr] : avg_phr) {
    double params = find_profile(profiles, model).params_billions;
    x.push_back(scale == SizeScale::log ? std::log(params) : params);
    y.push_back(phr);
  }
  return stats::pearson(x, y);
}

struct BenchmarkCorrelation {
  stats::CorrelationResult humaneval;
  stats::CorrelationResult mbpp;
};

// Models without the respective score are left out of that correlation.
inline BenchmarkCorrelation benchmark_correlation(std::span<const ModelProfile> profiles,
                                                  const std::map<std::string, double>& avg_phr) {
  auto correlate = [&](auto score_of, const char* what) {
    std::vector<double> x, y;
    for (const auto& [model, phr] : avg_phr) {
      auto score = score_of(find_profile(profiles, model));
      if (!score) continue;
      x.push_back(*score);
      y.push_back(phr);
    }
    if (x.size() < 3) throw InputError(std::string("fewer than 3 models with a ") + what + " score");
    return stats::pearson(x, y);
  };
  return {correlate([](const ModelProfile& p) { return p.humaneval; }, "HumanEval"),
          correlate([](const ModelProfile& p) { return p.mbpp; }, "MBPP")};
}

struct InducedSplit {
  std::optional<double> induced;  // absent when no induced verdicts exist
  std::optional<double> natural;
  std::size_t induced_trials = 0;
  std::size_t natural_trials = 0;
};

inline InducedSplit induced_split(std::span<const GenerationVerdict> verdicts) {
  std::vector<GenerationVerdict> ind, nat;
  for (const auto& v : verdicts) (v.induced ? ind : nat).push_back(v);
  InducedSplit s;
  s.induced_trials = ind.size();
  s.natural_trials = nat.size();
  if (!ind.empty()) s.induced = phr(ind);
  if (!nat.empty()) s.natural = phr(nat);
  return s;
}

}  // namespace pkghallu
