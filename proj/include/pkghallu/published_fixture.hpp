#pragma once

// The published per-language PHR table and the statistics reported from it.
//
// Cells are rebuilt from integer hallucination counts over the per-cell trial
// count, so they flow through the same PhrCell path as a live run.
// reproduce_published() recomputes every reported figure and compares it
// against the "reported" block with fixed tolerances.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "pkghallu/embedded_data.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/model_profile.hpp"
#include "pkghallu/report.hpp"
#include "pkghallu/statistics.hpp"
#include "pkghallu/verdict_metrics.hpp"

namespace pkghallu {

struct PublishedModel {
  ModelProfile profile;
  std::string provider;
  std::string full_name;
  std::map<SourceLanguage, double> phr_percent;  // as printed, two decimals
  std::map<SourceLanguage, std::size_t> hallucinated_trials;
  double avg_phr_percent = 0;
};

struct PublishedTables {
  std::size_t trials_per_cell = 0;
  std::vector<PublishedModel> models;
  nlohmann::json reported;

  std::vector<ModelProfile> profiles() const {
    std::vector<ModelProfile> out;
    for (const auto& m : models) out.push_back(m.profile);
    return out;
  }

  // Ordered by model name then language, like phr_table().
  std::vector<PhrCell> cells() const {
    std::vector<PhrCell> out;
    for (const auto& m : models)
      for (const auto& [lang, k] : m.hallucinated_trials)
        out.push_back(PhrCell::from_counts(m.profile.name, lang, trials_per_cell, k));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return std::tie(a.model, a.language) < std::tie(b.model, b.language); });
    return out;
  }
};

inline PublishedTables published_tables_from_json(const nlohmann::json& doc) {
  PublishedTables t;
  try {
    if (doc.at("version").get<int>() != 1) throw ConfigError("unsupported published table version");
    t.trials_per_cell = doc.at("trials_per_cell").get<std::size_t>();
    for (const auto& j : doc.at("models")) {
      PublishedModel m;
      m.profile = profile_from_json(j);
      m.provider = j.value("provider", std::string{});
      m.full_name = j.value("full_name", std::string{});
      m.avg_phr_percent = j.at("avg_phr_percent").get<double>();
      for (const auto& [lang, v] : j.at("phr_percent").items()) m.phr_percent[parse_language(lang)] = v.get<double>();
      for (const auto& [lang, v] : j.at("hallucinated_trials").items())
        m.hallucinated_trials[parse_language(lang)] = v.get<std::size_t>();
      // The counts must round to the printed percentages.
      for (const auto& [lang, k] : m.hallucinated_trials) {
        double pct = 100.0 * double(k) / double(t.trials_per_cell);
        auto it = m.phr_percent.find(lang);
        if (it == m.phr_percent.end() || std::fabs(pct - it->second) > 0.005 + 1e-9)
          throw ConfigError("published table: " + m.profile.name + "/" + std::string(to_string(lang)) +
                            " count does not match the printed rate");
      }
      t.models.push_back(std::move(m));
    }
    t.reported = doc.at("reported");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("published table: ") + e.what());
  }
  if (t.trials_per_cell == 0) throw ConfigError("published table: trials_per_cell must be > 0");
  return t;
}

inline const PublishedTables& published_tables() {
  static const PublishedTables t = published_tables_from_json(nlohmann::json::parse(embedded::published_tables));
  return t;
}

enum class CheckLevel {
  required,  // failure fails the reproduction
  advisory,  // failure is reported as a warning
  info,      // printed for reference only
};

struct ReproductionCheck {
  int criterion = 0;
  std::string name;
  double observed = 0;
  std::optional<double> expected;
  double tolerance = 0;
  CheckLevel level = CheckLevel::required;
  bool passed = true;

  std::string_view outcome() const {
    if (level == CheckLevel::info) return "INFO";
    if (passed) return "PASS";
    return level == CheckLevel::advisory ? "WARN" : "FAIL";
  }
};

struct ReproductionReport {
  std::vector<ReproductionCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (c.level == CheckLevel::required && !c.passed) return false;
    return true;
  }

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& c : checks) {
      char observed[32];
      std::snprintf(observed, sizeof observed, "%.6g", c.observed);
      os << c.outcome() << "  [" << c.criterion << "] " << c.name << ": observed " << observed;
      if (c.expected) os << ", expected " << *c.expected << " +/- " << c.tolerance;
      os << '\n';
    }
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : checks)
      list.push_back({{"criterion", c.criterion},
                      {"name", c.name},
                      {"observed", c.observed},
                      {"expected", c.expected ? nlohmann::json(*c.expected) : nlohmann::json(nullptr)},
                      {"tolerance", c.tolerance},
                      {"outcome", c.outcome()}});
    return {{"passed", passed()}, {"checks", std::move(list)}};
  }
};

// Tolerances for comparing against two-decimal published figures.
inline constexpr double kPercentTolerance = 0.01;
inline constexpr double kRhoTolerance = 0.005;
inline constexpr double kSizePTolerance = 0.0005;
inline constexpr double kLogSizePTolerance = 0.0002;

inline ReproductionReport reproduce_published(const PublishedTables& tables) {
  ReproductionReport r;
  const auto cells = tables.cells();
  const auto profiles = tables.profiles();
  const auto& rep = tables.reported;

  auto check = [&](int criterion, std::string name, double observed, double expected, double tol,
                   CheckLevel level = CheckLevel::required) {
    bool ok = std::fabs(observed - expected) <= tol + 1e-12;
    r.checks.push_back({criterion, std::move(name), observed, expected, tol, level, ok});
  };
  auto info = [&](int criterion, std::string name, double observed) {
    r.checks.push_back({criterion, std::move(name), observed, std::nullopt, 0, CheckLevel::info, true});
  };

  // 1. Language columns and per-model averages.
  for (auto lang : kAllLanguages) {
    auto key = std::string(to_string(lang));
    auto s = stats::summarize(language_column(cells, lang));
    check(1, key + " mean", s.mean, rep.at("language_mean").at(key).get<double>(), kPercentTolerance);
    check(1, key + " sample stddev", s.sample_stddev, rep.at("language_stddev").at(key).get<double>(),
          kPercentTolerance);
    info(1, key + " median", s.median);
    info(1, key + " interquartile mean", s.interquartile_mean);
  }
  auto avg = model_average_phr(cells);
  for (const auto& m : tables.models)
    check(1, m.profile.name + " average PHR", avg.at(m.profile.name), m.avg_phr_percent, kPercentTolerance);

  // 2. Coding vs non-coding groups.
  for (auto lang : kAllLanguages) {
    auto key = std::string(to_string(lang));
    const auto& g = rep.at("group").at(key);
    auto cmp = group_comparison(cells, profiles, lang);
    check(2, key + " coding mean", cmp.coding.mean, g.at("coding_mean").get<double>(), kPercentTolerance);
    check(2, key + " coding stddev", cmp.coding.sample_stddev, g.at("coding_stddev").get<double>(),
          kPercentTolerance);
    check(2, key + " non-coding mean", cmp.non_coding.mean, g.at("noncoding_mean").get<double>(), kPercentTolerance);
    check(2, key + " non-coding stddev", cmp.non_coding.sample_stddev, g.at("noncoding_stddev").get<double>(),
          kPercentTolerance);
  }
  {
    const auto& g = rep.at("overall_group");
    auto cmp = overall_group_comparison(cells, profiles);
    check(2, "overall coding mean", cmp.coding.mean, g.at("coding_mean").get<double>(), kPercentTolerance);
    check(2, "overall coding stddev", cmp.coding.sample_stddev, g.at("coding_stddev").get<double>(),
          kPercentTolerance);
    check(2, "overall non-coding mean", cmp.non_coding.mean, g.at("noncoding_mean").get<double>(), kPercentTolerance);
    check(2, "overall non-coding stddev", cmp.non_coding.sample_stddev, g.at("noncoding_stddev").get<double>(),
          kPercentTolerance);
    info(2, "overall Welch p-value", cmp.p_value);
  }

  // 3. Correlations.
  {
    auto lin = size_correlation(cells, profiles, SizeScale::linear);
    auto log = size_correlation(cells, profiles, SizeScale::log);
    const auto& s = rep.at("size_correlation");
    const auto& l = rep.at("log_size_correlation");
    check(3, "size vs PHR rho", lin.rho, s.at("rho").get<double>(), kRhoTolerance);
    check(3, "size vs PHR p-value", lin.p_value, s.at("p_value").get<double>(), kSizePTolerance);
    check(3, "ln(size) vs PHR rho", log.rho, l.at("rho").get<double>(), kRhoTolerance);
    check(3, "ln(size) vs PHR p-value", log.p_value, l.at("p_value").get<double>(), kLogSizePTolerance);
    auto per_model = size_vs_average_correlation(avg, profiles, SizeScale::linear);
    info(3, "size vs average PHR rho (one point per model)", per_model.rho);
    info(3, "size vs average PHR p-value (one point per model)", per_model.p_value);

    auto bench = benchmark_correlation(profiles, avg);
    check(3, "HumanEval vs average PHR rho", bench.humaneval.rho,
          rep.at("humaneval_correlation").at("rho").get<double>(), kRhoTolerance);
    check(3, "MBPP vs average PHR rho", bench.mbpp.rho, rep.at("mbpp_correlation").at("rho").get<double>(),
          kRhoTolerance);
  }

  // 4. Which language separates the groups most clearly.
  {
    std::optional<SourceLanguage> best;
    double best_p = 2;
    for (auto lang : kAllLanguages) {
      double p = group_comparison(cells, profiles, lang).p_value;
      info(4, std::string(to_string(lang)) + " Welch p-value", p);
      if (p < best_p) best_p = p, best = lang;
    }
    auto expected = parse_language(rep.at("significant_language").get<std::string>());
    r.checks.push_back({4, "smallest Welch p-value is " + std::string(to_string(expected)) + " (observed " +
                               std::string(to_string(*best)) + ")",
                        best_p, std::nullopt, 0, CheckLevel::advisory, *best == expected});
  }
  return r;
}

}  // namespace pkghallu
