#pragma once

// Verdict files, PHR reports and plot-ready CSVs.
//
// The JSON report embeds the full verdict list, so reading it back yields the
// same verdict set. All outputs are ordered by generation key.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pkghallu/error.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/model_profile.hpp"
#include "pkghallu/statistics.hpp"
#include "pkghallu/verdict_metrics.hpp"

namespace pkghallu {

inline constexpr int kVerdictFormatVersion = 1;

inline std::string_view to_string(TrialUnit u) { return u == TrialUnit::generation ? "generation" : "prompt"; }

inline TrialUnit parse_trial_unit(std::string_view s) {
  if (s == "generation") return TrialUnit::generation;
  if (s == "prompt") return TrialUnit::prompt;
  throw InputError("unknown trial unit '" + std::string(s) + "' (expected generation|prompt)");
}

enum class ReportFormat { json, csv, md };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "md") return ReportFormat::md;
  throw InputError("unknown report format '" + std::string(s) + "' (expected json|csv|md)");
}

// Fixed-point with `digits` decimals; keeps text outputs stable across platforms.
inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline nlohmann::json verdict_to_json(const GenerationVerdict& v) {
  nlohmann::json packages = nlohmann::json::array();
  for (const auto& p : v.packages) {
    packages.push_back({{"raw", p.ref.raw},
                        {"normalized", p.ref.normalized},
                        {"kind", to_string(p.ref.kind)},
                        {"line", p.ref.line},
                        {"status", to_string(p.verdict.status)},
                        {"first_seen", p.verdict.first_seen ? nlohmann::json(p.verdict.first_seen->to_string())
                                                            : nlohmann::json(nullptr)}});
  }
  return {{"model", v.key.model},
          {"language", to_string(v.key.prompt.language)},
          {"stub_id", v.key.prompt.stub_id},
          {"task_id", v.key.prompt.task_id},
          {"repetition", v.key.prompt.repetition},
          {"induced", v.induced},
          {"hallucinated", v.hallucinated},
          {"packages", std::move(packages)}};
}

inline GenerationVerdict verdict_from_json(const nlohmann::json& j) {
  GenerationVerdict v;
  try {
    v.key.model = j.at("model").get<std::string>();
    v.key.prompt.language = parse_language(j.at("language").get<std::string>());
    v.key.prompt.stub_id = j.at("stub_id").get<std::string>();
    v.key.prompt.task_id = j.at("task_id").get<std::string>();
    v.key.prompt.repetition = j.at("repetition").get<int>();
    v.induced = j.value("induced", false);
    v.hallucinated = j.at("hallucinated").get<bool>();
    bool any = false;
    for (const auto& p : j.at("packages")) {
      JudgedPackage jp;
      jp.ref.raw = p.at("raw").get<std::string>();
      jp.ref.normalized = p.at("normalized").get<std::string>();
      jp.ref.language = v.key.prompt.language;
      jp.ref.kind = parse_ref_kind(p.at("kind").get<std::string>());
      jp.ref.line = p.at("line").get<std::size_t>();
      jp.verdict.status = parse_lookup_status(p.at("status").get<std::string>());
      if (p.contains("first_seen") && !p["first_seen"].is_null())
        jp.verdict.first_seen = Date::parse(p["first_seen"].get<std::string>());
      any = any || jp.verdict.hallucinated();
      v.packages.push_back(std::move(jp));
    }
    if (any != v.hallucinated) throw InputError("hallucinated flag disagrees with package statuses");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("verdict record: ") + e.what());
  }
  return v;
}

inline nlohmann::json verdicts_to_json(std::vector<GenerationVerdict> verdicts,
                                       TrialUnit unit = TrialUnit::generation) {
  std::sort(verdicts.begin(), verdicts.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  nlohmann::json list = nlohmann::json::array();
  for (const auto& v : verdicts) list.push_back(verdict_to_json(v));
  return {{"version", kVerdictFormatVersion}, {"trial_unit", to_string(unit)}, {"verdicts", std::move(list)}};
}

struct VerdictSet {
  std::vector<GenerationVerdict> verdicts;
  TrialUnit unit = TrialUnit::generation;
};

// Accepts a verdict file or a JSON report (both carry "verdicts").
inline VerdictSet verdicts_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("verdicts")) throw InputError("document has no \"verdicts\" array");
  if (doc.value("version", kVerdictFormatVersion) != kVerdictFormatVersion)
    throw InputError("unsupported verdict format version");
  VerdictSet out;
  out.unit = parse_trial_unit(doc.value("trial_unit", std::string("generation")));
  std::set<GenerationKey> seen;
  for (const auto& j : doc.at("verdicts")) {
    auto v = verdict_from_json(j);
    if (!seen.insert(v.key).second) throw InputError("duplicate verdict for model '" + v.key.model + "'");
    out.verdicts.push_back(std::move(v));
  }
  std::sort(out.verdicts.begin(), out.verdicts.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  return out;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void save_verdicts(const std::filesystem::path& path, const std::vector<GenerationVerdict>& verdicts,
                          TrialUnit unit = TrialUnit::generation) {
  write_text_atomic(path, verdicts_to_json(verdicts, unit).dump(2) + "\n");
}

inline VerdictSet load_verdicts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), 0, "cannot open verdict file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string(), 0, e.what());
  }
  return verdicts_from_json(doc);
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline nlohmann::json cells_to_json(std::span<const PhrCell> cells) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cells)
    out.push_back({{"model", c.model},
                   {"language", to_string(c.language)},
                   {"trials", c.trials},
                   {"hallucinated_trials", c.hallucinated_trials},
                   {"phr", c.phr}});
  return out;
}

inline std::string render_report(const VerdictSet& set, ReportFormat format) {
  auto cells = phr_table(set.verdicts, set.unit);
  std::ostringstream os;
  switch (format) {
    case ReportFormat::json: {
      nlohmann::json languages = nlohmann::json::object();
      for (auto lang : kAllLanguages) {
        auto col = language_column(cells, lang);
        if (col.size() < 2) continue;
        auto s = stats::summarize(col);
        languages[std::string(to_string(lang))] = {{"models", s.n},
                                                   {"mean_percent", s.mean},
                                                   {"sample_stddev_percent", s.sample_stddev},
                                                   {"median_percent", s.median},
                                                   {"interquartile_mean_percent", s.interquartile_mean}};
      }
      auto split = induced_split(set.verdicts);
      auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
      auto doc = verdicts_to_json(set.verdicts, set.unit);
      doc["cells"] = cells_to_json(cells);
      doc["languages"] = std::move(languages);
      doc["induced_split"] = {{"induced_phr", opt(split.induced)},
                              {"natural_phr", opt(split.natural)},
                              {"induced_trials", split.induced_trials},
                              {"natural_trials", split.natural_trials}};
      os << doc.dump(2) << '\n';
      break;
    }
    case ReportFormat::csv:
      os << "model,language,trials,hallucinated_trials,phr\n";
      for (const auto& c : cells)
        os << detail::csv_field(c.model) << ',' << to_string(c.language) << ',' << c.trials << ','
           << c.hallucinated_trials << ',' << fixed(c.phr, 6) << '\n';
      break;
    case ReportFormat::md:
      os << "| Model | Language | Trials | Hallucinated | PHR (%) |\n";
      os << "|---|---|---:|---:|---:|\n";
      for (const auto& c : cells)
        os << "| " << detail::md_cell(c.model) << " | " << display_name(c.language) << " | " << c.trials << " | "
           << c.hallucinated_trials << " | " << fixed(c.percent()) << " |\n";
      break;
  }
  return os.str();
}

// Plot data. Every file has a header row; numbers are percentages.

inline std::string size_phr_csv(std::span<const PhrCell> cells, std::span<const ModelProfile> profiles) {
  std::ostringstream os;
  os << "model,language,params_billions,params_approximate,phr_percent\n";
  for (const auto& c : cells) {
    const auto& p = find_profile(profiles, c.model);
    os << detail::csv_field(c.model) << ',' << to_string(c.language) << ',' << p.params_billions << ','
       << (p.params_approximate ? "true" : "false") << ',' << fixed(c.percent(), 4) << '\n';
  }
  return os.str();
}

enum class Benchmark { humaneval, mbpp };

inline std::string benchmark_phr_csv(const std::map<std::string, double>& avg_phr,
                                     std::span<const ModelProfile> profiles, Benchmark which) {
  std::ostringstream os;
  os << "model," << (which == Benchmark::humaneval ? "humaneval" : "mbpp") << ",avg_phr_percent\n";
  for (const auto& [model, phr] : avg_phr) {
    const auto& p = find_profile(profiles, model);
    auto score = which == Benchmark::humaneval ? p.humaneval : p.mbpp;
    if (!score) continue;
    os << detail::csv_field(model) << ',' << *score << ',' << fixed(phr, 4) << '\n';
  }
  return os.str();
}

inline std::string language_phr_csv(std::span<const PhrCell> cells, std::span<const ModelProfile> profiles) {
  std::ostringstream os;
  os << "language,model,is_coding,phr_percent\n";
  for (auto lang : kAllLanguages)
    for (const auto& c : cells)
      if (c.language == lang)
        os << to_string(lang) << ',' << detail::csv_field(c.model) << ','
           << (find_profile(profiles, c.model).is_coding ? "true" : "false") << ',' << fixed(c.percent(), 4)
           << '\n';
  return os.str();
}

// Writes size_phr.csv, humaneval_phr.csv, mbpp_phr.csv and language_phr.csv.
inline void write_plot_data(const std::filesystem::path& dir, std::span<const PhrCell> cells,
                            std::span<const ModelProfile> profiles) {
  auto avg = model_average_phr(cells);
  write_text_atomic(dir / "size_phr.csv", size_phr_csv(cells, profiles));
  write_text_atomic(dir / "humaneval_phr.csv", benchmark_phr_csv(avg, profiles, Benchmark::humaneval));
  write_text_atomic(dir / "mbpp_phr.csv", benchmark_phr_csv(avg, profiles, Benchmark::mbpp));
  write_text_atomic(dir / "language_phr.csv", language_phr_csv(cells, profiles));
}

}  // namespace pkghallu
