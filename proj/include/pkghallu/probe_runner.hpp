#pragma once

// Runs a prompt matrix against OpenAI-compatible chat-completions endpoints.
//
// Every (model, prompt) pair yields exactly one Generation in the store.
// Pairs already present are skipped, so an interrupted run resumes where it
// stopped. Requests that still fail after retries are stored with empty text
// and finish_reason "error" so that they stay in the PHR denominator.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pkghallu/date.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/generation_store.hpp"
#include "pkghallu/http.hpp"
#include "pkghallu/model_profile.hpp"
#include "pkghallu/prompt_factory.hpp"

namespace pkghallu {

struct Sampling {
  double temperature = 0.7;
  int max_tokens = 1024;

  friend bool operator==(const Sampling&, const Sampling&) = default;
};

struct ChatResult {
  std::string text;
  std::string finish_reason;
};

class ChatClient {
 public:
  ChatClient(const Endpoint& endpoint, RetryPolicy retry,
             std::chrono::seconds timeout = std::chrono::seconds(120))
      : url_(Url::parse(endpoint.base_url)),
        model_id_(endpoint.model_id),
        http_(url_.origin, retry, timeout) {
    if (!endpoint.api_key_env.empty()) {
      const char* token = std::getenv(endpoint.api_key_env.c_str());
      if (!token || !*token)
        throw ConfigError("environment variable " + endpoint.api_key_env + " is not set");
      headers_.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  static nlohmann::json request_body(const std::string& model_id, const std::string& prompt,
                                     const Sampling& sampling) {
    return {{"model", model_id},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", sampling.temperature},
            {"max_tokens", sampling.max_tokens}};
  }

  // Throws NetworkError when retries are exhausted or the endpoint answers
  // with a non-retryable error status.
  ChatResult complete(const std::string& prompt, const Sampling& sampling, std::stop_token stop = {}) {
    auto body = request_body(model_id_, prompt, sampling).dump();
    auto res = http_.post(url_.path + "/chat/completions", body, "application/json", headers_, stop);
    if (res.status != 200)
      throw NetworkError("chat completion failed: HTTP " + std::to_string(res.status));
    try {
      auto j = nlohmann::json::parse(res.body);
      const auto& choice = j.at("choices").at(0);
      ChatResult out;
      const auto& content = choice.at("message").at("content");
      out.text = content.is_null() ? std::string{} : content.get<std::string>();
      if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
        out.finish_reason = choice["finish_reason"].get<std::string>();
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw NetworkError(std::string("malformed chat completion response: ") + e.what());
    }
  }

 private:
  Url url_;
  std::string model_id_;
  HttpClient http_;
  httplib::Headers headers_;
};

struct ProbeOptions {
  int parallelism = 4;
  Sampling sampling;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  std::stop_token stop;
  std::function<void(const Generation&)> on_record;
};

struct ProbeSummary {
  std::size_t total_pairs = 0;
  std::size_t already_done = 0;
  std::size_t requested = 0;
  std::size_t errors = 0;
  bool interrupted = false;
};

struct RunMetadata {
  std::string matrix_hash;
  std::size_t prompt_count = 0;
  Sampling sampling;
  int parallelism = 4;
  std::vector<std::string> models;

  nlohmann::json to_json() const {
    return {{"matrix_hash", matrix_hash},
            {"prompt_count", prompt_count},
            {"sampling", {{"temperature", sampling.temperature}, {"max_tokens", sampling.max_tokens}}},
            {"parallelism", parallelism},
            {"models", models},
            {"system_prompt", nullptr}};
  }
};

inline std::filesystem::path run_metadata_path(const std::filesystem::path& store) {
  return store.string() + ".meta.json";
}

// Writes the sidecar, refusing to mix a different matrix or sampling setup
// into an existing store.
inline void write_run_metadata(const std::filesystem::path& store, const RunMetadata& meta) {
  auto path = run_metadata_path(store);
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    auto old = nlohmann::json::parse(in, nullptr, false);
    if (!old.is_discarded()) {
      if (old.value("matrix_hash", std::string{}) != meta.matrix_hash)
        throw ConfigError("store " + store.string() + " was produced from a different prompt matrix");
      if (old.contains("sampling") && old["sampling"] != meta.to_json()["sampling"])
        throw ConfigError("store " + store.string() + " was produced with different sampling parameters");
    }
  }
  std::ofstream out(path, std::ios::trunc);
  out << meta.to_json().dump(2) << '\n';
}

inline ProbeSummary run_probe(const std::vector<ModelProfile>& profiles, const std::vector<Prompt>& prompts,
                              GenerationStore& store, const ProbeOptions& options = {}) {
  if (options.parallelism < 1) throw InputError("parallelism must be >= 1");

  struct Item {
    const ModelProfile* profile;
    const Prompt* prompt;
  };
  ProbeSummary summary;
  std::vector<Item> todo;
  for (const auto& profile : profiles) {
    for (const auto& prompt : prompts) {
      ++summary.total_pairs;
      if (store.contains({profile.name, PromptRef::of(prompt)}))
        ++summary.already_done;
      else
        todo.push_back({&profile, &prompt});
    }
  }
  if (todo.empty()) return summary;

  // Validate endpoints up front so configuration errors surface before any request.
  for (const auto& profile : profiles) ChatClient(profile.endpoint, options.retry, options.timeout);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> requested{0}, errors{0}, appended{0};
  std::mutex callback_mu;

  auto worker = [&] {
    std::map<std::string, std::unique_ptr<ChatClient>> clients;
    for (;;) {
      if (options.stop.stop_requested()) return;
      std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const auto& [profile, prompt] = todo[i];
      auto& client = clients[profile->name];
      if (!client) client = std::make_unique<ChatClient>(profile->endpoint, options.retry, options.timeout);

      Generation g{profile->name, PromptRef::of(*prompt), {}, {}, {}};
      ++requested;
      try {
        auto r = client->complete(prompt->text, options.sampling, options.stop);
        g.raw_text = std::move(r.text);
        g.finish_reason = std::move(r.finish_reason);
      } catch (const NetworkError&) {
        if (options.stop.stop_requested()) return;  // cancelled, retried on resume
        g.finish_reason = std::string(kFinishError);
        ++errors;
      }
      g.created_at = utc_timestamp_now();
      if (!store.append(g)) continue;
      ++appended;
      if (options.on_record) {
        std::lock_guard lock(callback_mu);
        options.on_record(g);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    int n = std::min<int>(options.parallelism, int(todo.size()));
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  summary.requested = requested;
  summary.errors = errors;
  summary.interrupted = summary.already_done + appended < summary.total_pairs;
  return summary;
}

}  // namespace pkghallu
