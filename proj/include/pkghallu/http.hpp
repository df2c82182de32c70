#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include <httplib.h>

#include "pkghallu/error.hpp"

namespace pkghallu {

struct RetryPolicy {
  int max_retries = 3;  // attempts = 1 + max_retries
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30'000};

  std::chrono::milliseconds backoff_for(int retry_index) const {
    double ms = double(initial_backoff.count());
    for (int i = 0; i < retry_index; ++i) ms *= multiplier;
    return std::min(max_backoff, std::chrono::milliseconds(static_cast<long long>(ms)));
  }
};

// "https://host:port/base/path" split into the httplib origin and a path prefix.
struct Url {
  std::string origin;
  std::string path;

  static Url parse(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos)
      throw ConfigError("URL '" + std::string(url) + "' has no scheme");
    std::string_view scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
      throw ConfigError("unsupported URL scheme in '" + std::string(url) + "'");
    auto slash = url.find('/', scheme_end + 3);
    Url u;
    u.origin = std::string(url.substr(0, slash));
    u.path = slash == std::string_view::npos ? std::string{} : std::string(url.substr(slash));
    while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
    return u;
  }
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

inline bool is_retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

// One connection origin; not shared between threads.
class HttpClient {
 public:
  HttpClient(const std::string& origin, RetryPolicy retry,
             std::chrono::seconds timeout = std::chrono::seconds(60))
      : client_(origin), retry_(retry), origin_(origin) {
    if (!client_.is_valid())
      throw ConfigError("cannot create HTTP client for '" + origin +
                        "' (is TLS support compiled in?)");
    client_.set_connection_timeout(std::chrono::seconds(10));
    client_.set_read_timeout(timeout);
    client_.set_write_timeout(timeout);
    client_.set_follow_location(true);
  }

  void set_default_headers(httplib::Headers headers) { client_.set_default_headers(std::move(headers)); }

  // Retries transport failures, 408, 429 and 5xx with exponential backoff.
  // Other statuses are returned to the caller without retry.
  HttpResponse get(const std::string& path, const httplib::Headers& headers = {},
                   std::stop_token stop = {}) {
    return with_retry([&] { return client_.Get(path, headers); }, "GET " + path, stop);
  }

  HttpResponse post(const std::string& path, const std::string& body, const std::string& content_type,
                    const httplib::Headers& headers = {}, std::stop_token stop = {}) {
    return with_retry([&] { return client_.Post(path, headers, body, content_type); }, "POST " + path,
                      stop);
  }

  const RetryPolicy& retry_policy() const { return retry_; }

 private:
  template <typename F>
  HttpResponse with_retry(F&& send, const std::string& what, std::stop_token stop) {
    std::string last_error;
    for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
      if (attempt > 0) sleep_for(retry_.backoff_for(attempt - 1), stop);
      if (stop.stop_requested()) throw NetworkError(what + ": cancelled");
      auto res = send();
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (is_retryable_status(res->status)) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      return {res->status, std::move(res->body)};
    }
    throw NetworkError(origin_ + " " + what + ": " + last_error + " after " +
                       std::to_string(retry_.max_retries + 1) + " attempts");
  }

  static void sleep_for(std::chrono::milliseconds d, const std::stop_token& stop) {
    auto until = std::chrono::steady_clock::now() + d;
    while (std::chrono::steady_clock::now() < until && !stop.stop_requested())
      std::this_thread::sleep_for(std::min(d, std::chrono::milliseconds(20)));
  }

  httplib::Client client_;
  RetryPolicy retry_;
  std::string origin_;
};

inline std::string url_encode_component(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
        c == '_' || c == '.' || c == '~' || c == '@') {
      out.push_back(char(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

}  // namespace pkghallu
