#pragma once

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "pkghallu/error.hpp"

namespace pkghallu {

// Calendar date in UTC. Serialized as YYYY-MM-DD.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int y, unsigned m, unsigned d)
      : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}}) {}

  // Strict YYYY-MM-DD. Returns nullopt on any deviation, including invalid
  // calendar days such as 2023-02-30.
  static std::optional<Date> try_parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
      int v = 0;
      const char* first = text.data() + pos;
      const char* last = first + len;
      for (const char* p = first; p != last; ++p)
        if (*p < '0' || *p > '9') return std::nullopt;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last) return std::nullopt;
      return v;
    };
    auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
    if (!y || !m || !d) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{unsigned(*m)},
                                    std::chrono::day{unsigned(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
  }

  static Date parse(std::string_view text) {
    if (auto d = try_parse(text)) return *d;
    throw InputError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  }

  // Accepts RFC 3339 timestamps ("2019-05-05T12:00:00Z") by taking the date part.
  static std::optional<Date> try_parse_timestamp(std::string_view text) {
    if (text.size() < 10) return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != 't' && text[10] != ' ')
      return std::nullopt;
    return try_parse(text.substr(0, 10));
  }

  static Date today() {
    return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
  }

  constexpr std::chrono::sys_days days() const { return days_; }

  constexpr Date operator-(std::chrono::days n) const { return Date{days_ - n}; }
  constexpr Date operator+(std::chrono::days n) const { return Date{days_ + n}; }
  constexpr std::chrono::days operator-(const Date& other) const { return days_ - other.days_; }

  constexpr auto operator<=>(const Date&) const = default;

  std::string to_string() const {
    std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
  }

 private:
  std::chrono::sys_days days_{};
};

// RFC 3339 UTC timestamp with second resolution.
inline std::string utc_timestamp_now() {
  auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  auto day = std::chrono::floor<std::chrono::days>(now);
  std::chrono::hh_mm_ss hms{now - day};
  return Date{day}.to_string() + "T" +
         [&] {
           char buf[16];
           std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", int(hms.hours().count()),
                         int(hms.minutes().count()), int(hms.seconds().count()));
           return std::string(buf);
         }() +
         "Z";
}

}  // namespace pkghallu
