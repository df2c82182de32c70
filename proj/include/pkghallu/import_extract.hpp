#pragma once

// Best-effort extraction of external package references from source text
// (or from a whole LLM response with prose around the code).
//
//   python      import a.b [as c], ...      direct_import / aliased_import
//               from a.b import ...         qualified_import
//   javascript  import ... from 'spec'      es6_import (also side-effect form)
//               require('spec')             commonjs_require
//   rust        use a::b::{...};            use_decl
//               extern crate a [as b];      extern_crate
//               a::item                     path_ref
//
// Matches are reduced to their root package, normalized for registry lookup,
// filtered against the built-in allowlist and relative references, and
// deduplicated by normalized name with the earliest occurrence kept.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pkghallu/embedded_data.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/text.hpp"

namespace pkghallu {

enum class RefKind {
  direct_import,
  qualified_import,
  aliased_import,
  es6_import,
  commonjs_require,
  use_decl,
  extern_crate,
  path_ref,
};

inline constexpr std::string_view to_string(RefKind k) {
  switch (k) {
    case RefKind::direct_import: return "direct_import";
    case RefKind::qualified_import: return "qualified_import";
    case RefKind::aliased_import: return "aliased_import";
    case RefKind::es6_import: return "es6_import";
    case RefKind::commonjs_require: return "commonjs_require";
    case RefKind::use_decl: return "use_decl";
    case RefKind::extern_crate: return "extern_crate";
    case RefKind::path_ref: return "path_ref";
  }
  return "?";
}

inline RefKind parse_ref_kind(std::string_view s) {
  for (RefKind k : {RefKind::direct_import, RefKind::qualified_import, RefKind::aliased_import,
                    RefKind::es6_import, RefKind::commonjs_require, RefKind::use_decl,
                    RefKind::extern_crate, RefKind::path_ref})
    if (to_string(k) == s) return k;
  throw InputError("unknown reference kind '" + std::string(s) + "'");
}

inline constexpr bool kind_valid_for(RefKind k, SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::python:
      return k == RefKind::direct_import || k == RefKind::qualified_import ||
             k == RefKind::aliased_import;
    case SourceLanguage::javascript:
      return k == RefKind::es6_import || k == RefKind::commonjs_require;
    case SourceLanguage::rust:
      return k == RefKind::use_decl || k == RefKind::extern_crate || k == RefKind::path_ref;
  }
  return false;
}

struct PackageRef {
  std::string raw;
  std::string normalized;
  SourceLanguage language = SourceLanguage::python;
  RefKind kind = RefKind::direct_import;
  std::size_t line = 1;

  friend bool operator==(const PackageRef&, const PackageRef&) = default;
};

using NameSet = std::set<std::string, std::less<>>;

// Registry lookup key. Python follows the simple-repository rule, rust treats
// '_' and '-' as equivalent, javascript only lowercases.
inline std::string normalize_name(std::string_view raw, SourceLanguage lang) {
  if (raw.empty()) throw InputError("cannot normalize an empty package name");
  std::string lower = text::to_lower_ascii(raw);
  switch (lang) {
    case SourceLanguage::python: {
      std::string out;
      out.reserve(lower.size());
      bool in_sep = false;
      for (char c : lower) {
        if (c == '-' || c == '_' || c == '.') {
          if (!in_sep) out.push_back('-');
          in_sep = true;
        } else {
          out.push_back(c);
          in_sep = false;
        }
      }
      return out;
    }
    case SourceLanguage::rust:
      std::replace(lower.begin(), lower.end(), '_', '-');
      return lower;
    case SourceLanguage::javascript:
      return lower;
  }
  return lower;
}

// True for references that can never name a registry package: python
// leading-dot imports, javascript relative/absolute paths and URLs, rust
// crate/self/super paths.
inline bool is_relative(std::string_view raw, SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::python:
      return raw.starts_with('.');
    case SourceLanguage::javascript:
      return raw == "." || raw == ".." || raw.starts_with("./") || raw.starts_with("../") ||
             raw.starts_with('/') || raw.starts_with("http:") || raw.starts_with("https:") ||
             raw.starts_with("file:") || raw.starts_with("data:");
    case SourceLanguage::rust: {
      std::string_view head = raw.substr(0, raw.find("::"));
      return head == "crate" || head == "self" || head == "super" || head == "Self";
    }
  }
  return false;
}

inline std::string root_package(std::string_view module_path, SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::python: {
      std::size_t dots = module_path.find_first_not_of('.');
      if (dots == std::string_view::npos) return std::string(module_path);
      return std::string(module_path.substr(0, module_path.find('.', dots)));
    }
    case SourceLanguage::rust:
      return std::string(module_path.substr(0, module_path.find("::")));
    case SourceLanguage::javascript: {
      if (is_relative(module_path, lang)) return std::string(module_path);
      std::size_t slash = module_path.find('/');
      if (module_path.starts_with('@') && slash != std::string_view::npos)
        slash = module_path.find('/', slash + 1);
      return std::string(module_path.substr(0, slash));
    }
  }
  return std::string(module_path);
}

// Parses an allowlist document: one name per line, '#' starts a comment.
// Entries must already be normalized for `lang`.
inline NameSet parse_allowlist(std::string_view doc, SourceLanguage lang,
                               const std::string& source = "<allowlist>") {
  NameSet out;
  std::size_t line_no = 0;
  for (std::string_view line : text::split_lines(doc)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    std::string name(line);
    if (normalize_name(name, lang) != name)
      throw LoadError(source, line_no, "allowlist entry '" + name + "' is not normalized");
    out.insert(std::move(name));
  }
  return out;
}

struct ExtractionConfig {
  std::map<SourceLanguage, NameSet> builtin_allowlist;
  bool include_relative = false;

  // Shipped standard-library/runtime allowlists.
  static ExtractionConfig with_default_builtins() {
    ExtractionConfig cfg;
    cfg.builtin_allowlist[SourceLanguage::python] =
        parse_allowlist(embedded::builtins_python, SourceLanguage::python, "builtins/python.txt");
    cfg.builtin_allowlist[SourceLanguage::javascript] = parse_allowlist(
        embedded::builtins_javascript, SourceLanguage::javascript, "builtins/javascript.txt");
    cfg.builtin_allowlist[SourceLanguage::rust] =
        parse_allowlist(embedded::builtins_rust, SourceLanguage::rust, "builtins/rust.txt");
    return cfg;
  }

  // Reads <dir>/<language>.txt for each language present in the directory;
  // languages without a file keep the shipped list.
  static ExtractionConfig from_directory(const std::filesystem::path& dir) {
    ExtractionConfig cfg = with_default_builtins();
    for (SourceLanguage lang : kAllLanguages) {
      auto path = dir / (std::string(to_string(lang)) + ".txt");
      if (!std::filesystem::exists(path)) continue;
      std::ifstream in(path, std::ios::binary);
      if (!in) throw LoadError(path.string(), 0, "cannot open allowlist");
      std::stringstream ss;
      ss << in.rdbuf();
      cfg.builtin_allowlist[lang] = parse_allowlist(ss.str(), lang, path.string());
    }
    return cfg;
  }
};

inline bool is_builtin(std::string_view normalized, SourceLanguage lang,
                       const ExtractionConfig& config) {
  if (lang == SourceLanguage::javascript && normalized.starts_with("node:")) return true;
  auto it = config.builtin_allowlist.find(lang);
  return it != config.builtin_allowlist.end() && it->second.contains(normalized);
}

namespace detail {

struct Candidate {
  std::size_t offset;
  std::string raw;
  RefKind kind;
};

// ---------------------------------------------------------------- python

// dotted.name, no interior whitespace. Returns length consumed or 0.
inline std::size_t scan_dotted(std::string_view s, std::size_t p) {
  std::size_t start = p;
  for (;;) {
    if (p >= s.size() || !text::is_ident_start(s[p])) return 0;
    while (p < s.size() && text::is_ident_char(s[p])) ++p;
    if (p + 1 < s.size() && s[p] == '.' && text::is_ident_start(s[p + 1])) {
      ++p;
      continue;
    }
    return p - start;
  }
}

inline std::size_t skip_ws(std::string_view s, std::size_t p) {
  while (p < s.size() && text::is_space(s[p])) ++p;
  return p;
}

inline std::size_t scan_ident(std::string_view s, std::size_t p) {
  if (p >= s.size() || !text::is_ident_start(s[p])) return 0;
  std::size_t q = p;
  while (q < s.size() && text::is_ident_char(s[q])) ++q;
  return q - p;
}

// "name [as alias], name [as alias] ..." where name is dotted when
// `dotted` is set. Returns false if anything else is present.
struct PyItem {
  std::size_t offset;
  std::string name;
  bool aliased;
};

inline bool parse_python_items(std::string_view s, std::size_t p, bool dotted,
                               std::vector<PyItem>& items) {
  for (;;) {
    p = skip_ws(s, p);
    std::size_t n = dotted ? scan_dotted(s, p) : scan_ident(s, p);
    if (n == 0) return false;
    PyItem item{p, std::string(s.substr(p, n)), false};
    p = skip_ws(s, p + n);
    if (text::starts_with_word(s.substr(p), "as")) {
      p = skip_ws(s, p + 2);
      std::size_t a = scan_ident(s, p);
      if (a == 0) return false;
      p = skip_ws(s, p + a);
      item.aliased = true;
    }
    items.push_back(std::move(item));
    if (p >= s.size()) return true;
    if (s[p] == '\\' && skip_ws(s, p + 1) >= s.size()) return true;
    if (s[p] != ',') return false;
    ++p;
    if (!dotted && skip_ws(s, p) >= s.size()) return true;  // trailing comma before '\'
  }
}

inline void python_candidates(std::string_view text, std::vector<Candidate>& out) {
  for (std::string_view line : text::split_lines(text)) {
    const std::size_t base = std::size_t(line.data() - text.data());

    std::string_view code = line;
    if (auto hash = code.find('#'); hash != std::string_view::npos) code = code.substr(0, hash);

    std::size_t seg_begin = 0;
    while (seg_begin <= code.size()) {
      std::size_t semi = code.find(';', seg_begin);
      std::size_t seg_end = semi == std::string_view::npos ? code.size() : semi;
      std::string_view seg = code.substr(seg_begin, seg_end - seg_begin);
      std::size_t seg_off = base + seg_begin;
      seg_begin = seg_end + 1;

      std::size_t p = skip_ws(seg, 0);
      if (seg.substr(p).starts_with(">>>") || seg.substr(p).starts_with("...")) {
        if (p + 3 < seg.size() && seg[p + 3] == ' ') p = skip_ws(seg, p + 3);
      }
      std::string_view body = seg.substr(p);
      std::size_t body_off = seg_off + p;
      // Trim trailing whitespace so item parsing sees the true end.
      while (!body.empty() && text::is_space(body.back())) body.remove_suffix(1);

      if (text::starts_with_word(body, "import")) {
        std::vector<PyItem> items;
        if (!parse_python_items(body, 6, true, items)) continue;
        if (body.size() > 6 && !text::is_space(body[6])) continue;
        for (auto& it : items)
          out.push_back({body_off + it.offset, std::move(it.name),
                         it.aliased ? RefKind::aliased_import : RefKind::direct_import});
      } else if (text::starts_with_word(body, "from")) {
        std::size_t q = skip_ws(body, 4);
        if (q == 4) continue;
        std::size_t mod_start = q;
        while (q < body.size() && body[q] == '.') ++q;
        std::size_t n = scan_dotted(body, q);
        if (q == mod_start && n == 0) continue;
        std::size_t mod_end = q + n;
        std::string_view module = body.substr(mod_start, mod_end - mod_start);
        q = skip_ws(body, mod_end);
        if (q == mod_end || !text::starts_with_word(body.substr(q), "import")) continue;
        q += 6;
        std::size_t r = skip_ws(body, q);
        if (r == q || r >= body.size()) continue;
        std::string_view rest = body.substr(r);
        if (!(rest == "*" || rest.starts_with('('))) {
          std::vector<PyItem> names;
          if (!parse_python_items(rest, 0, false, names)) continue;
        }
        out.push_back({body_off + mod_start, std::string(module), RefKind::qualified_import});
      }
    }
  }
}

// ------------------------------------------------------------ javascript

// Blanks // and /* */ comments that start at a token boundary. String
// contents are kept since module specifiers live there.
inline std::string javascript_code_view(std::string_view s) {
  std::string v(s);
  std::size_t i = 0;
  while (i + 1 < v.size()) {
    bool boundary = i == 0 || text::is_space(v[i - 1]) || v[i - 1] == ';' || v[i - 1] == '{' ||
                    v[i - 1] == '}' || v[i - 1] == ')';
    if (boundary && v[i] == '/' && v[i + 1] == '/') {
      while (i < v.size() && v[i] != '\n') v[i++] = ' ';
    } else if (boundary && v[i] == '/' && v[i + 1] == '*') {
      std::size_t end = v.find("*/", i + 2);
      std::size_t stop = end == std::string::npos ? v.size() : end + 2;
      for (; i < stop; ++i)
        if (v[i] != '\n') v[i] = ' ';
    } else {
      ++i;
    }
  }
  return v;
}

inline bool is_js_ident_char(char c) { return text::is_ident_char(c) || c == '$'; }

// Reads a single-line quoted string at p. Template literals with ${} are
// rejected (dynamic specifiers).
inline bool read_js_string(std::string_view s, std::size_t p, std::size_t& value_begin,
                           std::size_t& value_end, std::size_t& after) {
  if (p >= s.size()) return false;
  char q = s[p];
  if (q != '\'' && q != '"' && q != '`') return false;
  std::size_t i = p + 1;
  while (i < s.size() && s[i] != q) {
    if (s[i] == '\n') return false;
    if (s[i] == '\\') ++i;
    if (q == '`' && s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') return false;
    ++i;
  }
  if (i >= s.size()) return false;
  value_begin = p + 1;
  value_end = i;
  after = i + 1;
  return value_end > value_begin;
}

inline bool js_word_at(std::string_view s, std::size_t p, std::string_view word) {
  if (s.substr(p, word.size()) != word) return false;
  if (p > 0 && (is_js_ident_char(s[p - 1]) || s[p - 1] == '.')) return false;
  std::size_t e = p + word.size();
  return e >= s.size() || !is_js_ident_char(s[e]);
}

inline void javascript_candidates(std::string_view original, std::vector<Candidate>& out) {
  const std::string view = javascript_code_view(original);
  const std::string_view s = view;
  constexpr std::size_t kMaxClause = 4096;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != 'i' && s[i] != 'r') continue;
    if (js_word_at(s, i, "import")) {
      std::size_t p = skip_ws(s, i + 6);
      std::size_t b, e, after;
      if (read_js_string(s, p, b, e, after)) {
        out.push_back({b, std::string(s.substr(b, e - b)), RefKind::es6_import});
        continue;
      }
      if (p == i + 6) continue;  // "import(" / "import.meta" / "imports"
      // Binding clause: identifiers, '*', '{', '}', ',', whitespace, up to `from`.
      bool saw_binding = false;
      std::size_t limit = std::min(s.size(), p + kMaxClause);
      while (p < limit) {
        p = skip_ws(s, p);
        if (p >= limit) break;
        if (saw_binding && js_word_at(s, p, "from")) {
          std::size_t q = skip_ws(s, p + 4);
          if (read_js_string(s, q, b, e, after))
            out.push_back({b, std::string(s.substr(b, e - b)), RefKind::es6_import});
          break;
        }
        char c = s[p];
        if (is_js_ident_char(c)) {
          while (p < limit && is_js_ident_char(s[p])) ++p;
          saw_binding = true;
        } else if (c == '*' || c == '{' || c == '}' || c == ',') {
          ++p;
          saw_binding = true;
        } else {
          break;
        }
      }
    } else if (js_word_at(s, i, "require")) {
      std::size_t p = skip_ws(s, i + 7);
      if (p >= s.size() || s[p] != '(') continue;
      p = skip_ws(s, p + 1);
      std::size_t b, e, after;
      if (!read_js_string(s, p, b, e, after)) continue;
      p = skip_ws(s, after);
      if (p >= s.size() || s[p] != ')') continue;
      out.push_back({b, std::string(s.substr(b, e - b)), RefKind::commonjs_require});
    }
  }
}

// ------------------------------------------------------------------ rust

// Blanks comments and string/char literal contents, preserving offsets and
// newlines. Ordinary strings are only blanked when closed on the same line,
// so stray quotes in surrounding prose do not swallow the rest of the text.
inline std::string rust_code_view(std::string_view s) {
  std::string v(s);
  const std::size_t n = v.size();
  auto blank = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < n; ++k)
      if (v[k] != '\n') v[k] = ' ';
  };
  std::size_t i = 0;
  while (i < n) {
    char c = v[i];
    if (c == '/' && i + 1 < n && v[i + 1] == '/') {
      std::size_t e = v.find('\n', i);
      if (e == std::string::npos) e = n;
      blank(i, e);
      i = e;
    } else if (c == '/' && i + 1 < n && v[i + 1] == '*') {
      int depth = 1;
      std::size_t k = i + 2;
      while (k < n && depth > 0) {
        if (v[k] == '/' && k + 1 < n && v[k + 1] == '*') {
          ++depth;
          k += 2;
        } else if (v[k] == '*' && k + 1 < n && v[k + 1] == '/') {
          --depth;
          k += 2;
        } else {
          ++k;
        }
      }
      blank(i, k);
      i = k;
    } else if (c == 'r' && i + 1 < n && (v[i + 1] == '"' || v[i + 1] == '#') &&
               (i == 0 || !text::is_ident_char(v[i - 1]))) {
      std::size_t k = i + 1, hashes = 0;
      while (k < n && v[k] == '#') ++hashes, ++k;
      if (k < n && v[k] == '"') {
        std::string close = "\"" + std::string(hashes, '#');
        std::size_t e = v.find(close, k + 1);
        if (e != std::string::npos) {
          blank(i, e + close.size());
          i = e + close.size();
          continue;
        }
      }
      ++i;
    } else if (c == '"') {
      std::size_t k = i + 1;
      while (k < n && v[k] != '"' && v[k] != '\n') {
        if (v[k] == '\\') ++k;
        ++k;
      }
      if (k < n && v[k] == '"') {
        blank(i, k + 1);
        i = k + 1;
      } else {
        ++i;
      }
    } else if (c == '\'') {
      // Char literal ('x', '\n', '\u{1F600}'); otherwise a lifetime or prose.
      if (i + 2 < n && v[i + 1] != '\\' && v[i + 2] == '\'') {
        blank(i, i + 3);
        i += 3;
      } else if (i + 1 < n && v[i + 1] == '\\') {
        std::size_t e = v.find('\'', i + 2);
        if (e != std::string::npos && e - i <= 12) {
          blank(i, e + 1);
          i = e + 1;
        } else {
          ++i;
        }
      } else {
        ++i;
      }
    } else {
      ++i;
    }
  }
  return v;
}

inline bool is_rust_reserved(std::string_view w) {
  static const std::set<std::string_view> kWords{
      "as",     "break",  "const",  "continue", "crate",   "else",    "enum",  "extern",
      "false",  "fn",     "for",    "if",       "impl",    "in",      "let",   "loop",
      "match",  "mod",    "move",   "mut",      "pub",     "ref",     "return", "self",
      "Self",   "static", "struct", "super",    "trait",   "true",    "type",  "unsafe",
      "use",    "where",  "while",  "async",    "await",   "dyn",     "abstract", "become",
      "box",    "do",     "final",  "macro",    "override", "priv",   "typeof", "unsized",
      "virtual", "yield", "try",    "union",    "bool",    "char",    "str",   "i8",
      "i16",    "i32",    "i64",    "i128",     "isize",   "u8",      "u16",   "u32",
      "u64",    "u128",   "usize",  "f32",      "f64"};
  return kWords.contains(w);
}

struct UseTreeResult {
  std::vector<Candidate> roots;
  std::vector<std::string> bound;
};

class UseTreeParser {
 public:
  UseTreeParser(std::string_view s, std::size_t p) : s_(s), p_(p) {}

  // Parses "tree ;" starting after the `use` keyword.
  bool parse(UseTreeResult& result) {
    if (!tree(true, {}, result)) return false;
    p_ = skip_ws(s_, p_);
    return p_ < s_.size() && s_[p_] == ';';
  }

  std::size_t end() const { return p_; }

 private:
  bool tree(bool at_root, std::string parent, UseTreeResult& result) {
    p_ = skip_ws(s_, p_);
    if (s_.substr(p_, 2) == "::") p_ = skip_ws(s_, p_ + 2);
    if (p_ >= s_.size()) return false;
    if (s_[p_] == '{') return group(at_root, parent, result);
    if (s_[p_] == '*') {
      ++p_;
      return true;
    }
    std::size_t path_start = p_;
    std::string last;
    std::string prev;
    bool first = true;
    for (;;) {
      std::size_t n = scan_ident(s_, p_);
      if (n == 0) return false;
      prev = last;
      last = std::string(s_.substr(p_, n));
      if (first && at_root) result.roots.push_back({p_, {}, RefKind::use_decl});
      first = false;
      p_ += n;
      std::size_t q = skip_ws(s_, p_);
      if (s_.substr(q, 2) != "::") break;
      q = skip_ws(s_, q + 2);
      if (q < s_.size() && (s_[q] == '{' || s_[q] == '*')) {
        std::size_t path_end = p_;
        if (at_root) result.roots.back().raw = std::string(s_.substr(path_start, path_end - path_start));
        p_ = q;
        if (s_[q] == '*') {
          ++p_;
          return true;
        }
        return group(false, last, result);
      }
      p_ = q;
    }
    if (at_root) result.roots.back().raw = compact(s_.substr(path_start, p_ - path_start));
    std::string bound = last == "self" ? (prev.empty() ? parent : prev) : last;
    std::size_t q = skip_ws(s_, p_);
    if (text::starts_with_word(s_.substr(q), "as")) {
      q = skip_ws(s_, q + 2);
      std::size_t n = scan_ident(s_, q);
      if (n == 0) return false;
      bound = std::string(s_.substr(q, n));
      p_ = q + n;
    }
    if (!bound.empty() && bound != "_") result.bound.push_back(bound);
    return true;
  }

  bool group(bool at_root, const std::string& parent, UseTreeResult& result) {
    ++p_;  // '{'
    for (;;) {
      p_ = skip_ws(s_, p_);
      if (p_ < s_.size() && s_[p_] == '}') {
        ++p_;
        return true;
      }
      if (!tree(at_root, parent, result)) return false;
      p_ = skip_ws(s_, p_);
      if (p_ >= s_.size()) return false;
      if (s_[p_] == ',') {
        ++p_;
        continue;
      }
      if (s_[p_] == '}') {
        ++p_;
        return true;
      }
      return false;
    }
  }

  static std::string compact(std::string_view path) {
    std::string out;
    for (char c : path)
      if (!text::is_space(c)) out.push_back(c);
    return out;
  }

  std::string_view s_;
  std::size_t p_;
};

// Offset of the first token on the line containing `p`.
inline bool first_token_on_line(std::string_view s, std::size_t p) {
  std::size_t k = p;
  while (k > 0 && s[k - 1] != '\n') {
    --k;
    if (!text::is_space(s[k])) return false;
  }
  return true;
}

inline bool at_statement_start(std::string_view s, std::size_t p) {
  std::size_t k = p;
  while (k > 0 && text::is_space(s[k - 1]) && s[k - 1] != '\n') --k;
  if (k == 0 || s[k - 1] == '\n') return true;
  char prev = s[k - 1];
  if (prev == ';' || prev == '{' || prev == '}') return true;
  // `pub use`, `pub(crate) use`
  std::size_t e = k;
  if (prev == ')') {
    std::size_t open = s.rfind('(', k - 1);
    if (open == std::string_view::npos) return false;
    e = open;
    while (e > 0 && text::is_space(s[e - 1])) --e;
  }
  if (e >= 3 && s.substr(e - 3, 3) == "pub" && (e == 3 || !text::is_ident_char(s[e - 4])))
    return at_statement_start(s, e - 3);
  return false;
}

inline void rust_candidates(std::string_view original, std::vector<Candidate>& out) {
  const std::string view = rust_code_view(original);
  const std::string_view s = view;
  std::set<std::string, std::less<>> bound;
  std::vector<std::pair<std::size_t, std::size_t>> claimed;  // [begin, end) of use/extern statements

  auto word_at = [&](std::size_t p, std::string_view w) {
    if (s.substr(p, w.size()) != w) return false;
    if (p > 0 && (text::is_ident_char(s[p - 1]) || s[p - 1] == '$' || s[p - 1] == '#'))
      return false;
    std::size_t e = p + w.size();
    return e >= s.size() || !text::is_ident_char(s[e]);
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!text::is_ident_start(s[i])) continue;
    if (word_at(i, "use") && at_statement_start(s, i)) {
      UseTreeParser parser(s, i + 3);
      UseTreeResult r;
      if (i + 3 < s.size() && text::is_space(s[i + 3]) && parser.parse(r)) {
        for (auto& c : r.roots) out.push_back(std::move(c));
        bound.insert(r.bound.begin(), r.bound.end());
        claimed.emplace_back(i, parser.end() + 1);
        i = parser.end();
        continue;
      }
    }
    if (word_at(i, "extern")) {
      std::size_t p = skip_ws(s, i + 6);
      if (p > i + 6 && word_at(p, "crate")) {
        std::size_t q = skip_ws(s, p + 5);
        std::size_t n = scan_ident(s, q);
        if (q > p + 5 && n > 0) {
          std::size_t name_at = q;
          std::size_t e = skip_ws(s, q + n);
          std::string alias;
          if (text::starts_with_word(s.substr(e), "as")) {
            std::size_t a = skip_ws(s, e + 2);
            std::size_t an = scan_ident(s, a);
            if (an > 0) {
              alias = std::string(s.substr(a, an));
              e = skip_ws(s, a + an);
            }
          }
          if (e < s.size() && s[e] == ';') {
            out.push_back({name_at, std::string(s.substr(name_at, n)), RefKind::extern_crate});
            bound.insert(alias.empty() ? std::string(s.substr(name_at, n)) : alias);
            claimed.emplace_back(i, e + 1);
            i = e;
            continue;
          }
        }
      }
    }
    for (std::string_view decl : {"mod", "enum", "struct", "trait", "type", "union"}) {
      if (word_at(i, decl)) {
        std::size_t p = skip_ws(s, i + decl.size());
        std::size_t n = scan_ident(s, p);
        if (p > i + decl.size() && n > 0) bound.insert(std::string(s.substr(p, n)));
      }
    }
    // Skip the rest of this identifier.
    while (i + 1 < s.size() && text::is_ident_char(s[i + 1])) ++i;
  }

  auto in_claimed = [&](std::size_t p) {
    for (auto [b, e] : claimed)
      if (p >= b && p < e) return true;
    return false;
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!text::is_ident_start(s[i])) continue;
    std::size_t n = scan_ident(s, i);
    std::size_t start = i;
    i += n - 1;
    if (start > 0) {
      char prev = s[start - 1];
      if (text::is_ident_char(prev) || prev == ':' || prev == '.' || prev == '$' || prev == '#' ||
          prev == '\'')
        continue;
    }
    std::size_t after = start + n;
    if (s.substr(after, 2) != "::") continue;
    if (after + 2 < s.size() && (s[after + 2] == '<' || s[after + 2] == ':')) continue;
    std::string_view name = s.substr(start, n);
    if (name.front() >= 'A' && name.front() <= 'Z') continue;
    if (is_rust_reserved(name) || bound.contains(name) || in_claimed(start)) continue;
    // raw: the full `a::b::c` path
    std::size_t e = after;
    while (s.substr(e, 2) == "::") {
      std::size_t m = scan_ident(s, e + 2);
      if (m == 0) break;
      e += 2 + m;
    }
    out.push_back({start, std::string(s.substr(start, e - start)), RefKind::path_ref});
  }
}

}  // namespace detail

inline std::vector<PackageRef> extract_imports(std::string_view text, SourceLanguage lang,
                                               const ExtractionConfig& config) {
  if (auto bad = text::find_invalid_utf8(text); bad != std::string_view::npos)
    throw InputError("input is not valid UTF-8 (byte offset " + std::to_string(bad) + ")");

  std::vector<detail::Candidate> candidates;
  switch (lang) {
    case SourceLanguage::python: detail::python_candidates(text, candidates); break;
    case SourceLanguage::javascript: detail::javascript_candidates(text, candidates); break;
    case SourceLanguage::rust: detail::rust_candidates(text, candidates); break;
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.offset < b.offset; });

  text::LineIndex lines(text);
  std::vector<PackageRef> out;
  std::set<std::string, std::less<>> seen;
  for (auto& c : candidates) {
    if (c.raw.empty()) continue;
    if (!config.include_relative && is_relative(c.raw, lang)) continue;
    std::string normalized = normalize_name(root_package(c.raw, lang), lang);
    if (normalized.empty() || is_builtin(normalized, lang, config)) continue;
    if (!seen.insert(normalized).second) continue;
    out.push_back({std::move(c.raw), std::move(normalized), lang, c.kind, lines.line_of(c.offset)});
  }
  return out;
}

}  // namespace pkghallu
