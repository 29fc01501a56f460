/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/util.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace lemmaforge::util {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void append_line(const fs::path& path, std::string_view line) {
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  // A crash can leave a torn record with no trailing newline; terminate it
  // first so the new record never glues onto the fragment.
  bool needs_newline = false;
  {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (in && in.tellg() > 0) {
      in.seekg(-1, std::ios::end);
      char last = 0;
      in.get(last);
      needs_newline = last != '\n';
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to file: " + path.string());
  if (needs_newline) out.put('\n');
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.put('\n');
  out.flush();
}

std::vector<std::string> read_jsonl_lines(const fs::path& path) {
  std::vector<std::string> lines;
  if (!fs::exists(path)) return lines;
  std::string text = read_file(path);
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) break;  // torn final record, discard
    std::string line = text.substr(start, nl - start);
    if (!trim(line).empty()) lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    std::string line(text.substr(start, nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  if (!lines.empty() && lines.back().empty() && text.size() > 0 && text.back() == '\n') {
    lines.pop_back();
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string_view rtrim(std::string_view s) {
  size_t e = s.size();
  while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(0, e);
}

bool starts_with_word(std::string_view line, std::string_view word) {
  std::string_view t = trim(line);
  if (t.substr(0, word.size()) != word) return false;
  if (t.size() == word.size()) return true;
  return !is_ident_start_byte(t, word.size()) || t[word.size()] == ' ';
}

int indent_of(std::string_view line) {
  int n = 0;
  for (char c : line) {
    if (c == ' ') ++n;
    else break;
  }
  return n;
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool in_ws = true;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_ws) out.push_back(' ');
      in_ws = true;
    } else {
      out.push_back(c);
      in_ws = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string fmt_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string fmt_pct(double numerator, double denominator) {
  double pct = denominator == 0.0 ? 0.0 : 100.0 * numerator / denominator;
  return fmt_fixed(pct, 1) + "%";
}

std::string iso8601_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

// Codepoints that act as operators/punctuation in Lean source; every other
// non-ASCII codepoint is treated as part of an identifier (ℕ, h₀, α, ...).
bool is_operator_codepoint(uint32_t cp) {
  switch (cp) {
    case 0x00AC:  // ¬
    case 0x00D7:  // ×
    case 0x00F7:  // ÷
    case 0x2019:
    case 0x2032:  // ′ is ident-ish in Lean but never starts one; treat as ident
      return false;
    case 0x2190: case 0x2192: case 0x2194:  // ← → ↔
    case 0x21A6:                            // ↦
    case 0x2200: case 0x2203: case 0x2204:  // ∀ ∃ ∄
    case 0x2208: case 0x2209:               // ∈ ∉
    case 0x2211: case 0x220F:               // ∑ ∏
    case 0x2223: case 0x2224:               // ∣ ∤
    case 0x2227: case 0x2228:               // ∧ ∨
    case 0x2229: case 0x222A:               // ∩ ∪
    case 0x2260: case 0x2264: case 0x2265:  // ≠ ≤ ≥
    case 0x2282: case 0x2286:               // ⊂ ⊆
    case 0x22A2:                            // ⊢
    case 0x2308: case 0x2309: case 0x230A: case 0x230B:  // ceil/floor
    case 0x27E8: case 0x27E9:               // ⟨ ⟩
    case 0x2983: case 0x2984:               // ⦃ ⦄
    case 0x00B7:                            // ·
    case 0x2218:                            // ∘
    case 0x2248: case 0x2261:               // ≈ ≡
      return true;
    default:
      return false;
  }
}

// Decodes the UTF-8 codepoint at pos; advances len. Invalid bytes decode as
// themselves with length 1.
uint32_t decode_utf8(std::string_view text, size_t pos, size_t& len) {
  unsigned char c = static_cast<unsigned char>(text[pos]);
  if (c < 0x80) {
    len = 1;
    return c;
  }
  size_t extra = 0;
  uint32_t cp = 0;
  if ((c & 0xE0) == 0xC0) { extra = 1; cp = c & 0x1F; }
  else if ((c & 0xF0) == 0xE0) { extra = 2; cp = c & 0x0F; }
  else if ((c & 0xF8) == 0xF0) { extra = 3; cp = c & 0x07; }
  else { len = 1; return c; }
  if (pos + extra >= text.size()) {
    len = 1;
    return c;
  }
  for (size_t i = 1; i <= extra; ++i) {
    unsigned char cc = static_cast<unsigned char>(text[pos + i]);
    if ((cc & 0xC0) != 0x80) { len = 1; return c; }
    cp = (cp << 6) | (cc & 0x3F);
  }
  len = extra + 1;
  return cp;
}

bool is_ascii_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ascii_ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' ||
         c == '!' || c == '?';
}

}  // namespace

bool is_ident_start_byte(std::string_view text, size_t pos) {
  if (pos >= text.size()) return false;
  char c = text[pos];
  if (static_cast<unsigned char>(c) < 0x80) return is_ascii_ident_start(c);
  size_t len = 0;
  uint32_t cp = decode_utf8(text, pos, len);
  return !is_operator_codepoint(cp);
}

size_t ident_end(std::string_view text, size_t start) {
  size_t pos = start;
  while (pos < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[pos]);
    if (c < 0x80) {
      if (!is_ascii_ident_cont(static_cast<char>(c))) break;
      ++pos;
    } else {
      size_t len = 0;
      uint32_t cp = decode_utf8(text, pos, len);
      if (is_operator_codepoint(cp)) break;
      pos += len;
    }
  }
  return pos;
}

std::string rename_identifiers(
    std::string_view text, const std::vector<std::pair<std::string, std::string>>& renames) {
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    if (is_ident_start_byte(text, pos)) {
      size_t end = ident_end(text, pos);
      std::string_view tok = text.substr(pos, end - pos);
      bool replaced = false;
      for (const auto& [from, to] : renames) {
        if (tok == from) {
          out += to;
          replaced = true;
          break;
        }
      }
      if (!replaced) out += tok;
      pos = end;
    } else {
      out += text[pos];
      ++pos;
    }
  }
  return out;
}

}  // namespace lemmaforge::util
