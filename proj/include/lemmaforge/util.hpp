/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lemmaforge {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

namespace util {

std::string read_file(const std::filesystem::path& path);

/// Writes via a temp file in the same directory followed by rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void append_line(const std::filesystem::path& path, std::string_view line);

/// Reads a JSONL-style file as raw lines. A torn final line (no trailing
/// newline) is dropped, so interrupted appends never poison a resume.
std::vector<std::string> read_jsonl_lines(const std::filesystem::path& path);

std::vector<std::string> split_lines(std::string_view text);
std::string join_lines(const std::vector<std::string>& lines);

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
bool starts_with_word(std::string_view line, std::string_view word);

int indent_of(std::string_view line);

/// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_ws(std::string_view s);

/// "12.5%" style formatting with one decimal, stable across platforms.
std::string fmt_pct(double numerator, double denominator);
std::string fmt_fixed(double value, int decimals);

std::string iso8601_now();

/// Lean identifier scanning over UTF-8 text. Non-ASCII codepoints count as
/// identifier characters unless they are known operator/punctuation symbols.
bool is_ident_start_byte(std::string_view text, size_t pos);
size_t ident_end(std::string_view text, size_t start);

/// Replaces whole identifier tokens per the given mapping.
std::string rename_identifiers(std::string_view text,
                               const std::vector<std::pair<std::string, std::string>>& renames);

}  // namespace util
}  // namespace lemmaforge
