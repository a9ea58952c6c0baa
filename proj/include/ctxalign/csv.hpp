#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ctxalign/errors.hpp"

namespace ctxalign::csv {

/// Strict CSV reader: comma separators, standard double-quote quoting
/// with "" escapes, records ended by \n or \r\n. Blank records are
/// dropped. Errors carry 1-based record/field locators.
inline std::vector<std::vector<std::string>> parse(std::string_view bytes) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  std::size_t row = 1;
  std::size_t col = 1;
  bool in_quotes = false;
  bool field_was_quoted = false;

  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
    ++col;
  };
  const auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) {
      records.push_back(std::move(record));
    }
    record.clear();
    ++row;
    col = 1;
  };

  std::size_t i = 0;
  while (i < bytes.size()) {
    const char c = bytes[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError("row " + std::to_string(row) + ", field " +
                           std::to_string(col) +
                           ": unexpected '\"' inside an unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        if (i + 1 < bytes.size() && bytes[i + 1] == '\n') {
          end_record();
          i += 2;
        } else {
          throw ParseError("row " + std::to_string(row) +
                           ": bare carriage return in record");
        }
        break;
      case '\n':
        end_record();
        ++i;
        break;
      default:
        if (field_was_quoted) {
          throw ParseError("row " + std::to_string(row) + ", field " +
                           std::to_string(col) +
                           ": content after a closing quote");
        }
        field.push_back(c);
        ++i;
        break;
    }
  }
  if (in_quotes) {
    throw ParseError("row " + std::to_string(row) +
                     ": unterminated quoted field");
  }
  if (!field.empty() || field_was_quoted || !record.empty()) {
    end_record();
  }
  return records;
}

inline std::string escape_field(std::string_view value) {
  const bool needs_quotes =
      value.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string out;
  out.reserve(value.size() + 2);
  out.push_back('"');
  for (const char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string write(const std::vector<std::vector<std::string>>& records) {
  std::string out;
  for (const std::vector<std::string>& record : records) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += escape_field(record[i]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace ctxalign::csv
