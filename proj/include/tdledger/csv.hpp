#pragma once

// Minimal RFC 4180 reader/writer: comma separated, double-quote escaping,
// CRLF or LF line endings, quoted fields may span lines.

#include <string>
#include <string_view>
#include <vector>

#include "tdledger/error.hpp"

namespace tdledger::csv {

using Row = std::vector<std::string>;

inline std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    // A lone empty field is a blank line, not a record.
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  // Skip a UTF-8 byte-order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty()) {
          throw Error(errc::parse_error,
                      "stray quote in unquoted field on line " + std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default: field.push_back(c);
    }
  }
  if (in_quotes) throw Error(errc::parse_error, "unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

inline bool needs_quoting(std::string_view f) {
  return f.find_first_of(",\"\r\n") != std::string_view::npos ||
         (!f.empty() && (f.front() == ' ' || f.back() == ' '));
}

inline std::string quote(std::string_view f) {
  if (!needs_quoting(f)) return std::string(f);
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::string& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += quote(row[i]);
  }
  out += "\r\n";
}

inline std::string write(const std::vector<Row>& rows) {
  std::string out;
  for (const auto& r : rows) write_row(out, r);
  return out;
}

}  // namespace tdledger::csv
