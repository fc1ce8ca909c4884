#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace simjudge::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based source line of each row, for error messages.
    std::vector<std::size_t> lines;
};

// RFC-4180 reader: quoted fields may contain commas, quotes ("") and line
// breaks. Accepts LF or CRLF. An empty document yields an empty header.
// Throws InputError on unterminated quotes or ragged rows.
Table parse(std::string_view text);

// Column positions of `names` in `header`; throws InputError naming the first
// missing column.
std::vector<std::size_t> require_columns(const std::vector<std::string>& header,
                                         const std::vector<std::string>& names);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace simjudge::csv
