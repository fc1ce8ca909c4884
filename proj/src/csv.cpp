#include "simjudge/csv.hpp"

#include "simjudge/errors.hpp"

namespace simjudge::csv {

Table parse(std::string_view text) {
    Table table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool have_header = false;

    auto finish_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        // A bare blank line is skipped rather than read as a one-field record.
        const bool blank = record.size() == 1 && record[0].empty();
        if (!blank) {
            if (!have_header) {
                table.header = std::move(record);
                have_header = true;
            } else {
                if (record.size() != table.header.size()) {
                    throw InputError("CSV line " + std::to_string(record_line) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, found " +
                                     std::to_string(record.size()));
                }
                table.rows.push_back(std::move(record));
                table.lines.push_back(record_line);
            }
        }
        record.clear();
    };

    std::size_t i = 0;
    if (text.starts_with("\xEF\xBB\xBF")) i = 3;
    for (; i < text.size(); ++i) {
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
                if (!field.empty()) {
                    throw InputError("CSV line " + std::to_string(line) +
                                     ": quote inside unquoted field");
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                field.push_back(c);
                break;
            case '\n':
                finish_record();
                ++line;
                record_line = line;
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) throw InputError("CSV: unterminated quoted field starting near line " +
                                    std::to_string(record_line));
    if (field_started || !record.empty()) finish_record();
    return table;
}

std::vector<std::size_t> require_columns(const std::vector<std::string>& header,
                                         const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& name : names) {
        std::size_t k = 0;
        while (k < header.size() && header[k] != name) ++k;
        if (k == header.size()) throw InputError("CSV: missing required column '" + name + "'");
        idx.push_back(k);
    }
    return idx;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace simjudge::csv
