// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/csv.hpp"

#include <fstream>
#include <sstream>

namespace obda {

std::vector<std::vector<std::string>> parse_csv_text(const std::string& text, char delimiter) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(record);
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\r') {
            // swallowed; \n terminates the record
        } else if (c == '\n') {
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) raise(ErrorKind::Syntax, "unterminated quoted field in CSV input");
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

namespace {

bool needs_quoting(const std::string& field, char delimiter) {
    return field.find(delimiter) != std::string::npos ||
           field.find('"') != std::string::npos || field.find('\n') != std::string::npos ||
           field.find('\r') != std::string::npos;
}

std::string quote(const std::string& field) {
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string to_csv_text(const std::vector<std::vector<std::string>>& records, char delimiter) {
    std::string out;
    for (const auto& record : records) {
        for (std::size_t i = 0; i < record.size(); ++i) {
            if (i) out.push_back(delimiter);
            out += needs_quoting(record[i], delimiter) ? quote(record[i]) : record[i];
        }
        out.push_back('\n');
    }
    return out;
}

std::vector<TabularSource> read_sources(const std::filesystem::path& dir,
                                        const std::vector<std::string>& referenced,
                                        const MetadataDocument& metadata, ReadStats* stats) {
    std::vector<TabularSource> out;
    for (const auto& path : referenced) {
        auto file = dir / path;
        std::ifstream in(file, std::ios::binary);
        if (!in) raise(ErrorKind::Io, "cannot open '" + file.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        if (stats) stats->bytes_read += text.size();

        const auto* table = metadata.table(path);
        char delimiter = table && table->delimiter ? *table->delimiter : ',';
        auto records = parse_csv_text(text, delimiter);

        TabularSource src;
        src.path = path;
        std::size_t first_data = 0;
        if (table && table->row_titles) {
            src.columns = *table->row_titles;
        } else {
            if (records.empty()) raise(ErrorKind::MissingHeader, path + ": empty file, no header");
            src.columns = records[0];
            first_data = 1;
        }
        for (std::size_t r = first_data; r < records.size(); ++r) {
            if (records[r].size() != src.columns.size())
                raise(ErrorKind::RaggedRow,
                      path + ": row " + std::to_string(r + 1) + " has " +
                          std::to_string(records[r].size()) + " cells, expected " +
                          std::to_string(src.columns.size()));
            Row row;
            row.reserve(records[r].size());
            for (auto& cell : records[r]) row.emplace_back(std::move(cell));
            src.rows.push_back(std::move(row));
        }
        out.push_back(std::move(src));
    }
    return out;
}

std::uint64_t probe_header_bytes(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) raise(ErrorKind::Io, "cannot open '" + file.string() + "'");
    std::string line;
    std::getline(in, line);
    return line.size() + 1;
}

void write_source_csv(const TabularSource& source, const std::filesystem::path& file) {
    std::vector<std::vector<std::string>> records;
    records.push_back(source.columns);
    for (const auto& row : source.rows) {
        std::vector<std::string> record;
        record.reserve(row.size());
        for (const auto& cell : row) record.push_back(cell.value_or(""));
        records.push_back(std::move(record));
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write '" + file.string() + "'");
    out << to_csv_text(records);
}

}  // namespace obda
