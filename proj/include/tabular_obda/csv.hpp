// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tabular_obda/core_model.hpp"

namespace obda {

/// RFC 4180 record reader: comma delimiter unless overridden, double-quote
/// quoting with "" escapes, tolerant of CRLF line endings.
std::vector<std::vector<std::string>> parse_csv_text(const std::string& text,
                                                     char delimiter = ',');

std::string to_csv_text(const std::vector<std::vector<std::string>>& records,
                        char delimiter = ',');

struct ReadStats {
    std::uint64_t bytes_read = 0;  // bytes consumed from disk, header probes included
};

/// Loads the referenced CSV files under `dir`. The first record is the
/// header unless the table's metadata declares rowTitles, in which case
/// every record is data and the header comes from the annotation.
/// A record whose width differs from the header is a RaggedRow error.
std::vector<TabularSource> read_sources(const std::filesystem::path& dir,
                                        const std::vector<std::string>& referenced,
                                        const MetadataDocument& metadata,
                                        ReadStats* stats = nullptr);

/// Reads only the header line of a file (used for discarded sources, so
/// byte accounting stays honest without loading data).
std::uint64_t probe_header_bytes(const std::filesystem::path& file);

void write_source_csv(const TabularSource& source, const std::filesystem::path& file);

}  // namespace obda
