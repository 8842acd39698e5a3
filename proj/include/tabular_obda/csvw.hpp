// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "tabular_obda/core_model.hpp"

namespace obda {

struct ParsedMetadata {
    MetadataDocument document;
    std::vector<Diagnostic> warnings;
};

/// Parses a CSVW-subset metadata document (JSON with a `tables` array).
/// Unknown keys and out-of-enum datatype bases produce warnings; a
/// separator on a non-string column is a ConflictingAnnotation error.
ParsedMetadata parse_metadata(const std::string& text);

/// Deterministic JSON serialization; parse_metadata of the output
/// reproduces the document structurally.
std::string serialize_metadata(const MetadataDocument& doc);

}  // namespace obda
