// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "tabular_obda/core_model.hpp"
#include "tabular_obda/functions.hpp"

namespace obda {

/// Parses a YARRRML-style mapping document (YAML or JSON). Supported
/// keys: prefixes, mappings, sources ([path~csv]), s, po (two-element
/// pairs or p/o maps), join objects (mapping + condition.function: equal
/// with str1/str2 parameters), function objects (function + parameters)
/// and per-object datatype hints.
MappingDocument parse_mapping(const std::string& text);
MappingDocument parse_mapping(const std::string& text, const FunctionRegistry& registry);

/// Deterministic serialization in the same subset; parse_mapping of the
/// output reproduces the document structurally.
std::string serialize_mapping(const MappingDocument& doc);

}  // namespace obda
