// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/csvw.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace obda {

using nlohmann::json;

namespace {

void warn_unknown_keys(const json& obj, const std::set<std::string>& known,
                       const std::string& where, std::vector<Diagnostic>& warnings) {
    for (const auto& [key, value] : obj.items())
        if (!known.count(key))
            warnings.push_back(warning_at(where, "ignoring unknown key '" + key + "'"));
}

std::vector<std::string> string_or_list(const json& value, const std::string& where) {
    std::vector<std::string> out;
    if (value.is_string()) {
        out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
        for (const auto& v : value) {
            if (!v.is_string()) raise(ErrorKind::Syntax, where + ": expected strings");
            out.push_back(v.get<std::string>());
        }
    } else {
        raise(ErrorKind::Syntax, where + ": expected string or list of strings");
    }
    return out;
}

char single_char(const std::string& value, const std::string& where) {
    if (value.size() != 1)
        raise(ErrorKind::ConflictingAnnotation, where + ": must be a single character");
    return value[0];
}

ColumnMetadata parse_column(const json& node, const std::string& where,
                            std::vector<Diagnostic>& warnings) {
    if (!node.is_object()) raise(ErrorKind::Syntax, where + ": column must be an object");
    warn_unknown_keys(node,
                      {"name", "datatype", "required", "default", "null", "separator",
                       "minimum", "maximum", "titles"},
                      where, warnings);
    ColumnMetadata col;
    if (!node.contains("name") || !node["name"].is_string())
        raise(ErrorKind::Syntax, where + ": column needs a name");
    col.name = node["name"].get<std::string>();
    const std::string colwhere = where + ":" + col.name;

    bool datatype_declared = false;
    if (node.contains("datatype")) {
        datatype_declared = true;
        const auto& dt = node["datatype"];
        std::string base;
        if (dt.is_string()) {
            base = dt.get<std::string>();
        } else if (dt.is_object()) {
            warn_unknown_keys(dt, {"base", "format", "minimum", "maximum"}, colwhere, warnings);
            base = dt.value("base", "string");
            if (dt.contains("format")) col.format = dt["format"].get<std::string>();
            if (dt.contains("minimum")) col.minimum = dt["minimum"].get<double>();
            if (dt.contains("maximum")) col.maximum = dt["maximum"].get<double>();
        } else {
            raise(ErrorKind::Syntax, colwhere + ": datatype must be string or object");
        }
        auto parsed = datatype_from_string(base);
        if (!parsed) {
            warnings.push_back(warning_at(colwhere, "datatype base '" + base +
                                                        "' outside the supported set, using string"));
            parsed = Datatype::String;
        }
        col.datatype = *parsed;
    }
    if (node.contains("required")) col.required = node["required"].get<bool>();
    if (node.contains("default")) col.default_value = node["default"].get<std::string>();
    if (node.contains("null")) col.null_markers = string_or_list(node["null"], colwhere);
    if (node.contains("minimum")) col.minimum = node["minimum"].get<double>();
    if (node.contains("maximum")) col.maximum = node["maximum"].get<double>();
    if (node.contains("separator")) {
        col.separator = single_char(node["separator"].get<std::string>(), colwhere + ":separator");
        if (datatype_declared && col.datatype != Datatype::String)
            raise(ErrorKind::ConflictingAnnotation,
                  colwhere + ": separator requires a string column (cells are split before typing)");
    }
    if (col.minimum && col.maximum && *col.minimum > *col.maximum)
        raise(ErrorKind::ConflictingAnnotation, colwhere + ": minimum exceeds maximum");
    return col;
}

TableMetadata parse_table(const json& node, std::vector<Diagnostic>& warnings) {
    if (!node.is_object() || !node.contains("url") || !node["url"].is_string())
        raise(ErrorKind::Syntax, "metadata: every table needs a url");
    TableMetadata table;
    table.url = node["url"].get<std::string>();
    const std::string where = "metadata:" + table.url;
    warn_unknown_keys(node, {"url", "tableSchema", "dialect"}, where, warnings);

    if (node.contains("dialect")) {
        const auto& dialect = node["dialect"];
        warn_unknown_keys(dialect, {"delimiter"}, where, warnings);
        if (dialect.contains("delimiter"))
            table.delimiter = single_char(dialect["delimiter"].get<std::string>(), where + ":delimiter");
    }

    if (!node.contains("tableSchema")) return table;
    const auto& schema = node["tableSchema"];
    warn_unknown_keys(schema, {"columns", "primaryKey", "foreignKeys", "rowTitles"}, where,
                      warnings);

    if (schema.contains("columns")) {
        for (const auto& c : schema["columns"]) table.columns.push_back(parse_column(c, where, warnings));
    }
    if (schema.contains("primaryKey"))
        table.primary_key = string_or_list(schema["primaryKey"], where + ":primaryKey");
    if (schema.contains("rowTitles"))
        table.row_titles = string_or_list(schema["rowTitles"], where + ":rowTitles");
    if (schema.contains("foreignKeys")) {
        for (const auto& fk : schema["foreignKeys"]) {
            warn_unknown_keys(fk, {"columnReference", "reference"}, where, warnings);
            ForeignKeyMetadata meta;
            meta.columns = string_or_list(fk.at("columnReference"), where + ":foreignKey");
            const auto& ref = fk.at("reference");
            meta.referenced_table = ref.at("resource").get<std::string>();
            meta.referenced_columns = string_or_list(ref.at("columnReference"), where + ":foreignKey");
            if (meta.columns.size() != meta.referenced_columns.size())
                raise(ErrorKind::Syntax, where + ": foreign key column lists differ in length");
            table.foreign_keys.push_back(std::move(meta));
        }
    }
    return table;
}

}  // namespace

ParsedMetadata parse_metadata(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorKind::Syntax, std::string("metadata: ") + e.what());
    }
    if (!root.is_object() || !root.contains("tables") || !root["tables"].is_array())
        raise(ErrorKind::Syntax, "metadata: document must be an object with a 'tables' array");

    ParsedMetadata out;
    warn_unknown_keys(root, {"tables", "@context"}, "metadata", out.warnings);
    std::set<std::string> urls;
    for (const auto& t : root["tables"]) {
        auto table = parse_table(t, out.warnings);
        if (!urls.insert(table.url).second)
            raise(ErrorKind::ConflictingAnnotation,
                  "metadata: more than one entry for table '" + table.url + "'");
        out.document.tables.push_back(std::move(table));
    }
    return out;
}

std::string serialize_metadata(const MetadataDocument& doc) {
    json root;
    root["tables"] = json::array();
    for (const auto& table : doc.tables) {
        json t;
        t["url"] = table.url;
        if (table.delimiter) t["dialect"] = {{"delimiter", std::string(1, *table.delimiter)}};
        json schema = json::object();
        if (!table.columns.empty()) {
            json cols = json::array();
            for (const auto& col : table.columns) {
                json c;
                c["name"] = col.name;
                json dt;
                dt["base"] = to_string(col.datatype);
                if (col.format) dt["format"] = *col.format;
                c["datatype"] = dt;
                if (col.required) c["required"] = true;
                if (col.default_value) c["default"] = *col.default_value;
                if (!col.null_markers.empty()) c["null"] = col.null_markers;
                if (col.separator) c["separator"] = std::string(1, *col.separator);
                if (col.minimum) c["minimum"] = *col.minimum;
                if (col.maximum) c["maximum"] = *col.maximum;
                cols.push_back(c);
            }
            schema["columns"] = cols;
        }
        if (table.primary_key) schema["primaryKey"] = *table.primary_key;
        if (table.row_titles) schema["rowTitles"] = *table.row_titles;
        if (!table.foreign_keys.empty()) {
            json fks = json::array();
            for (const auto& fk : table.foreign_keys) {
                json f;
                f["columnReference"] = fk.columns;
                f["reference"] = {{"resource", fk.referenced_table},
                                  {"columnReference", fk.referenced_columns}};
                fks.push_back(f);
            }
            schema["foreignKeys"] = fks;
        }
        if (!schema.empty()) t["tableSchema"] = schema;
        root["tables"].push_back(t);
    }
    return root.dump(2) + "\n";
}

}  // namespace obda
