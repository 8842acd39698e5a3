// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/yarrrml.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <map>

namespace obda {

namespace {

class MappingParser {
public:
    explicit MappingParser(const FunctionRegistry& registry) : registry_(registry) {}

    MappingDocument parse(const std::string& text) {
        YAML::Node root;
        try {
            root = YAML::Load(text);
        } catch (const YAML::Exception& e) {
            raise(ErrorKind::Syntax, std::string("mapping: ") + e.what());
        }
        if (!root.IsMap()) raise(ErrorKind::Syntax, "mapping: document must be a map");

        if (root["prefixes"]) {
            for (const auto& kv : root["prefixes"])
                prefixes_[kv.first.as<std::string>()] = kv.second.as<std::string>();
        }
        auto mappings = root["mappings"] ? root["mappings"] : root["mapping"];
        if (!mappings || !mappings.IsMap())
            raise(ErrorKind::Syntax, "mapping: missing 'mappings' section");

        MappingDocument doc;
        for (const auto& kv : mappings) {
            doc.triples_maps.push_back(parse_triples_map(kv.first.as<std::string>(), kv.second));
        }

        // Cross-map checks: ids are unique by YAML map construction, but
        // join parents can dangle.
        for (const auto& tm : doc.triples_maps)
            for (const auto& p : tm.pom)
                if (const auto* join = std::get_if<JoinRef>(&p.object))
                    if (!doc.find(join->parent_tm_id))
                        raise(ErrorKind::DanglingParentMap,
                              "mapping:" + tm.id + ": join condition parent '" +
                                  join->parent_tm_id + "' is not a mapping");
        return doc;
    }

private:
    TriplesMap parse_triples_map(const std::string& id, const YAML::Node& node) {
        if (!node.IsMap()) raise(ErrorKind::Syntax, "mapping:" + id + ": entry must be a map");
        TriplesMap tm;
        tm.id = id;

        auto sources = node["sources"] ? node["sources"] : node["source"];
        if (!sources) raise(ErrorKind::Syntax, "mapping:" + id + ": missing sources");
        std::vector<std::string> specs;
        if (sources.IsScalar()) {
            specs.push_back(sources.as<std::string>());
        } else if (sources.IsSequence()) {
            for (const auto& entry : sources) {
                if (entry.IsScalar()) specs.push_back(entry.as<std::string>());
                else if (entry.IsSequence() && entry.size() >= 1)
                    specs.push_back(entry[0].as<std::string>());
                else raise(ErrorKind::Syntax, "mapping:" + id + ": malformed source entry");
            }
        }
        if (specs.size() != 1)
            raise(ErrorKind::Syntax, "mapping:" + id + ": exactly one source per mapping");
        parse_source_spec(specs[0], tm);

        auto subject = node["s"] ? node["s"] : node["subject"];
        if (!subject || !subject.IsScalar())
            raise(ErrorKind::Syntax, "mapping:" + id + ": missing subject template 's'");
        tm.subject_template = Template::parse(strip_iri_tag(expand(subject.as<std::string>())));

        auto po = node["po"] ? node["po"] : node["predicateobjects"];
        if (po) {
            if (!po.IsSequence()) raise(ErrorKind::Syntax, "mapping:" + id + ": 'po' must be a list");
            for (const auto& entry : po) parse_po(id, entry, tm);
        }
        return tm;
    }

    void parse_source_spec(const std::string& spec, TriplesMap& tm) {
        auto tilde = spec.rfind('~');
        if (tilde == std::string::npos) {
            tm.source_path = spec;
            tm.source_kind = SourceKind::CsvFile;
            return;
        }
        std::string format = spec.substr(tilde + 1);
        tm.source_path = spec.substr(0, tilde);
        if (format == "csv") tm.source_kind = SourceKind::CsvFile;
        else if (format == "table") tm.source_kind = SourceKind::Table;
        else raise(ErrorKind::UnsupportedFeature, "source format '" + format + "'");
    }

    void parse_po(const std::string& id, const YAML::Node& entry, TriplesMap& tm) {
        std::string predicate;
        YAML::Node object;
        std::optional<std::string> datatype;

        if (entry.IsSequence()) {
            if (entry.size() != 2)
                raise(ErrorKind::Syntax, "mapping:" + id + ": po pairs must be [predicate, object]");
            predicate = entry[0].as<std::string>();
            object = entry[1];
        } else if (entry.IsMap()) {
            auto p = entry["p"] ? entry["p"] : entry["predicate"];
            auto o = entry["o"] ? entry["o"] : entry["object"];
            if (!p || !o) raise(ErrorKind::Syntax, "mapping:" + id + ": po map needs p and o");
            predicate = p.as<std::string>();
            object = o;
            if (entry["datatype"]) datatype = entry["datatype"].as<std::string>();
        } else {
            raise(ErrorKind::Syntax, "mapping:" + id + ": malformed po entry");
        }

        bool is_type = predicate == "a" || expand(predicate) == kRdfType;
        if (is_type) {
            if (!object.IsScalar())
                raise(ErrorKind::Syntax, "mapping:" + id + ": class object must be an IRI");
            if (tm.class_iri)
                raise(ErrorKind::Syntax, "mapping:" + id + ": more than one class declaration");
            tm.class_iri = strip_iri_tag(expand(object.as<std::string>()));
            return;
        }

        PredicateObjectMap pom;
        pom.predicate = expand(predicate);
        if (datatype) pom.datatype_hint = local_datatype(*datatype);

        if (object.IsScalar()) {
            std::string text = object.as<std::string>();
            bool iri = ends_with_tag(text);
            if (iri) text = strip_iri_tag(text);
            text = expand(text);
            Template tpl = Template::parse(text);
            if (tpl.is_single_column()) {
                pom.object = ColumnReference{tpl.parts[0].text};
            } else {
                pom.object = tpl;
            }
            pom.term = iri ? TermKind::Iri : TermKind::Literal;
        } else if (object.IsMap() && object["mapping"]) {
            JoinRef ref;
            ref.parent_tm_id = object["mapping"].as<std::string>();
            auto condition = object["condition"];
            if (!condition || !condition.IsMap())
                raise(ErrorKind::Syntax, "mapping:" + id + ": join object needs a condition");
            auto fn = condition["function"];
            if (!fn || fn.as<std::string>() != "equal")
                raise(ErrorKind::UnsupportedFeature, "join condition function other than 'equal'");
            JoinCondition jc;
            for (const auto& param : condition["parameters"]) {
                std::string name;
                std::string value;
                if (param.IsSequence() && param.size() == 2) {
                    name = param[0].as<std::string>();
                    value = param[1].as<std::string>();
                } else {
                    raise(ErrorKind::Syntax, "mapping:" + id + ": join parameters must be [strN, $(col)]");
                }
                Template t = Template::parse(value);
                if (!t.is_single_column())
                    raise(ErrorKind::Syntax, "mapping:" + id + ": join columns must be plain $(col)");
                if (name == "str1") jc.child_column = t.parts[0].text;
                else if (name == "str2") jc.parent_column = t.parts[0].text;
                else raise(ErrorKind::Syntax, "mapping:" + id + ": unknown join parameter '" + name + "'");
            }
            if (jc.child_column.empty() || jc.parent_column.empty())
                raise(ErrorKind::Syntax, "mapping:" + id + ": join condition needs str1 and str2");
            pom.object = ref;
            pom.join = jc;
            pom.term = TermKind::Iri;
        } else if (object.IsMap() && object["function"]) {
            pom.object = parse_function(id, object);
            pom.term = TermKind::Literal;
        } else {
            raise(ErrorKind::Syntax, "mapping:" + id + ": unsupported object form");
        }
        tm.pom.push_back(std::move(pom));
    }

    FunctionCall parse_function(const std::string& id, const YAML::Node& node) {
        FunctionCall call;
        call.name = node["function"].as<std::string>();
        if (!registry_.contains(call.name))
            raise(ErrorKind::UnknownFunction,
                  "mapping:" + id + ": unknown function '" + call.name + "'");
        auto params = node["parameters"];
        if (params) {
            if (!params.IsSequence())
                raise(ErrorKind::Syntax, "mapping:" + id + ": parameters must be a list");
            for (const auto& param : params) {
                YAML::Node value = param;
                if (param.IsSequence() && param.size() == 2) value = param[1];
                FunctionArg arg;
                if (value.IsMap() && value["function"]) {
                    arg.kind = FunctionArg::Kind::Call;
                    arg.call = std::make_shared<FunctionCall>(parse_function(id, value));
                } else if (value.IsScalar()) {
                    Template t = Template::parse(value.as<std::string>());
                    if (t.is_single_column()) {
                        arg.kind = FunctionArg::Kind::Column;
                        arg.text = t.parts[0].text;
                    } else if (!t.columns().empty()) {
                        raise(ErrorKind::Syntax,
                              "mapping:" + id + ": function arguments are columns or constants");
                    } else {
                        arg.kind = FunctionArg::Kind::Constant;
                        arg.text = value.as<std::string>();
                    }
                } else {
                    raise(ErrorKind::Syntax, "mapping:" + id + ": malformed function parameter");
                }
                call.args.push_back(std::move(arg));
            }
        }
        return call;
    }

    static bool ends_with_tag(const std::string& s) {
        return s.size() >= 4 && s.compare(s.size() - 4, 4, "~iri") == 0;
    }

    static std::string strip_iri_tag(const std::string& s) {
        return ends_with_tag(s) ? s.substr(0, s.size() - 4) : s;
    }

    std::string expand(const std::string& value) const {
        auto colon = value.find(':');
        if (colon == std::string::npos) return value;
        std::string pfx = value.substr(0, colon);
        auto it = prefixes_.find(pfx);
        if (it == prefixes_.end()) return value;  // absolute IRI or plain text
        return it->second + value.substr(colon + 1);
    }

    static std::string local_datatype(const std::string& value) {
        auto colon = value.rfind(':');
        auto hash = value.rfind('#');
        auto cut = std::max(colon == std::string::npos ? 0 : colon + 1,
                            hash == std::string::npos ? 0 : hash + 1);
        return value.substr(cut);
    }

    const FunctionRegistry& registry_;
    std::map<std::string, std::string> prefixes_;
};

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string flow_function(const FunctionCall& call) {
    std::string out = "{function: " + quoted(call.name) + ", parameters: [";
    int i = 0;
    for (const auto& arg : call.args) {
        if (i) out += ", ";
        std::string name = "p" + std::to_string(i++);
        out += "[" + quoted(name) + ", ";
        switch (arg.kind) {
            case FunctionArg::Kind::Column: out += quoted("$(" + arg.text + ")"); break;
            case FunctionArg::Kind::Constant: out += quoted(arg.text); break;
            case FunctionArg::Kind::Call: out += flow_function(*arg.call); break;
        }
        out += "]";
    }
    out += "]}";
    return out;
}

void emit_function(const FunctionCall& call, std::string& out, int indent) {
    std::string pad(indent, ' ');
    out += pad + "function: " + quoted(call.name) + "\n";
    if (call.args.empty()) return;
    out += pad + "parameters:\n";
    int i = 0;
    for (const auto& arg : call.args) {
        std::string name = "p" + std::to_string(i++);
        switch (arg.kind) {
            case FunctionArg::Kind::Column:
                out += pad + "  - [" + quoted(name) + ", " + quoted("$(" + arg.text + ")") + "]\n";
                break;
            case FunctionArg::Kind::Constant:
                out += pad + "  - [" + quoted(name) + ", " + quoted(arg.text) + "]\n";
                break;
            case FunctionArg::Kind::Call:
                out += pad + "  - [" + quoted(name) + ", " + flow_function(*arg.call) + "]\n";
                break;
        }
    }
}

}  // namespace

MappingDocument parse_mapping(const std::string& text) {
    return parse_mapping(text, FunctionRegistry::builtin());
}

MappingDocument parse_mapping(const std::string& text, const FunctionRegistry& registry) {
    return MappingParser(registry).parse(text);
}

std::string serialize_mapping(const MappingDocument& doc) {
    std::string out = "mappings:\n";
    for (const auto& tm : doc.triples_maps) {
        out += "  " + tm.id + ":\n";
        const char* tag = tm.source_kind == SourceKind::Table ? "~table" : "~csv";
        out += "    sources:\n      - [" + quoted(tm.source_path + tag) + "]\n";
        out += "    s: " + quoted(tm.subject_template.pattern) + "\n";
        if (tm.class_iri || !tm.pom.empty()) {
            out += "    po:\n";
            if (tm.class_iri) out += "      - [a, " + quoted(*tm.class_iri) + "]\n";
            for (const auto& p : tm.pom) {
                if (const auto* col = std::get_if<ColumnReference>(&p.object)) {
                    std::string obj = "$(" + col->column + ")";
                    if (p.term == TermKind::Iri) obj += "~iri";
                    if (p.datatype_hint) {
                        out += "      - p: " + quoted(p.predicate) + "\n";
                        out += "        o: " + quoted(obj) + "\n";
                        out += "        datatype: " + quoted(*p.datatype_hint) + "\n";
                    } else {
                        out += "      - [" + quoted(p.predicate) + ", " + quoted(obj) + "]\n";
                    }
                } else if (const auto* tpl = std::get_if<Template>(&p.object)) {
                    std::string obj = tpl->pattern;
                    if (p.term == TermKind::Iri) obj += "~iri";
                    if (p.datatype_hint) {
                        out += "      - p: " + quoted(p.predicate) + "\n";
                        out += "        o: " + quoted(obj) + "\n";
                        out += "        datatype: " + quoted(*p.datatype_hint) + "\n";
                    } else {
                        out += "      - [" + quoted(p.predicate) + ", " + quoted(obj) + "]\n";
                    }
                } else if (const auto* fn = std::get_if<FunctionCall>(&p.object)) {
                    out += "      - p: " + quoted(p.predicate) + "\n";
                    out += "        o:\n";
                    emit_function(*fn, out, 10);
                    if (p.datatype_hint)
                        out += "        datatype: " + quoted(*p.datatype_hint) + "\n";
                } else if (const auto* join = std::get_if<JoinRef>(&p.object)) {
                    out += "      - p: " + quoted(p.predicate) + "\n";
                    out += "        o:\n";
                    out += "          mapping: " + quoted(join->parent_tm_id) + "\n";
                    out += "          condition:\n";
                    out += "            function: equal\n";
                    out += "            parameters:\n";
                    out += "              - [str1, " + quoted("$(" + p.join->child_column + ")") + "]\n";
                    out += "              - [str2, " + quoted("$(" + p.join->parent_column + ")") + "]\n";
                }
            }
        }
    }
    return out;
}

}  // namespace obda
