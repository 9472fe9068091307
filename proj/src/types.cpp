#include "toolspin/types.hpp"

#include <algorithm>

namespace toolspin {

std::string param_kind_name(param_kind kind) {
    switch (kind) {
        case param_kind::string:   return "string";
        case param_kind::integer:  return "integer";
        case param_kind::floating: return "float";
        case param_kind::boolean:  return "boolean";
        case param_kind::array:    return "array";
        case param_kind::object:   return "object";
    }
    return "string";
}

std::optional<param_kind> param_kind_from_name(const std::string & name) {
    if (name == "string") return param_kind::string;
    if (name == "integer" || name == "long") return param_kind::integer;
    if (name == "float" || name == "number" || name == "double") return param_kind::floating;
    if (name == "boolean" || name == "bool") return param_kind::boolean;
    if (name == "array" || name == "tuple") return param_kind::array;
    if (name == "object" || name == "dict") return param_kind::object;
    return std::nullopt;
}

const param_schema * param_schema::find(const std::string & name) const {
    for (const auto & [prop_name, schema] : properties) {
        if (prop_name == name) return &schema;
    }
    return nullptr;
}

bool param_schema::is_required(const std::string & name) const {
    return std::find(required.begin(), required.end(), name) != required.end();
}

json param_schema::to_json() const {
    json j;
    j["type"] = param_kind_name(kind);
    if (!description.empty()) {
        j["description"] = description;
    }
    if (kind == param_kind::object) {
        json props = json::object();
        for (const auto & [prop_name, schema] : properties) {
            props[prop_name] = schema.to_json();
        }
        j["properties"] = props;
        j["required"] = required;
    }
    return j;
}

const std::vector<json> * ground_truth::find(const std::string & param) const {
    for (const auto & [name, values] : acceptable) {
        if (name == param) return &values;
    }
    return nullptr;
}

std::string corpus_category_name(corpus_category c) {
    return c == corpus_category::live_simple ? "live_simple" : "nonlive_simple";
}

std::optional<corpus_category> corpus_category_from_name(const std::string & name) {
    if (name == "live_simple") return corpus_category::live_simple;
    if (name == "nonlive_simple") return corpus_category::nonlive_simple;
    return std::nullopt;
}

json model_response::to_json() const {
    json j;
    if (raw_text) {
        j["raw_text"] = *raw_text;
    }
    json calls = json::array();
    for (const auto & call : tool_calls) {
        calls.push_back({{"name", call.name}, {"arguments", call.arguments}});
    }
    j["tool_calls"] = calls;
    j["finish_reason"] = finish_reason;
    j["latency_ms"] = latency_ms;
    if (!warnings.empty()) {
        j["warnings"] = warnings;
    }
    return j;
}

model_response model_response::from_json(const json & j) {
    model_response r;
    if (j.contains("raw_text")) {
        r.raw_text = j["raw_text"].get<std::string>();
    }
    for (const auto & call : j.value("tool_calls", json::array())) {
        tool_call tc;
        tc.name = call.value("name", "");
        tc.arguments = call.value("arguments", json::object());
        r.tool_calls.push_back(std::move(tc));
    }
    r.finish_reason = j.value("finish_reason", "");
    r.latency_ms = j.value("latency_ms", 0);
    for (const auto & w : j.value("warnings", json::array())) {
        r.warnings.push_back(w.get<std::string>());
    }
    return r;
}

} // namespace toolspin
