#include "toolspin/corpus.hpp"

#include <algorithm>

#include <fstream>
#include <set>
#include <sstream>

#include "toolspin/edits.hpp"
#include "toolspin/hash.hpp"

namespace toolspin {

namespace {

[[noreturn]] void fail(const std::string & message) {
    throw corpus_error(message);
}

std::string describe_line(const std::filesystem::path & path, size_t line_no) {
    return path.filename().string() + ":" + std::to_string(line_no);
}

// BFCL question fields come either as plain strings or as nested message
// arrays; take the first user message in the latter case.
std::string extract_query(const json & question, const std::string & where) {
    if (question.is_string()) {
        return question.get<std::string>();
    }
    json node = question;
    while (node.is_array() && !node.empty() && node[0].is_array()) {
        node = node[0];
    }
    if (node.is_array()) {
        for (const auto & msg : node) {
            if (msg.is_object() && msg.value("role", "") == "user") {
                return msg.value("content", "");
            }
        }
    }
    fail(where + ": field 'question' is neither a string nor a message list");
}

param_schema parse_schema(const json & j, const std::string & where, const std::string & field) {
    if (!j.is_object()) {
        fail(where + ": field '" + field + "' must be an object");
    }
    param_schema schema;
    const std::string type_name = j.value("type", "");
    auto kind = param_kind_from_name(type_name);
    if (!kind) {
        fail(where + ": field '" + field + ".type' has unknown kind '" + type_name + "'");
    }
    schema.kind = *kind;
    schema.description = j.value("description", "");
    if (j.contains("properties")) {
        if (!j["properties"].is_object()) {
            fail(where + ": field '" + field + ".properties' must be an object");
        }
        for (const auto & [name, child] : j["properties"].items()) {
            schema.properties.emplace_back(name, parse_schema(child, where, field + ".properties." + name));
        }
    }
    for (const auto & r : j.value("required", json::array())) {
        if (!r.is_string()) {
            fail(where + ": field '" + field + ".required' must list parameter names");
        }
        schema.required.push_back(r.get<std::string>());
    }
    for (const auto & name : schema.required) {
        if (!schema.find(name)) {
            fail(where + ": field '" + field + ".required' names unknown parameter '" + name + "'");
        }
    }
    return schema;
}

ground_truth parse_ground_truth(const json & record, const std::string & where) {
    const auto & list = record.at("ground_truth");
    if (!list.is_array() || list.size() != 1) {
        fail(where + ": field 'ground_truth' must hold exactly one entry");
    }
    const json & entry = list[0];
    ground_truth gt;
    json arguments;
    if (entry.contains("function_name")) {
        gt.function_name = entry.value("function_name", "");
        arguments = entry.value("arguments", json::object());
    } else if (entry.is_object() && entry.size() == 1) {
        // BFCL answer shape: { "<func_name>": { param: [values] } }
        gt.function_name = entry.items().begin().key();
        arguments = entry.items().begin().value();
    } else {
        fail(where + ": field 'ground_truth' entry lacks a function_name");
    }
    if (!arguments.is_object()) {
        fail(where + ": field 'arguments' must map parameters to value lists");
    }
    for (const auto & [param, values] : arguments.items()) {
        if (!values.is_array()) {
            fail(where + ": field 'arguments." + param + "' must be a list of acceptable values");
        }
        gt.acceptable.emplace_back(param, std::vector<json>(values.begin(), values.end()));
    }
    return gt;
}

void validate_sample(const sample & s, const std::string & where) {
    if (s.tool.name.empty() || s.tool.name.find_first_of(" \t\n\r") != std::string::npos) {
        fail(where + ": field 'function.name' must be non-empty without whitespace, got '" + s.tool.name + "'");
    }
    if (s.tool.params.kind != param_kind::object) {
        fail(where + ": field 'function.parameters' must be object-kind at the root");
    }
    if (s.truth.function_name != s.tool.name) {
        fail("sample '" + s.id + "': ground truth names function '" + s.truth.function_name +
             "' but the tool is '" + s.tool.name + "'");
    }
    for (const auto & [param, values] : s.truth.acceptable) {
        if (!s.tool.params.find(param)) {
            fail("sample '" + s.id + "': ground truth references parameter '" + param +
                 "' absent from the schema");
        }
        (void)values;
    }
    for (const auto & name : s.tool.params.required) {
        const auto * values = s.truth.find(name);
        // The "" sentinel marks omittability, which contradicts required.
        const bool has_concrete = values && std::any_of(values->begin(), values->end(), [](const json & v) {
            return !(v.is_string() && v.get<std::string>().empty());
        });
        if (!has_concrete) {
            fail("sample '" + s.id + "': required parameter '" + name +
                 "' has no concrete acceptable value in the ground truth");
        }
    }
}

std::map<std::string, ground_truth> load_ground_truth_file(const std::filesystem::path & path) {
    std::ifstream file(path);
    if (!file.is_open()) {
        fail("cannot open ground-truth file " + path.string());
    }
    std::map<std::string, ground_truth> by_id;
    std::string line;
    size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception & e) {
            fail("malformed record at " + describe_line(path, line_no) + ": " + e.what());
        }
        const std::string where = describe_line(path, line_no);
        if (!record.contains("id") || !record["id"].is_string()) {
            fail(where + ": field 'id' missing");
        }
        std::string id = record["id"].get<std::string>();
        if (by_id.count(id)) {
            fail(where + ": duplicate ground truth for id '" + id + "'");
        }
        by_id.emplace(std::move(id), parse_ground_truth(record, where));
    }
    return by_id;
}

} // namespace

std::vector<sample> load_corpus(const std::filesystem::path & samples_path,
                                const std::filesystem::path & ground_truth_path,
                                corpus_category category) {
    std::ifstream file(samples_path);
    if (!file.is_open()) {
        fail("cannot open corpus file " + samples_path.string());
    }
    auto truth_by_id = load_ground_truth_file(ground_truth_path);

    std::vector<sample> samples;
    std::set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = describe_line(samples_path, line_no);
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception & e) {
            fail("malformed record at " + where + ": " + e.what());
        }
        if (!record.contains("id") || !record["id"].is_string()) {
            fail(where + ": field 'id' missing");
        }
        sample s;
        s.id = record["id"].get<std::string>();
        s.category = category;
        if (!seen_ids.insert(s.id).second) {
            fail(where + ": duplicate sample id '" + s.id + "'");
        }
        if (!record.contains("question")) {
            fail(where + ": field 'question' missing");
        }
        s.query = extract_query(record["question"], where);

        json fn = record.value("function", json());
        if (fn.is_array() && fn.size() == 1) {
            fn = fn[0];
        }
        if (!fn.is_object()) {
            fail(where + ": field 'function' must be an object (or a one-element list)");
        }
        s.tool.name = fn.value("name", "");
        s.tool.description = fn.value("description", "");
        if (!fn.contains("parameters")) {
            fail(where + ": field 'function.parameters' missing");
        }
        s.tool.params = parse_schema(fn["parameters"], where, "function.parameters");

        auto truth_it = truth_by_id.find(s.id);
        if (truth_it == truth_by_id.end()) {
            fail("missing ground truth for id '" + s.id + "'");
        }
        s.truth = truth_it->second;
        validate_sample(s, where);
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<sample> load_corpus(const std::filesystem::path & samples_path,
                                corpus_category category) {
    std::filesystem::path gt = samples_path;
    gt.replace_filename(samples_path.stem().string() + "_gt" + samples_path.extension().string());
    return load_corpus(samples_path, gt, category);
}

std::string corpus_digest(const std::vector<sample> & samples) {
    json canon = json::array();
    for (const auto & s : samples) {
        json args = json::object();
        for (const auto & [param, values] : s.truth.acceptable) {
            args[param] = values;
        }
        canon.push_back({
            {"id", s.id},
            {"category", corpus_category_name(s.category)},
            {"question", s.query},
            {"function", {
                {"name", s.tool.name},
                {"description", s.tool.description},
                {"parameters", s.tool.params.to_json()},
            }},
            {"ground_truth", {{"function_name", s.truth.function_name}, {"arguments", args}}},
        });
    }
    return to_hex64(fnv1a64(canon.dump()));
}

std::vector<test_case> build_pairings(const sample & s,
                                      const std::string & edit_a,
                                      const std::string & edit_b,
                                      const edit_engine & engine) {
    if (edit_a == edit_b && edit_a != "original") {
        throw corpus_error("pairing '" + edit_a + "' against itself is only allowed for 'original'");
    }
    const std::string text_a = engine.apply(edit_a, s.tool.description, s.id);
    const std::string text_b = engine.apply(edit_b, s.tool.description, s.id);

    auto make_case = [&](slot_order ordering) {
        test_case tc;
        tc.source = &s;
        tc.ordering = ordering;
        tc.id = s.id + "#" + slot_order_name(ordering);
        const bool a_first = ordering == slot_order::ab;
        tc.slots[0] = {a_first ? edit_a : edit_b, s.tool.name + "1", a_first ? text_a : text_b};
        tc.slots[1] = {a_first ? edit_b : edit_a, s.tool.name + "2", a_first ? text_b : text_a};
        return tc;
    };
    return {make_case(slot_order::ab), make_case(slot_order::ba)};
}

} // namespace toolspin
