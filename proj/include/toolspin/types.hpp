#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace toolspin {

// Insertion-ordered JSON keeps every serialized artifact deterministic.
using json = nlohmann::ordered_json;

enum class param_kind { string, integer, floating, boolean, array, object };

std::string param_kind_name(param_kind kind);
std::optional<param_kind> param_kind_from_name(const std::string & name);

// Parameter schema as presented to models: a tree of typed parameters with
// free-text descriptions. Property order is preserved from the source file.
struct param_schema {
    param_kind kind = param_kind::string;
    std::string description;
    std::vector<std::pair<std::string, param_schema>> properties; // object kind only
    std::vector<std::string> required;

    const param_schema * find(const std::string & name) const;
    bool is_required(const std::string & name) const;
    json to_json() const;
};

struct tool_spec {
    std::string name;
    std::string description;
    param_schema params; // object kind at root
};

// Acceptable argument values per parameter, in file order. An empty-string
// sentinel "" inside a list marks the parameter as omittable.
struct ground_truth {
    std::string function_name;
    std::vector<std::pair<std::string, std::vector<json>>> acceptable;

    const std::vector<json> * find(const std::string & param) const;
};

enum class corpus_category { live_simple, nonlive_simple };

std::string corpus_category_name(corpus_category c);
std::optional<corpus_category> corpus_category_from_name(const std::string & name);

struct sample {
    std::string id;
    corpus_category category = corpus_category::live_simple;
    std::string query;
    tool_spec tool;
    ground_truth truth;
};

// One of the two tool slots presented to the model.
struct slot_spec {
    std::string edit_label;       // an edit label or "original"
    std::string tool_name;        // base name + positional suffix "1"/"2"
    std::string description_text; // exact description presented
};

enum class slot_order { ab, ba };

inline const char * slot_order_name(slot_order o) { return o == slot_order::ab ? "ab" : "ba"; }

// A paired-tool test case: one query, two slots with identical interfaces
// but independently edited descriptions.
struct test_case {
    std::string id; // "<sample_id>#ab" or "<sample_id>#ba"
    const sample * source = nullptr; // corpus must outlive the case
    slot_order ordering = slot_order::ab;
    std::array<slot_spec, 2> slots;
};

struct tool_call {
    std::string name;
    json arguments = json::object();
};

struct model_response {
    std::optional<std::string> raw_text;
    std::vector<tool_call> tool_calls;
    std::string finish_reason;
    bool cached = false;
    int latency_ms = 0;
    std::vector<std::string> warnings;

    json to_json() const;
    static model_response from_json(const json & j);
};

} // namespace toolspin
