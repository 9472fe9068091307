#include "toolspin/judge.hpp"

#include <algorithm>
#include <cctype>

namespace toolspin {

namespace {

bool strings_equal(const std::string & a, const std::string & b, const judge_options & options) {
    if (!options.case_insensitive_strings) {
        return a == b;
    }
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) return false;
    }
    return true;
}

bool is_numeric(const json & v) {
    return v.is_number_integer() || v.is_number_unsigned() || v.is_number_float();
}

// The "" sentinel marks omittability, handled by the caller; a concrete ""
// value still compares as an ordinary string here.
bool value_in_list(const json & value, const std::vector<json> & acceptable,
                   const judge_options & options) {
    return std::any_of(acceptable.begin(), acceptable.end(), [&](const json & candidate) {
        return values_equal(value, candidate, options);
    });
}

} // namespace

bool values_equal(const json & a, const json & b, const judge_options & options) {
    if (is_numeric(a) && is_numeric(b)) {
        if (a.is_number_float() || b.is_number_float()) {
            return a.get<double>() == b.get<double>();
        }
        return a.get<int64_t>() == b.get<int64_t>();
    }
    if (a.type() != b.type()) {
        return false;
    }
    switch (a.type()) {
        case json::value_t::string:
            return strings_equal(a.get<std::string>(), b.get<std::string>(), options);
        case json::value_t::array: {
            if (a.size() != b.size()) return false;
            for (size_t i = 0; i < a.size(); ++i) {
                if (!values_equal(a[i], b[i], options)) return false;
            }
            return true;
        }
        case json::value_t::object: {
            if (a.size() != b.size()) return false;
            for (const auto & [key, value] : a.items()) {
                if (!b.contains(key) || !values_equal(value, b.at(key), options)) return false;
            }
            return true;
        }
        default:
            return a == b;
    }
}

bool args_correct(const tool_call & call, const ground_truth & gt,
                  const param_schema & schema, const judge_options & options) {
    if (!call.arguments.is_object()) {
        return false;
    }
    // No parameter outside the schema.
    for (const auto & [name, value] : call.arguments.items()) {
        (void)value;
        if (!schema.find(name)) return false;
    }
    for (const auto & [name, child] : schema.properties) {
        (void)child;
        const auto * acceptable = gt.find(name);
        const bool present = call.arguments.contains(name);
        const bool required = schema.is_required(name);
        if (present) {
            // Present values must be acceptable, for optionals too.
            if (!acceptable || !value_in_list(call.arguments.at(name), *acceptable, options)) {
                return false;
            }
        } else {
            if (required) return false;
            // Absent optionals need the "" sentinel, unless the ground truth
            // does not constrain them at all.
            if (acceptable) {
                bool omittable = std::any_of(acceptable->begin(), acceptable->end(), [](const json & v) {
                    return v.is_string() && v.get<std::string>().empty();
                });
                if (!omittable) return false;
            }
        }
    }
    return true;
}

const char * usage_status_name(usage_status s) {
    switch (s) {
        case usage_status::correct_use:   return "correct_use";
        case usage_status::incorrect_use: return "incorrect_use";
        case usage_status::unused:        return "unused";
    }
    return "unused";
}

json case_verdict::to_json() const {
    json slots = json::array();
    for (const auto & outcome : outcomes) {
        slots.push_back({
            {"edit_label", outcome.slot_edit_label},
            {"status", usage_status_name(outcome.status)},
        });
    }
    return {
        {"case_id", case_id},
        {"ordering", slot_order_name(ordering)},
        {"slots", slots},
        {"model_correct", model_correct},
    };
}

case_verdict judge_case(const test_case & tc, const model_response & response,
                        const ground_truth & gt, const judge_options & options) {
    case_verdict verdict;
    verdict.case_id = tc.id;
    verdict.ordering = tc.ordering;

    // Correct use needs at least one correct call and zero incorrect calls
    // to the slot; calls naming tools outside the roster are ignored.
    for (size_t i = 0; i < 2; ++i) {
        int correct_calls = 0;
        int incorrect_calls = 0;
        for (const auto & call : response.tool_calls) {
            if (call.name != tc.slots[i].tool_name) continue;
            if (args_correct(call, gt, tc.source->tool.params, options)) {
                ++correct_calls;
            } else {
                ++incorrect_calls;
            }
        }
        usage_status status = usage_status::unused;
        if (incorrect_calls > 0) {
            status = usage_status::incorrect_use;
        } else if (correct_calls > 0) {
            status = usage_status::correct_use;
        }
        verdict.outcomes[i] = {tc.id, tc.slots[i].edit_label, status};
    }
    verdict.model_correct = verdict.outcomes[0].status == usage_status::correct_use ||
                            verdict.outcomes[1].status == usage_status::correct_use;
    return verdict;
}

pair_rates usage_rates(const std::vector<case_verdict> & verdicts,
                       const std::string & label_a, const std::string & label_b) {
    if (verdicts.empty()) {
        throw judge_error("usage rates over an empty verdict set are undefined");
    }
    size_t wins_a = 0;
    size_t wins_b = 0;
    size_t correct = 0;
    for (const auto & v : verdicts) {
        const std::string & first = v.outcomes[0].slot_edit_label;
        const std::string & second = v.outcomes[1].slot_edit_label;
        size_t slot_a;
        if (label_a == label_b) {
            // Calibration pairs carry the same label twice; the pairing side
            // in slot 1 is determined by the case ordering.
            if (first != label_a || second != label_a) {
                throw judge_error("verdict '" + v.case_id + "' does not carry labels ('" + label_a +
                                  "', '" + label_b + "')");
            }
            slot_a = v.ordering == slot_order::ab ? 0 : 1;
        } else if (first == label_a && second == label_b) {
            slot_a = 0;
        } else if (first == label_b && second == label_a) {
            slot_a = 1;
        } else {
            throw judge_error("verdict '" + v.case_id + "' does not carry labels ('" + label_a +
                              "', '" + label_b + "')");
        }
        if (v.outcomes[slot_a].status == usage_status::correct_use) ++wins_a;
        if (v.outcomes[1 - slot_a].status == usage_status::correct_use) ++wins_b;
        if (v.model_correct) ++correct;
    }
    const double n = static_cast<double>(verdicts.size());
    return {static_cast<double>(wins_a) / n,
            static_cast<double>(wins_b) / n,
            static_cast<double>(correct) / n};
}

std::pair<double, double> position_rates(const std::vector<case_verdict> & verdicts) {
    if (verdicts.empty()) {
        throw judge_error("position rates over an empty verdict set are undefined");
    }
    size_t first = 0;
    size_t second = 0;
    for (const auto & v : verdicts) {
        if (v.outcomes[0].status == usage_status::correct_use) ++first;
        if (v.outcomes[1].status == usage_status::correct_use) ++second;
    }
    const double n = static_cast<double>(verdicts.size());
    return {static_cast<double>(first) / n, static_cast<double>(second) / n};
}

std::string verdicts_to_jsonl(const std::vector<case_verdict> & verdicts) {
    std::string out;
    for (const auto & v : verdicts) {
        out += v.to_json().dump();
        out += "\n";
    }
    return out;
}

} // namespace toolspin
