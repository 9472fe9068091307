#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolspin/types.hpp"

namespace toolspin {

struct judge_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class usage_status { correct_use, incorrect_use, unused };

const char * usage_status_name(usage_status s);

struct tool_outcome {
    std::string case_id;
    std::string slot_edit_label;
    usage_status status = usage_status::unused;
};

struct case_verdict {
    std::string case_id;
    slot_order ordering = slot_order::ab; // which pairing side sits in slot 1
    std::array<tool_outcome, 2> outcomes; // slot order
    bool model_correct = false;

    json to_json() const;
};

struct judge_options {
    bool case_insensitive_strings = false;
};

// Deep equality with integer/float unification; string comparison is
// case-sensitive unless opted out. Key order in objects never matters.
bool values_equal(const json & a, const json & b, const judge_options & options = {});

// A call's arguments are correct iff every required parameter is present
// with an acceptable value, every present optional parameter is acceptable,
// absent optional parameters are omittable, and nothing outside the schema
// appears. Caller guarantees the call targets gt.function_name's tool.
bool args_correct(const tool_call & call, const ground_truth & gt,
                  const param_schema & schema, const judge_options & options = {});

// Per-slot usage outcome: correct_use needs at least one correct call and
// no incorrect call to that slot; calls naming non-roster tools are ignored.
case_verdict judge_case(const test_case & tc, const model_response & response,
                        const ground_truth & gt, const judge_options & options = {});

struct pair_rates {
    double rate_a = 0.0;
    double rate_b = 0.0;
    double correct_rate = 0.0;
};

// Correct-usage rate per pairing side plus the model correct rate, over a
// non-empty verdict set. Side A is slot 1 of "ab" cases and slot 2 of "ba"
// cases, so calibration pairs (original vs original) stay well-defined.
pair_rates usage_rates(const std::vector<case_verdict> & verdicts,
                       const std::string & label_a, const std::string & label_b);

// Correct-usage rate by roster position, ignoring labels.
std::pair<double, double> position_rates(const std::vector<case_verdict> & verdicts);

// Line-delimited audit export.
std::string verdicts_to_jsonl(const std::vector<case_verdict> & verdicts);

} // namespace toolspin
