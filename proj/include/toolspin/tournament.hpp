#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolspin/edits.hpp"
#include "toolspin/gateway.hpp"
#include "toolspin/judge.hpp"
#include "toolspin/types.hpp"

namespace toolspin {

struct tournament_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One (row edit, column edit) matchup: paired correct-usage rates plus the
// model correct rate over n_cases ordering-calibrated test cases.
struct competition_cell {
    std::string row_label;
    std::string col_label;
    double row_rate = 0.0;    // fractions in [0, 1]
    double col_rate = 0.0;
    double correct_rate = 0.0;
    int n_cases = 0;

    competition_cell mirrored() const;
};

struct ratio_value {
    double numerator = 0.0;
    double denominator = 0.0;
    std::string display() const; // "R : 1", "inf : 1", or "n/a"
};

struct matrix {
    std::string model_id;
    std::vector<std::string> labels;
    std::map<std::pair<std::string, std::string>, competition_cell> cells; // all row != col
    std::map<std::string, ratio_value> avg_ratio;

    const competition_cell & at(const std::string & row, const std::string & col) const;
    json to_json() const;
    static matrix from_json(const json & j);
};

// Row sums over column sums for one label against all its opponents.
ratio_value average_ratio(const matrix & m, const std::string & label);

// Recomputes every label's average ratio in place.
void fill_average_ratios(matrix & m);

struct run_deps {
    const edit_engine * edits = nullptr;
    response_cache * cache = nullptr;
    int parallelism = 8;
    judge_options judging;
    std::function<void(const std::string &)> progress;  // optional
    std::vector<case_verdict> * collect_verdicts = nullptr; // optional audit sink
};

// Runs every test case for one edit pair through the model and judges it.
// Aborting mid-run loses nothing: completed cases sit in the cache.
competition_cell run_pair(const model_handle & model, const std::vector<sample> & samples,
                          const std::string & edit_a, const std::string & edit_b,
                          const run_deps & deps);

// One run_pair per unordered label pair; mirror cells are synthesized from
// the same run, never re-queried.
matrix run_tournament(const model_handle & model, const std::vector<sample> & samples,
                      const std::vector<std::string> & labels, const run_deps & deps);

// Unweighted arithmetic mean of per-model rates, cell by cell; average
// ratios recomputed from the aggregated cells.
matrix aggregate(const std::vector<matrix> & matrices);

// Half-up fixed-point rendering used across reports ("7.3", "4.76").
std::string format_fixed(double value, int decimals);
std::string format_percent(double fraction); // one decimal, no "%" sign

} // namespace toolspin
