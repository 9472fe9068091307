#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolspin/tournament.hpp"

namespace toolspin {

struct report_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class render_format { markdown, csv };

// Matrix rendering: cells "R% : C%" at one decimal with a WIN/LOSE/TIE
// marker (markdown) or a +/-/= sign component (csv), average column as
// "R : 1". Deterministic and locale-independent.
std::string render_matrix(const matrix & m, render_format format);

// The two-column duel layout: edited vs original rates, their direct
// quotient, and the model correct rate.
std::string render_head_to_head(const competition_cell & cell);

// Reads a matrix from the csv layout render_matrix emits; also the format
// of the published reference fixtures (percent cells "r:c", sign optional,
// trailing average column tolerated).
matrix parse_matrix_csv(const std::string & text);
matrix load_matrix_csv(const std::filesystem::path & path);

// Model ids of the published per-model reference matrices.
const std::vector<std::string> & fixture_model_ids();

// Structural checks applied to fixtures and fresh runs alike: complete
// off-diagonal coverage, mirror consistency, rates in [0,1] and the
// correct-rate bounds. Returns one line per violation.
std::vector<std::string> check_matrix_invariants(const matrix & m);

struct replay_report {
    bool pass = false;
    double max_cell_deviation_pp = 0.0; // percentage points
    double max_average_deviation = 0.0; // ratio units
    std::vector<std::string> failures;  // one line per violated check
    std::string summary() const;
};

// Recomputes the published aggregate matrix from the ten per-model
// fixtures and compares cells (<= 0.1pp) and average ratios (<= 0.01)
// against the published aggregate fixture.
replay_report replay_fixtures(const std::filesystem::path & fixture_dir);

} // namespace toolspin
