#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "toolspin/corpus.hpp"
#include "toolspin/report.hpp"

using namespace toolspin;
using test_support::temp_dir;

namespace {

matrix two_label_matrix(double row, double col, double correct) {
    matrix m;
    m.model_id = "demo";
    m.labels = {"assertive", "original"};
    competition_cell cell{"assertive", "original", row, col, correct, 516};
    m.cells[{"assertive", "original"}] = cell;
    m.cells[{"original", "assertive"}] = cell.mirrored();
    fill_average_ratios(m);
    return m;
}

} // namespace

TEST_CASE("markdown cells carry one-decimal percents and a win marker") {
    auto m = two_label_matrix(0.818, 0.073, 0.825);
    const std::string text = render_matrix(m, render_format::markdown);
    CHECK(text.find("81.8% : 7.3% [WIN]") != std::string::npos);
    CHECK(text.find("7.3% : 81.8% [LOSE]") != std::string::npos);
    CHECK(text.find("# demo") != std::string::npos);

    // A 0.1pp margin is still a win; exact equality is a tie.
    auto close = two_label_matrix(0.460, 0.459, 0.5);
    CHECK(render_matrix(close, render_format::markdown).find("46.0% : 45.9% [WIN]") !=
          std::string::npos);
    auto tie = two_label_matrix(0.4, 0.4, 0.5);
    CHECK(render_matrix(tie, render_format::markdown).find("[TIE]") != std::string::npos);
}

TEST_CASE("csv cells carry a sign component and the average column") {
    auto m = two_label_matrix(0.818, 0.073, 0.825);
    const std::string text = render_matrix(m, render_format::csv);
    CHECK(text.find("model,demo") == 0);
    CHECK(text.find("81.8:7.3:+") != std::string::npos);
    CHECK(text.find("7.3:81.8:-") != std::string::npos);
    CHECK(text.find(",average") != std::string::npos);
}

TEST_CASE("csv rendering round-trips up to display rounding") {
    auto m = two_label_matrix(0.8181818, 0.0734496, 0.83);
    auto parsed = parse_matrix_csv(render_matrix(m, render_format::csv));
    CHECK(parsed.model_id == "demo");
    CHECK(parsed.labels == m.labels);
    for (const auto & [key, cell] : m.cells) {
        const auto & got = parsed.at(key.first, key.second);
        CHECK(std::abs(got.row_rate - cell.row_rate) <= 0.0005 + 1e-12);
        CHECK(std::abs(got.col_rate - cell.col_rate) <= 0.0005 + 1e-12);
    }
}

TEST_CASE("head-to-head rendering shows rates, direct quotient and correct rate") {
    // Direct quotient of the stored rates, at two decimals half-up.
    const std::string text = render_head_to_head({"assertive", "original", 0.783, 0.105, 0.789, 516});
    CHECK(text.find("| assertive | original | ratio | correct rate |") != std::string::npos);
    CHECK(text.find("| 78.3% | 10.5% | 7.46 : 1 | 78.9% |") != std::string::npos);

    const std::string combined = render_head_to_head({"combined", "original", 0.756, 0.062, 0.806, 516});
    CHECK(combined.find("12.19 : 1") != std::string::npos);

    const std::string zero = render_head_to_head({"x", "y", 0.0, 0.0, 0.0, 4});
    CHECK(zero.find("n/a") != std::string::npos);

    const std::string swept = render_head_to_head({"x", "y", 0.43, 0.0, 0.43, 4});
    CHECK(swept.find("inf : 1") != std::string::npos);
}

TEST_CASE("fixture csvs parse with labels, cells and averages") {
    auto m = load_matrix_csv(test_support::fixtures_dir() / "aggregate.csv");
    CHECK(m.model_id == "aggregate");
    CHECK(m.labels == competition_labels());
    CHECK(m.cells.size() == 90);
    const auto & cell = m.at("assertive", "original");
    CHECK(cell.row_rate == doctest::Approx(0.818));
    CHECK(cell.col_rate == doctest::Approx(0.073));
    CHECK(m.avg_ratio.at("original").numerator == doctest::Approx(0.59));
    CHECK(m.avg_ratio.at("original").denominator == 1.0);

    auto per_model = load_matrix_csv(test_support::fixtures_dir() / "o4-mini.csv");
    CHECK(per_model.at("assertive", "original").col_rate == doctest::Approx(0.0));
}

TEST_CASE("csv parsing rejects malformed structure") {
    CHECK_THROWS_AS(parse_matrix_csv("x,y\n1,2\n"), report_error);
    CHECK_THROWS_AS(parse_matrix_csv("label,a,b\na,,oops\n"), report_error);
    CHECK_THROWS_AS(parse_matrix_csv("label,a,b\na,1:2,3:4\n"), report_error); // diagonal filled
    CHECK_THROWS_AS(parse_matrix_csv("label,a,b\na,,1:2\nb,3:x,\n"), report_error);
    CHECK_THROWS_AS(parse_matrix_csv("label,a,average,b\n"), report_error);
}

TEST_CASE("replaying the shipped fixtures passes inside the published tolerances") {
    auto report = replay_fixtures(test_support::fixtures_dir());
    CHECK(report.pass);
    CHECK(report.failures.empty());
    // Pinned observed deviations for the shipped transcription.
    CHECK(report.max_cell_deviation_pp == doctest::Approx(0.06).epsilon(1e-6));
    CHECK(report.max_cell_deviation_pp <= 0.1);
    CHECK(report.max_average_deviation <= 0.01);
    CHECK(report.summary().find("PASS") != std::string::npos);
}

TEST_CASE("a perturbed per-model cell fails the replay and is named") {
    temp_dir dir;
    for (const auto & entry : std::filesystem::directory_iterator(test_support::fixtures_dir())) {
        std::filesystem::copy_file(entry.path(), dir.path / entry.path().filename());
    }
    // Shift one gpt-4.1 cell by 1pp on both sides of the mirror.
    auto m = load_matrix_csv(dir.file("gpt-4.1.csv"));
    auto & cell = m.cells[{"original", "assertive"}];
    cell.row_rate += 0.01;
    auto & twin = m.cells[{"assertive", "original"}];
    twin.col_rate += 0.01;
    test_support::write_file(dir.file("gpt-4.1.csv"), render_matrix(m, render_format::csv));

    auto report = replay_fixtures(dir.path);
    CHECK_FALSE(report.pass);
    bool named = false;
    for (const auto & failure : report.failures) {
        if (failure.find("original") != std::string::npos &&
            failure.find("assertive") != std::string::npos) {
            named = true;
        }
    }
    CHECK(named);
}

TEST_CASE("a missing fixture names the absent table") {
    temp_dir dir;
    for (const auto & entry : std::filesystem::directory_iterator(test_support::fixtures_dir())) {
        if (entry.path().filename() == "qwen2.5-7b.csv") continue;
        std::filesystem::copy_file(entry.path(), dir.path / entry.path().filename());
    }
    CHECK_THROWS_WITH_AS(replay_fixtures(dir.path), doctest::Contains("qwen2.5-7b"), report_error);
}

TEST_CASE("mirror violations in a fixture are reported") {
    temp_dir dir;
    for (const auto & entry : std::filesystem::directory_iterator(test_support::fixtures_dir())) {
        std::filesystem::copy_file(entry.path(), dir.path / entry.path().filename());
    }
    auto m = load_matrix_csv(dir.file("gpt-4.1.csv"));
    m.cells[{"original", "assertive"}].row_rate += 0.004; // break only one side
    test_support::write_file(dir.file("gpt-4.1.csv"), render_matrix(m, render_format::csv));

    auto report = replay_fixtures(dir.path);
    CHECK_FALSE(report.pass);
    bool mirror_named = false;
    for (const auto & failure : report.failures) {
        if (failure.find("mirror") != std::string::npos) mirror_named = true;
    }
    CHECK(mirror_named);
}

TEST_CASE("rendering is deterministic") {
    auto m = two_label_matrix(0.5181, 0.436, 0.52);
    CHECK(render_matrix(m, render_format::markdown) == render_matrix(m, render_format::markdown));
    CHECK(render_matrix(m, render_format::csv) == render_matrix(m, render_format::csv));
}
