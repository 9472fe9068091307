#include "toolspin/report.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace toolspin {

namespace {

const char * win_marker(double row, double col) {
    if (row > col) return "WIN";
    if (row < col) return "LOSE";
    return "TIE";
}

char sign_marker(double row, double col) {
    if (row > col) return '+';
    if (row < col) return '-';
    return '=';
}

std::vector<std::string> split_csv_line(const std::string & line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_number(const std::string & text, const std::string & where) {
    try {
        size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception &) {
        throw report_error(where + ": expected a number, got '" + text + "'");
    }
}

} // namespace

std::string render_matrix(const matrix & m, render_format format) {
    std::ostringstream out;
    if (format == render_format::markdown) {
        out << "# " << m.model_id << "\n\n";
        out << "| vs |";
        for (const auto & label : m.labels) out << " " << label << " |";
        out << " average |\n";
        out << "|---|";
        for (size_t i = 0; i < m.labels.size(); ++i) out << "---|";
        out << "---|\n";
        for (const auto & row : m.labels) {
            out << "| " << row << " |";
            for (const auto & col : m.labels) {
                if (row == col) {
                    out << "  |";
                    continue;
                }
                const auto & cell = m.at(row, col);
                out << " " << format_percent(cell.row_rate) << "% : "
                    << format_percent(cell.col_rate) << "% ["
                    << win_marker(cell.row_rate, cell.col_rate) << "] |";
            }
            auto it = m.avg_ratio.find(row);
            out << " " << (it != m.avg_ratio.end() ? it->second.display() : "n/a") << " |\n";
        }
        return out.str();
    }

    out << "model," << m.model_id << "\n";
    out << "label";
    for (const auto & label : m.labels) out << "," << label;
    out << ",average\n";
    for (const auto & row : m.labels) {
        out << row;
        for (const auto & col : m.labels) {
            out << ",";
            if (row == col) continue;
            const auto & cell = m.at(row, col);
            out << format_percent(cell.row_rate) << ":" << format_percent(cell.col_rate)
                << ":" << sign_marker(cell.row_rate, cell.col_rate);
        }
        auto it = m.avg_ratio.find(row);
        out << ",";
        if (it != m.avg_ratio.end() && it->second.denominator > 0.0) {
            out << format_fixed(it->second.numerator / it->second.denominator, 2);
        } else if (it != m.avg_ratio.end() && it->second.numerator > 0.0) {
            out << "inf";
        }
        out << "\n";
    }
    return out.str();
}

std::string render_head_to_head(const competition_cell & cell) {
    ratio_value ratio{cell.row_rate, cell.col_rate};
    std::ostringstream out;
    out << "| " << cell.row_label << " | " << cell.col_label << " | ratio | correct rate |\n";
    out << "|---|---|---|---|\n";
    out << "| " << format_percent(cell.row_rate) << "% | " << format_percent(cell.col_rate)
        << "% | " << ratio.display() << " | " << format_percent(cell.correct_rate) << "% |\n";
    return out.str();
}

matrix parse_matrix_csv(const std::string & text) {
    std::istringstream in(text);
    std::string line;
    matrix m;
    bool have_header = false;
    bool has_average_column = false;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        const std::string where = "csv line " + std::to_string(line_no);
        if (fields[0] == "model") {
            if (fields.size() < 2) throw report_error(where + ": model row needs a value");
            m.model_id = fields[1];
            continue;
        }
        if (fields[0] == "label") {
            for (size_t i = 1; i < fields.size(); ++i) {
                if (fields[i] == "average") {
                    has_average_column = true;
                    if (i + 1 != fields.size()) {
                        throw report_error(where + ": 'average' must be the last column");
                    }
                    break;
                }
                m.labels.push_back(fields[i]);
            }
            have_header = true;
            continue;
        }
        if (!have_header) {
            throw report_error(where + ": matrix csv needs a 'label,...' header row first");
        }
        const std::string & row = fields[0];
        const size_t expected = 1 + m.labels.size() + (has_average_column ? 1 : 0);
        if (fields.size() != expected) {
            throw report_error(where + ": expected " + std::to_string(expected) + " fields, got " +
                               std::to_string(fields.size()));
        }
        for (size_t i = 0; i < m.labels.size(); ++i) {
            const std::string & col = m.labels[i];
            const std::string & cell_text = fields[i + 1];
            if (cell_text.empty()) {
                if (row != col) {
                    throw report_error(where + ": empty cell off the diagonal (" + row + ", " + col + ")");
                }
                continue;
            }
            if (row == col) {
                throw report_error(where + ": diagonal cell (" + row + ") must be empty");
            }
            auto colon = cell_text.find(':');
            if (colon == std::string::npos) {
                throw report_error(where + ": cell (" + row + ", " + col + ") is not 'r:c'");
            }
            std::string rest = cell_text.substr(colon + 1);
            auto second_colon = rest.find(':');
            std::string col_text = second_colon == std::string::npos ? rest : rest.substr(0, second_colon);
            competition_cell cell;
            cell.row_label = row;
            cell.col_label = col;
            cell.row_rate = parse_number(cell_text.substr(0, colon), where) / 100.0;
            cell.col_rate = parse_number(col_text, where) / 100.0;
            cell.correct_rate = std::max(cell.row_rate, cell.col_rate); // floor; not recorded in csv
            cell.n_cases = 0;                                           // unknown for transcripts
            m.cells[{row, col}] = cell;
        }
        if (has_average_column && !fields.back().empty()) {
            ratio_value r;
            if (fields.back() == "inf") {
                r.numerator = 1.0;
                r.denominator = 0.0;
            } else {
                r.numerator = parse_number(fields.back(), "csv line " + std::to_string(line_no));
                r.denominator = 1.0;
            }
            m.avg_ratio[row] = r;
        }
    }
    if (!have_header) {
        throw report_error("matrix csv has no header row");
    }
    return m;
}

matrix load_matrix_csv(const std::filesystem::path & path) {
    std::ifstream file(path, std::ios::binary);
    if (!file.is_open()) {
        throw report_error("cannot open matrix csv " + path.string());
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    matrix m = parse_matrix_csv(buffer.str());
    if (m.model_id.empty()) {
        m.model_id = path.stem().string();
    }
    return m;
}

const std::vector<std::string> & fixture_model_ids() {
    static const std::vector<std::string> ids = {
        "gpt-4.1", "qwen2.5-7b", "bitagent-8b", "gpt-4o-mini", "hammer2.1-7b",
        "llama-3.1-8b", "toolace-2-8b", "watt-tool-8b", "xlam-2-8b-fc-r", "o4-mini",
    };
    return ids;
}

std::vector<std::string> check_matrix_invariants(const matrix & m) {
    std::vector<std::string> violations;
    for (const auto & row : m.labels) {
        for (const auto & col : m.labels) {
            if (row == col) continue;
            const auto where = m.model_id + " (" + row + ", " + col + ")";
            auto it = m.cells.find({row, col});
            if (it == m.cells.end()) {
                violations.push_back(where + ": cell missing");
                continue;
            }
            const auto & cell = it->second;
            auto twin_it = m.cells.find({col, row});
            if (twin_it == m.cells.end()) continue; // reported from the other side
            const auto & twin = twin_it->second;
            if (cell.row_rate < 0 || cell.row_rate > 1 || cell.col_rate < 0 || cell.col_rate > 1 ||
                cell.correct_rate < 0 || cell.correct_rate > 1) {
                violations.push_back(where + ": rate out of [0,1]");
            }
            if (std::abs(cell.row_rate - twin.col_rate) > 1e-12 ||
                std::abs(cell.col_rate - twin.row_rate) > 1e-12) {
                violations.push_back(where + ": mirror mismatch");
            }
            if (cell.correct_rate + 1e-12 < std::max(cell.row_rate, cell.col_rate) ||
                cell.correct_rate - 1e-12 > cell.row_rate + cell.col_rate) {
                violations.push_back(where + ": correct rate outside its bounds");
            }
        }
    }
    return violations;
}

std::string replay_report::summary() const {
    std::ostringstream out;
    out << "fixture replay: " << (pass ? "PASS" : "FAIL") << "\n";
    out << "  max cell deviation: " << format_fixed(max_cell_deviation_pp, 3) << "pp (limit 0.1)\n";
    out << "  max average deviation: " << format_fixed(max_average_deviation, 4) << " (limit 0.01)\n";
    for (const auto & f : failures) {
        out << "  FAIL " << f << "\n";
    }
    return out.str();
}

replay_report replay_fixtures(const std::filesystem::path & fixture_dir) {
    replay_report report;

    auto require = [&](const std::string & name) {
        const auto path = fixture_dir / (name + ".csv");
        if (!std::filesystem::exists(path)) {
            throw report_error("missing fixture for '" + name + "': " + path.string());
        }
        return load_matrix_csv(path);
    };

    const matrix published = require("aggregate");
    std::vector<matrix> per_model;
    for (const auto & id : fixture_model_ids()) {
        per_model.push_back(require(id));
    }

    // Transcription guards: every fixture must satisfy the matrix invariants.
    for (const auto & violation : check_matrix_invariants(published)) {
        report.failures.push_back(violation);
    }
    for (const auto & m : per_model) {
        for (const auto & violation : check_matrix_invariants(m)) {
            report.failures.push_back(violation);
        }
    }

    const matrix recomputed = aggregate(per_model);
    for (const auto & row : published.labels) {
        for (const auto & col : published.labels) {
            if (row == col) continue;
            const auto & want = published.at(row, col);
            const auto & got = recomputed.at(row, col);
            const double dev = std::max(std::abs(want.row_rate - got.row_rate),
                                        std::abs(want.col_rate - got.col_rate)) * 100.0;
            report.max_cell_deviation_pp = std::max(report.max_cell_deviation_pp, dev);
            if (dev > 0.1) {
                report.failures.push_back("aggregate cell (" + row + ", " + col + ") deviates by " +
                                          format_fixed(dev, 3) + "pp");
            }
        }
    }
    for (const auto & label : published.labels) {
        auto it = published.avg_ratio.find(label);
        if (it == published.avg_ratio.end() || it->second.denominator == 0.0) {
            report.failures.push_back("published aggregate lacks an average for '" + label + "'");
            continue;
        }
        const double want = it->second.numerator / it->second.denominator;
        const ratio_value got = average_ratio(recomputed, label);
        if (got.denominator == 0.0) {
            report.failures.push_back("recomputed average for '" + label + "' is degenerate");
            continue;
        }
        const double dev = std::abs(got.numerator / got.denominator - want);
        report.max_average_deviation = std::max(report.max_average_deviation, dev);
        if (dev > 0.01) {
            report.failures.push_back("average for '" + label + "' deviates by " + format_fixed(dev, 4));
        }
    }
    report.pass = report.failures.empty();
    return report;
}

} // namespace toolspin
