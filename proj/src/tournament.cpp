#include "toolspin/tournament.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "toolspin/corpus.hpp"

namespace toolspin {

namespace {

void parallel_for(size_t count, int parallelism, const std::function<void(size_t)> & body) {
    const size_t workers = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(parallelism), count));
    if (workers == 1) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto & t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

competition_cell competition_cell::mirrored() const {
    return {col_label, row_label, col_rate, row_rate, correct_rate, n_cases};
}

std::string format_fixed(double value, int decimals) {
    long long scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    // Half-up on the scaled value. The extended-precision product keeps
    // doubles just below a rounding boundary from being pushed onto it.
    const long double product = static_cast<long double>(value) * static_cast<long double>(scale);
    const long long scaled = static_cast<long long>(std::floor(product + 0.5L));
    std::string out = std::to_string(scaled / scale);
    if (decimals > 0) {
        long long frac = scaled % scale;
        if (frac < 0) frac = -frac;
        std::string digits = std::to_string(frac);
        out += "." + std::string(static_cast<size_t>(decimals) - digits.size(), '0') + digits;
    }
    return out;
}

std::string format_percent(double fraction) {
    return format_fixed(fraction * 100.0, 1);
}

std::string ratio_value::display() const {
    if (denominator > 0.0) {
        return format_fixed(numerator / denominator, 2) + " : 1";
    }
    if (numerator > 0.0) {
        return "inf : 1";
    }
    return "n/a";
}

const competition_cell & matrix::at(const std::string & row, const std::string & col) const {
    auto it = cells.find({row, col});
    if (it == cells.end()) {
        throw tournament_error("matrix '" + model_id + "' has no cell (" + row + ", " + col + ")");
    }
    return it->second;
}

json matrix::to_json() const {
    json cell_list = json::array();
    for (const auto & row : labels) {
        for (const auto & col : labels) {
            if (row == col) continue;
            const auto & cell = at(row, col);
            cell_list.push_back({
                {"row", cell.row_label},
                {"col", cell.col_label},
                {"row_rate", cell.row_rate},
                {"col_rate", cell.col_rate},
                {"correct_rate", cell.correct_rate},
                {"n_cases", cell.n_cases},
            });
        }
    }
    json avg_list = json::array();
    for (const auto & label : labels) {
        auto it = avg_ratio.find(label);
        if (it == avg_ratio.end()) continue;
        avg_list.push_back({
            {"label", label},
            {"numerator", it->second.numerator},
            {"denominator", it->second.denominator},
            {"display", it->second.display()},
        });
    }
    return {
        {"model_id", model_id},
        {"labels", labels},
        {"cells", cell_list},
        {"avg_ratio", avg_list},
    };
}

matrix matrix::from_json(const json & j) {
    matrix m;
    m.model_id = j.value("model_id", "");
    for (const auto & label : j.value("labels", json::array())) {
        m.labels.push_back(label.get<std::string>());
    }
    for (const auto & cell : j.value("cells", json::array())) {
        competition_cell c;
        c.row_label = cell.value("row", "");
        c.col_label = cell.value("col", "");
        c.row_rate = cell.value("row_rate", 0.0);
        c.col_rate = cell.value("col_rate", 0.0);
        c.correct_rate = cell.value("correct_rate", 0.0);
        c.n_cases = cell.value("n_cases", 0);
        m.cells[{c.row_label, c.col_label}] = c;
    }
    for (const auto & avg : j.value("avg_ratio", json::array())) {
        ratio_value r;
        r.numerator = avg.value("numerator", 0.0);
        r.denominator = avg.value("denominator", 0.0);
        m.avg_ratio[avg.value("label", "")] = r;
    }
    return m;
}

ratio_value average_ratio(const matrix & m, const std::string & label) {
    ratio_value r;
    bool found = false;
    for (const auto & opponent : m.labels) {
        if (opponent == label) {
            found = true;
            continue;
        }
        const auto & cell = m.at(label, opponent);
        r.numerator += cell.row_rate;
        r.denominator += cell.col_rate;
    }
    if (!found) {
        throw tournament_error("label '" + label + "' is not in matrix '" + m.model_id + "'");
    }
    return r;
}

void fill_average_ratios(matrix & m) {
    m.avg_ratio.clear();
    for (const auto & label : m.labels) {
        m.avg_ratio[label] = average_ratio(m, label);
    }
}

competition_cell run_pair(const model_handle & model, const std::vector<sample> & samples,
                          const std::string & edit_a, const std::string & edit_b,
                          const run_deps & deps) {
    if (!deps.edits) {
        throw tournament_error("run_pair needs an edit engine");
    }
    if (samples.empty()) {
        throw tournament_error("run_pair needs a non-empty corpus");
    }
    std::vector<test_case> cases;
    cases.reserve(2 * samples.size());
    for (const auto & s : samples) {
        for (auto & tc : build_pairings(s, edit_a, edit_b, *deps.edits)) {
            cases.push_back(std::move(tc));
        }
    }
    std::vector<case_verdict> verdicts(cases.size());
    parallel_for(cases.size(), deps.parallelism, [&](size_t i) {
        const model_response response = invoke(model, cases[i], deps.cache);
        verdicts[i] = judge_case(cases[i], response, cases[i].source->truth, deps.judging);
    });
    if (deps.collect_verdicts) {
        deps.collect_verdicts->insert(deps.collect_verdicts->end(), verdicts.begin(), verdicts.end());
    }
    const pair_rates rates = usage_rates(verdicts, edit_a, edit_b);
    return {edit_a, edit_b, rates.rate_a, rates.rate_b, rates.correct_rate,
            static_cast<int>(cases.size())};
}

matrix run_tournament(const model_handle & model, const std::vector<sample> & samples,
                      const std::vector<std::string> & labels, const run_deps & deps) {
    if (labels.size() < 2) {
        throw tournament_error("a tournament needs at least 2 edit labels");
    }
    if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
        throw tournament_error("tournament labels must be distinct");
    }
    matrix m;
    m.model_id = model.model_id;
    m.labels = labels;
    for (size_t i = 0; i < labels.size(); ++i) {
        for (size_t j = i + 1; j < labels.size(); ++j) {
            if (deps.progress) {
                deps.progress(model.model_id + ": " + labels[i] + " vs " + labels[j]);
            }
            competition_cell cell = run_pair(model, samples, labels[i], labels[j], deps);
            m.cells[{labels[i], labels[j]}] = cell;
            m.cells[{labels[j], labels[i]}] = cell.mirrored();
        }
    }
    fill_average_ratios(m);
    return m;
}

matrix aggregate(const std::vector<matrix> & matrices) {
    if (matrices.empty()) {
        throw tournament_error("aggregate needs at least one matrix");
    }
    const auto & first = matrices.front();
    const std::set<std::string> reference(first.labels.begin(), first.labels.end());
    for (const auto & m : matrices) {
        const std::set<std::string> labels(m.labels.begin(), m.labels.end());
        if (labels != reference) {
            std::string diff;
            for (const auto & l : labels) {
                if (!reference.count(l)) diff += " +" + l;
            }
            for (const auto & l : reference) {
                if (!labels.count(l)) diff += " -" + l;
            }
            throw tournament_error("matrix '" + m.model_id + "' label set differs from '" +
                                   first.model_id + "':" + diff);
        }
    }
    matrix out;
    out.model_id = "aggregate";
    out.labels = first.labels;
    const double n = static_cast<double>(matrices.size());
    // Addends are summed in sorted order so the mean is independent of the
    // order the matrices were supplied in.
    auto mean_of = [&](auto select) {
        std::vector<double> values;
        values.reserve(matrices.size());
        return [&matrices = matrices, n, values, select](const std::string & row,
                                                         const std::string & col) mutable {
            values.clear();
            for (const auto & m : matrices) {
                values.push_back(select(m.at(row, col)));
            }
            std::sort(values.begin(), values.end());
            double sum = 0.0;
            for (double v : values) sum += v;
            return sum / n;
        };
    };
    auto mean_row = mean_of([](const competition_cell & c) { return c.row_rate; });
    auto mean_col = mean_of([](const competition_cell & c) { return c.col_rate; });
    auto mean_correct = mean_of([](const competition_cell & c) { return c.correct_rate; });
    for (const auto & row : out.labels) {
        for (const auto & col : out.labels) {
            if (row == col) continue;
            competition_cell cell;
            cell.row_label = row;
            cell.col_label = col;
            cell.row_rate = mean_row(row, col);
            cell.col_rate = mean_col(row, col);
            cell.correct_rate = mean_correct(row, col);
            for (const auto & m : matrices) {
                cell.n_cases += m.at(row, col).n_cases;
            }
            out.cells[{row, col}] = cell;
        }
    }
    fill_average_ratios(out);
    return out;
}

} // namespace toolspin
