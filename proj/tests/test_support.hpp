#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "toolspin/corpus.hpp"
#include "toolspin/edits.hpp"
#include "toolspin/types.hpp"

namespace test_support {

inline std::filesystem::path repo_dir() {
    return std::filesystem::path(TOOLSPIN_REPO_DIR);
}

inline std::filesystem::path data_dir() { return repo_dir() / "data"; }
inline std::filesystem::path prompts_dir() { return repo_dir() / "assets" / "prompts"; }
inline std::filesystem::path fixtures_dir() { return repo_dir() / "assets" / "fixtures" / "published"; }

// Fresh per-process scratch directory, removed on destruction.
struct temp_dir {
    std::filesystem::path path;
    temp_dir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("toolspin_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path file(const std::string & name) const { return path / name; }
};

inline void write_file(const std::filesystem::path & path, const std::string & content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

// Two-parameter toy sample: required integer 'a' (only 5 accepted) and an
// omittable string 'unit' accepting "km".
inline toolspin::sample toy_sample(const std::string & id = "toy_0") {
    toolspin::sample s;
    s.id = id;
    s.category = toolspin::corpus_category::live_simple;
    s.query = "How far is it?";
    s.tool.name = "calculate_distance";
    s.tool.description = "Computes a distance.";
    s.tool.params.kind = toolspin::param_kind::object;
    toolspin::param_schema a;
    a.kind = toolspin::param_kind::integer;
    toolspin::param_schema unit;
    unit.kind = toolspin::param_kind::string;
    s.tool.params.properties = {{"a", a}, {"unit", unit}};
    s.tool.params.required = {"a"};
    s.truth.function_name = "calculate_distance";
    s.truth.acceptable = {
        {"a", {toolspin::json(5)}},
        {"unit", {toolspin::json("km"), toolspin::json("")}},
    };
    return s;
}

// Frozen manifests for every llm-assisted prompt without touching a
// gateway; texts are deterministic functions of the sample.
inline toolspin::manifest_store frozen_manifests(const std::vector<toolspin::sample> & samples) {
    toolspin::manifest_store store;
    auto freeze = [&](const std::string & prompt_id, auto make_text) {
        toolspin::rewrite_manifest m;
        m.model_id = "test";
        m.prompt_id = prompt_id;
        m.frozen = true;
        for (const auto & s : samples) {
            m.entries[s.id] = make_text(s);
        }
        store.put(std::move(m));
    };
    freeze("lengthen", [](const toolspin::sample & s) {
        return s.tool.description + " Expanded details for " + s.tool.name + ".";
    });
    freeze("usage_example", [](const toolspin::sample & s) {
        return "Example: " + s.tool.name + "() returns a value.";
    });
    freeze("shorten", [](const toolspin::sample & s) { return "Short " + s.id + "."; });
    freeze("tone_professional", [](const toolspin::sample & s) {
        return "Formal rewrite of " + s.id + ".";
    });
    freeze("tone_casual", [](const toolspin::sample & s) { return "Casual rewrite of " + s.id + "."; });
    freeze("translate", [](const toolspin::sample & s) { return "[zh] " + s.tool.description; });
    return store;
}

inline size_t count_occurrences(const std::string & haystack, const std::string & needle) {
    size_t count = 0;
    size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace test_support
