#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolspin/types.hpp"

namespace toolspin {

class edit_engine;

struct corpus_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Loads a line-delimited corpus file plus its ground-truth sibling.
// Every record must carry {id, question, function:{name, description,
// parameters}}; ground truth is keyed by id in the sibling file. Samples
// whose ground truth is missing or inconsistent with the schema are
// rejected, not skipped.
std::vector<sample> load_corpus(const std::filesystem::path & samples_path,
                                const std::filesystem::path & ground_truth_path,
                                corpus_category category);

// Sibling convention: "<stem>_gt<ext>" next to the samples file.
std::vector<sample> load_corpus(const std::filesystem::path & samples_path,
                                corpus_category category);

// Stable content hash over ids, queries, schemas and ground truth.
// Identical corpora give identical digests across runs and platforms.
std::string corpus_digest(const std::vector<sample> & samples);

// Builds the two ordering-calibrated test cases for one sample and one
// edit pair: case "ab" puts edit_a in slot 1, case "ba" puts edit_b there.
// Tool names get positional suffixes "1"/"2" regardless of the edits.
std::vector<test_case> build_pairings(const sample & s,
                                      const std::string & edit_a,
                                      const std::string & edit_b,
                                      const edit_engine & engine);

} // namespace toolspin
