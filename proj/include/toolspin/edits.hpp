#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolspin/types.hpp"

namespace toolspin {

struct edit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class edit_kind {
    identity,        // leaves the description unchanged
    append_static,   // description + " " + fixed sentence
    append_template, // template with a <slot>, instantiated at registration
    rewrite_llm,     // description replaced by a frozen rewrite
    append_llm,      // description + " " + frozen generated text
    compose,         // ordered child fragments joined by single spaces
};

struct edit_spec {
    std::string label;
    edit_kind kind = edit_kind::identity;
    std::string text;                  // append kinds: the sentence to append
    std::string template_text;         // append_template: raw "<slot>" template
    std::string slot_value;            // append_template: substituted value
    std::string prompt_id;             // rewrite_llm / append_llm
    std::vector<std::string> children; // compose: >= 2 labels, none compose
};

class edit_registry {
public:
    void add(edit_spec spec); // throws on duplicate label or bad compose list
    bool contains(const std::string & label) const;
    const edit_spec & at(const std::string & label) const; // throws edit_error
    const std::vector<std::string> & labels() const { return order_; }

    // Full catalog: the ten competition labels plus every published append
    // variant and the llm-assisted edits (shorten, multilingual).
    static edit_registry builtin();

private:
    std::map<std::string, edit_spec> specs_;
    std::vector<std::string> order_;
};

// The ten labels used in edit-vs-edit competitions, in canonical order.
const std::vector<std::string> & competition_labels();

// Frozen store of llm-generated texts for one prompt, keyed by sample id.
// Freezing once and reusing the file keeps every later run reproducible.
struct rewrite_manifest {
    std::string model_id;
    std::string prompt_id;
    std::string created_at;
    bool frozen = false;
    std::map<std::string, std::string> entries; // sample_id -> text

    void save(const std::filesystem::path & path) const;
    static rewrite_manifest load(const std::filesystem::path & path);
};

// Directory of manifests, one "<prompt_id>.jsonl" file per prompt.
class manifest_store {
public:
    manifest_store() = default;
    explicit manifest_store(const std::filesystem::path & dir); // loads existing files

    void put(rewrite_manifest m);
    const rewrite_manifest * find(const std::string & prompt_id) const;
    // Frozen entry lookup; throws edit_error naming sample_id and prompt_id
    // (and telling the caller to run the freeze step) when absent.
    const std::string & frozen_text(const std::string & prompt_id, const std::string & sample_id) const;

private:
    std::map<std::string, rewrite_manifest> manifests_;
};

// A prompt pair shipped as text assets: system.txt + query_template.txt.
struct prompt_pair {
    std::string prompt_id;
    std::string system;
    std::string query_template; // slots: {original_description}, {func_name}, {func_params}, {target_language}
};

const std::vector<std::string> & known_prompt_ids();
prompt_pair load_prompt_pair(const std::filesystem::path & prompts_dir, const std::string & prompt_id);

// Registry + manifests, bundled as the handle the pairing builder consumes.
class edit_engine {
public:
    edit_engine(const edit_registry & registry, const manifest_store & manifests)
        : registry_(&registry), manifests_(&manifests) {}

    const edit_registry & registry() const { return *registry_; }
    std::string apply(const std::string & label, const std::string & description,
                      const std::string & sample_id) const;
    std::string apply(const edit_spec & spec, const std::string & description,
                      const std::string & sample_id) const;

private:
    const edit_registry * registry_;
    const manifest_store * manifests_;
};

std::string apply_edit(const std::string & description, const edit_spec & edit,
                       const std::string & sample_id, const edit_registry & registry,
                       const manifest_store & manifests);

// The combined edit: assertive cue, lengthened description, name-drop,
// maintenance claim, numerical claim, usage example — in that order, the
// lengthened text standing in for the original description.
std::string apply_combined(const std::string & description, const std::string & sample_id,
                           const edit_registry & registry, const manifest_store & manifests);

// Synchronous chat completion used by the freeze step. Implementations live
// in the gateway; a std::function keeps this module free of transport code.
using chat_fn = std::function<std::string(const std::string & system, const std::string & user)>;

struct freeze_options {
    bool force = false;
    std::string target_language = "Chinese";
    std::filesystem::path prompts_dir = "assets/prompts";
};

// Generates one entry per sample with the prompt pair for prompt_id and
// persists the manifest at out_path. On gateway failure the partial
// manifest is saved unfrozen so a re-run can resume where it stopped.
rewrite_manifest freeze_rewrites(const std::vector<sample> & samples,
                                 const std::string & prompt_id,
                                 const std::string & model_id,
                                 const chat_fn & chat,
                                 const std::filesystem::path & out_path,
                                 const freeze_options & options = {});

// Query-template instantiation, exposed for tests.
std::string instantiate_prompt(const std::string & query_template, const sample & s,
                               const std::string & target_language);

} // namespace toolspin
