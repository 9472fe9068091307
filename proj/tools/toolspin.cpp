#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toolspin/corpus.hpp"
#include "toolspin/edits.hpp"
#include "toolspin/gateway.hpp"
#include "toolspin/judge.hpp"
#include "toolspin/report.hpp"
#include "toolspin/tournament.hpp"

namespace fs = std::filesystem;
using namespace toolspin;

namespace {

constexpr int EXIT_OK = 0;
constexpr int EXIT_FAILURE_RUN = 1; // experiment or validation failure
constexpr int EXIT_USAGE = 2;       // bad flags, config or inputs

struct app_config {
    std::map<std::string, std::string> corpus_paths = {
        {"live_simple", "data/live_simple.jsonl"},
        {"nonlive_simple", "data/nonlive_simple.jsonl"},
    };
    std::vector<std::string> categories = {"live_simple"};
    std::vector<std::string> models;
    std::vector<std::string> edit_labels;
    int parallelism = 8;
    std::string cache_path = "cache.jsonl";
    std::string out_dir = "out";
    std::string manifests_dir = "manifests";
    std::string prompts_dir = "assets/prompts";
    std::string fixtures_dir = "assets/fixtures/published";
    std::string target_language = "Chinese";
    double temperature = 0.0;
};

app_config load_config(const std::string & path) {
    app_config cfg;
    if (path.empty()) return cfg;
    std::ifstream file(path);
    if (!file.is_open()) {
        throw std::runtime_error("cannot open config " + path);
    }
    json j;
    try {
        j = json::parse(file);
    } catch (const json::exception & e) {
        throw std::runtime_error("config " + path + " is not valid json: " + e.what());
    }
    const json corpus = j.value("corpus", json::object());
    for (const auto & name : {"live_simple", "nonlive_simple"}) {
        if (corpus.contains(name)) cfg.corpus_paths[name] = corpus[name].get<std::string>();
    }
    if (corpus.contains("categories")) {
        cfg.categories.clear();
        for (const auto & c : corpus["categories"]) cfg.categories.push_back(c.get<std::string>());
    }
    for (const auto & m : j.value("models", json::array())) {
        cfg.models.push_back(m.get<std::string>());
    }
    for (const auto & e : j.value("edits", json::array())) {
        cfg.edit_labels.push_back(e.get<std::string>());
    }
    const json run = j.value("run", json::object());
    cfg.parallelism = run.value("parallelism", cfg.parallelism);
    cfg.cache_path = run.value("cache", cfg.cache_path);
    cfg.out_dir = run.value("out", cfg.out_dir);
    cfg.manifests_dir = run.value("manifests", cfg.manifests_dir);
    cfg.prompts_dir = run.value("prompts", cfg.prompts_dir);
    cfg.fixtures_dir = run.value("fixtures", cfg.fixtures_dir);
    cfg.target_language = run.value("target_language", cfg.target_language);
    cfg.temperature = run.value("temperature", cfg.temperature);
    return cfg;
}

std::vector<sample> load_samples(const app_config & cfg) {
    std::vector<sample> all;
    for (const auto & name : cfg.categories) {
        auto category = corpus_category_from_name(name);
        if (!category) {
            throw corpus_error("unknown corpus category '" + name + "'");
        }
        auto it = cfg.corpus_paths.find(name);
        if (it == cfg.corpus_paths.end()) {
            throw corpus_error("no corpus path configured for '" + name + "'");
        }
        auto part = load_corpus(it->second, *category);
        all.insert(all.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return all;
}

std::string file_safe(const std::string & id) {
    std::string out = id;
    for (char & c : out) {
        if (c == ':' || c == '/' || c == ' ' || c == '\\') c = '_';
    }
    return out;
}

// The llm-assisted prompts the full competition label set depends on.
const std::vector<std::string> tournament_prompt_ids = {
    "usage_example", "lengthen", "tone_professional", "tone_casual",
};

int cmd_freeze(const app_config & cfg, const std::string & model_uri,
               std::vector<std::string> prompts, bool force, bool dry_run) {
    if (prompts.empty()) {
        prompts = known_prompt_ids();
    }
    auto samples = load_samples(cfg);
    if (dry_run) {
        std::cout << "freeze plan: " << prompts.size() << " prompt(s) x " << samples.size()
                  << " samples = " << prompts.size() * samples.size() << " requests via "
                  << model_uri << "\n";
        return EXIT_OK;
    }
    model_handle handle = model_handle::parse(model_uri);
    handle.params.temperature = cfg.temperature;
    response_cache cache(cfg.cache_path);
    chat_fn chat = [&](const std::string & system, const std::string & user) {
        return chat_complete(handle, system, user, &cache);
    };
    freeze_options options;
    options.force = force;
    options.target_language = cfg.target_language;
    options.prompts_dir = cfg.prompts_dir;

    int failures = 0;
    for (const auto & prompt_id : prompts) {
        const fs::path out_path = fs::path(cfg.manifests_dir) / (prompt_id + ".jsonl");
        try {
            auto manifest = freeze_rewrites(samples, prompt_id, handle.model_id, chat, out_path, options);
            std::cout << "froze " << manifest.entries.size() << " entries for '" << prompt_id
                      << "' -> " << out_path.string() << "\n";
        } catch (const edit_error & e) {
            if (std::string(e.what()).find("already frozen") != std::string::npos) {
                std::cout << "'" << prompt_id << "' already frozen (use --force to regenerate)\n";
                continue;
            }
            std::cerr << "freeze failed: " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? EXIT_OK : EXIT_FAILURE_RUN;
}

int cmd_duel(const app_config & cfg, const std::string & model_uri, const std::string & edit,
             const std::string & versus, const std::string & verdicts_path, bool dry_run) {
    auto samples = load_samples(cfg);
    if (dry_run) {
        std::cout << "duel plan: " << edit << " vs " << versus << ", " << 2 * samples.size()
                  << " cases via " << model_uri << "\n";
        return EXIT_OK;
    }
    model_handle handle = model_handle::parse(model_uri);
    handle.params.temperature = cfg.temperature;
    edit_registry registry = edit_registry::builtin();
    manifest_store manifests(cfg.manifests_dir);
    edit_engine engine(registry, manifests);
    response_cache cache(cfg.cache_path);

    run_deps deps;
    deps.edits = &engine;
    deps.cache = &cache;
    deps.parallelism = cfg.parallelism;
    std::vector<case_verdict> verdicts;
    if (!verdicts_path.empty()) {
        deps.collect_verdicts = &verdicts;
    }

    competition_cell cell = run_pair(handle, samples, edit, versus, deps);
    std::cout << render_head_to_head(cell);
    std::cout << "(" << cell.n_cases << " cases, model " << handle.model_id << ")\n";
    if (!verdicts_path.empty()) {
        std::ofstream(verdicts_path) << verdicts_to_jsonl(verdicts);
        std::cout << "verdicts -> " << verdicts_path << "\n";
    }
    return EXIT_OK;
}

int cmd_tournament(const app_config & cfg, bool dry_run, bool fixtures_only) {
    if (fixtures_only) {
        auto report = replay_fixtures(cfg.fixtures_dir);
        std::cout << report.summary();
        return report.pass ? EXIT_OK : EXIT_FAILURE_RUN;
    }
    if (cfg.models.empty()) {
        std::cerr << "config lists no models\n";
        return EXIT_USAGE;
    }
    std::vector<std::string> labels = cfg.edit_labels;
    if (labels.empty()) {
        labels = competition_labels();
    }
    auto samples = load_samples(cfg);
    const size_t pairs = labels.size() * (labels.size() - 1) / 2;
    if (dry_run) {
        std::cout << "tournament plan: " << cfg.models.size() << " model(s) x " << pairs
                  << " pairs x " << 2 * samples.size() << " cases = "
                  << cfg.models.size() * pairs * 2 * samples.size() << " requests\n";
        return EXIT_OK;
    }

    edit_registry registry = edit_registry::builtin();
    manifest_store manifests(cfg.manifests_dir);
    edit_engine engine(registry, manifests);
    response_cache cache(cfg.cache_path);

    run_deps deps;
    deps.edits = &engine;
    deps.cache = &cache;
    deps.parallelism = cfg.parallelism;
    deps.progress = [](const std::string & message) { std::cout << message << "\n"; };

    fs::create_directories(cfg.out_dir);
    std::vector<matrix> matrices;
    for (const auto & model_uri : cfg.models) {
        model_handle handle = model_handle::parse(model_uri);
        handle.params.temperature = cfg.temperature;
        matrix m = run_tournament(handle, samples, labels, deps);
        const std::string base = (fs::path(cfg.out_dir) / file_safe(m.model_id)).string();
        std::ofstream(base + ".json") << m.to_json().dump(2) << "\n";
        std::ofstream(base + ".csv") << render_matrix(m, render_format::csv);
        std::ofstream(base + ".md") << render_matrix(m, render_format::markdown);
        matrices.push_back(std::move(m));
    }
    matrix combined = aggregate(matrices);
    const std::string base = (fs::path(cfg.out_dir) / "aggregate").string();
    std::ofstream(base + ".json") << combined.to_json().dump(2) << "\n";
    std::ofstream(base + ".csv") << render_matrix(combined, render_format::csv);
    std::ofstream(base + ".md") << render_matrix(combined, render_format::markdown);

    std::ofstream validation(fs::path(cfg.out_dir) / "validation.txt");
    size_t violations = 0;
    for (const auto & m : matrices) {
        for (const auto & v : check_matrix_invariants(m)) {
            validation << "FAIL " << v << "\n";
            ++violations;
        }
    }
    for (const auto & v : check_matrix_invariants(combined)) {
        validation << "FAIL " << v << "\n";
        ++violations;
    }
    validation << (violations == 0 ? "all matrix invariants hold\n"
                                   : std::to_string(violations) + " violation(s)\n");
    std::cout << "wrote " << matrices.size() << " model matrices + aggregate to " << cfg.out_dir << "\n";
    return violations == 0 ? EXIT_OK : EXIT_FAILURE_RUN;
}

int cmd_validate(const app_config & cfg, bool dry_run) {
    if (!fs::exists(cfg.fixtures_dir)) {
        std::cerr << "fixture directory not found: " << cfg.fixtures_dir << "\n";
        return EXIT_USAGE;
    }
    if (dry_run) {
        std::cout << "validate plan: replay " << fixture_model_ids().size()
                  << " per-model tables + aggregate from " << cfg.fixtures_dir << "\n";
        return EXIT_OK;
    }
    auto report = replay_fixtures(cfg.fixtures_dir);
    std::cout << report.summary();
    return report.pass ? EXIT_OK : EXIT_FAILURE_RUN;
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"tool-preference evaluation harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string cache_path;
    std::string out_dir;
    std::string fixtures_dir;
    std::string manifests_dir;
    std::string corpus_path;
    std::string category = "";
    int parallelism = 0;
    bool dry_run = false;
    bool force = false;

    app.add_option("--config", config_path, "json config file");
    app.add_option("--cache", cache_path, "response cache path");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--parallelism", parallelism, "max concurrent requests");
    app.add_option("--manifests", manifests_dir, "rewrite manifest directory");
    app.add_option("--corpus", corpus_path, "corpus file (overrides config for --category)");
    app.add_option("--category", category, "live_simple or nonlive_simple");
    app.add_flag("--dry-run", dry_run, "print the work plan, change nothing");
    app.add_flag("--force", force, "regenerate frozen manifests");

    auto * freeze = app.add_subcommand("freeze", "generate and freeze llm-assisted rewrites");
    freeze->fallthrough();
    std::string freeze_model = "mock:first_slot";
    std::vector<std::string> freeze_prompts;
    freeze->add_option("--model", freeze_model, "model uri (mock:... or a served model name)");
    freeze->add_option("--prompt", freeze_prompts, "prompt id(s); default: all");

    auto * duel = app.add_subcommand("duel", "run one edit-vs-edit pair and print the summary");
    duel->fallthrough();
    std::string duel_model = "mock:first_slot";
    std::string duel_edit;
    std::string duel_vs = "original";
    duel->add_option("--model", duel_model, "model uri");
    duel->add_option("--edit", duel_edit, "edit label under test")->required();
    duel->add_option("--vs", duel_vs, "opponent label (default original)");
    std::string duel_verdicts;
    duel->add_option("--verdicts", duel_verdicts, "write per-case verdicts to this jsonl file");

    auto * tournament = app.add_subcommand("tournament", "run the full edit-vs-edit matrix");
    tournament->fallthrough();
    bool fixtures_only = false;
    tournament->add_flag("--fixtures-only", fixtures_only, "replay the reference fixtures instead");

    auto * validate = app.add_subcommand("validate", "replay reference fixtures and check invariants");
    validate->fallthrough();
    app.add_option("--fixtures", fixtures_dir, "reference fixture directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        // Help requests exit 0; every real parse problem is a usage error.
        int code = app.exit(e);
        return code == 0 ? EXIT_OK : EXIT_USAGE;
    }

    app_config cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception & e) {
        std::cerr << "config error: " << e.what() << "\n";
        return EXIT_USAGE;
    }

    try {
        if (!cache_path.empty()) cfg.cache_path = cache_path;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!fixtures_dir.empty()) cfg.fixtures_dir = fixtures_dir;
        if (!manifests_dir.empty()) cfg.manifests_dir = manifests_dir;
        if (parallelism > 0) cfg.parallelism = parallelism;
        if (!category.empty()) cfg.categories = {category};
        if (!corpus_path.empty()) {
            if (cfg.categories.size() != 1) {
                std::cerr << "--corpus needs a single --category\n";
                return EXIT_USAGE;
            }
            cfg.corpus_paths[cfg.categories[0]] = corpus_path;
        }

        if (freeze->parsed()) {
            return cmd_freeze(cfg, freeze_model, freeze_prompts, force, dry_run);
        }
        if (duel->parsed()) {
            return cmd_duel(cfg, duel_model, duel_edit, duel_vs, duel_verdicts, dry_run);
        }
        if (tournament->parsed()) {
            return cmd_tournament(cfg, dry_run, fixtures_only);
        }
        if (validate->parsed()) {
            return cmd_validate(cfg, dry_run);
        }
        return EXIT_USAGE;
    } catch (const corpus_error & e) {
        std::cerr << "corpus error: " << e.what() << "\n";
        return EXIT_USAGE;
    } catch (const edit_error & e) {
        std::cerr << "edit error: " << e.what() << "\n";
        return EXIT_USAGE;
    } catch (const retry_exhausted_error & e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return EXIT_FAILURE_RUN;
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_FAILURE_RUN;
    }
}
