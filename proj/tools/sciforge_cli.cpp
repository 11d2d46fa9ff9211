// Command-line front end for the sciforge pipeline. Everything goes through
// the public C API; this file owns argument parsing and exit codes only.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sciforge.h"

namespace {

// 0 = success, 1 = validation/other failure, 2 = transport failure.
int exit_code_for(int rc) {
    if (rc == SCIFORGE_OK) return 0;
    return rc == SCIFORGE_E_TRANSPORT ? 2 : 1;
}

int finish(int rc) {
    if (rc != SCIFORGE_OK) std::fprintf(stderr, "error: %s\n", sciforge_last_error());
    return exit_code_for(rc);
}

void print_owned(char* s) {
    if (!s) return;
    std::fputs(s, stdout);
    std::size_t len = std::char_traits<char>::length(s);
    if (len == 0 || s[len - 1] != '\n') std::fputc('\n', stdout);
    sciforge_string_free(s);
}

struct ConfigHandle {
    sciforge_config* ptr = sciforge_config_create();
    ~ConfigHandle() { sciforge_config_destroy(ptr); }
};

// Layering: file, then environment, then explicit --set pairs.
int apply_config(sciforge_config* cfg, const std::string& config_file,
                 const std::vector<std::string>& sets) {
    if (!config_file.empty()) {
        if (int rc = sciforge_config_load_file(cfg, config_file.c_str())) return rc;
    }
    if (int rc = sciforge_config_load_env(cfg)) return rc;
    for (const auto& pair : sets) {
        std::size_t eq = pair.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got \"%s\"\n", pair.c_str());
            return SCIFORGE_E_ARG;
        }
        if (int rc = sciforge_config_set(cfg, pair.substr(0, eq).c_str(),
                                         pair.substr(eq + 1).c_str()))
            return rc;
    }
    return SCIFORGE_OK;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sciforge: curate scientific instruction-tuning data"};
    // The subcommand requirement is enforced after parsing so that an
    // unknown flag is reported as the unknown flag, not as a missing
    // subcommand.

    std::string config_file;
    std::string seed;
    std::vector<std::string> sets;
    app.add_option("--config", config_file, "Config file (key = value lines)");
    app.add_option("--set", sets, "Override a config key, as key=value")->take_all();
    app.add_option("--seed", seed, "Seed for all randomness (shorthand for --set seed=N)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse, deduplicate and screen a corpus");
    std::string in_input, in_clean, in_quarantine;
    ingest->add_option("--input", in_input, "Question corpus (JSONL)")->required();
    ingest->add_option("--output", in_clean, "Clean records out (JSONL)");
    ingest->add_option("--quarantine", in_quarantine, "Defective records out (JSONL)");

    // annotate
    auto* annotate = app.add_subcommand("annotate", "Run the three-pass annotation funnel");
    std::string an_questions, an_solutions, an_checkpoint;
    annotate->add_option("--questions", an_questions, "Question corpus (JSONL)")->required();
    annotate->add_option("--solutions", an_solutions, "Solutions out (JSONL)");
    annotate->add_option("--checkpoint", an_checkpoint, "Checkpoint file for resumable runs");

    // label
    auto* label = app.add_subcommand("label", "Judge solutions against reference answers");
    std::string lb_questions, lb_solutions, lb_verdicts;
    label->add_option("--questions", lb_questions, "Question corpus (JSONL)")->required();
    label->add_option("--solutions", lb_solutions, "Solutions to judge (JSONL)")->required();
    label->add_option("--verdicts", lb_verdicts, "Verdicts out (JSONL)");

    // train-filter
    auto* train = app.add_subcommand("train-filter", "Train the quality filter");
    std::string tf_pos, tf_neg, tf_model;
    train->add_option("--positives", tf_pos, "Positive examples (JSONL)")->required();
    train->add_option("--negatives", tf_neg, "Negative examples (JSONL)")->required();
    train->add_option("--model-out", tf_model, "Trained model out (JSON)");

    // score
    auto* score = app.add_subcommand("score", "Score a dataset and drop the lowest fraction");
    std::string sc_model, sc_dataset, sc_kept, sc_dropped;
    double sc_fraction = -1.0;
    score->add_option("--model", sc_model, "Trained filter model (JSON)")->required();
    score->add_option("--dataset", sc_dataset, "Instruction dataset (JSONL)")->required();
    score->add_option("--drop-fraction", sc_fraction,
                      "Fraction to drop (default: filter.drop_fraction)");
    score->add_option("--kept", sc_kept, "Surviving entries out (JSONL)");
    score->add_option("--dropped", sc_dropped, "Dropped entries out (JSONL)");

    // assemble
    auto* assemble = app.add_subcommand("assemble", "Build the instruction dataset");
    std::string as_questions, as_solutions, as_dataset, as_stats;
    assemble->add_option("--questions", as_questions, "Question corpus (JSONL)")->required();
    assemble->add_option("--solutions", as_solutions, "Annotated solutions (JSONL)");
    assemble->add_option("--dataset-out", as_dataset, "Dataset out (JSONL)");
    assemble->add_option("--stats-out", as_stats, "Dataset stats out (JSON)");

    // eval
    auto* eval = app.add_subcommand("eval", "Score benchmark responses");
    std::string ev_items, ev_responses, ev_groups;
    eval->add_option("--items", ev_items, "Benchmark items (JSONL)")->required();
    eval->add_option("--responses", ev_responses, "Model responses (JSONL)")->required();
    eval->add_option("--groups", ev_groups, "Task groups (JSON)");

    // stats
    auto* stats = app.add_subcommand("stats", "Summarize an assembled dataset");
    std::string st_dataset;
    stats->add_option("--dataset", st_dataset, "Instruction dataset (JSONL)")->required();

    // emit-train-config
    auto* emit = app.add_subcommand("emit-train-config", "Write the fine-tuning recipe");
    std::string em_output;
    emit->add_option("--output", em_output, "Recipe out (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's per-error exit codes: usage problems are all exit 1;
        // --help and --version remain exit 0.
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (app.get_subcommands().empty()) {
        std::fprintf(stderr, "error: a subcommand is required (see --help)\n");
        return 1;
    }

    ConfigHandle cfg;
    if (!cfg.ptr) {
        std::fprintf(stderr, "error: out of memory\n");
        return 1;
    }
    if (int rc = apply_config(cfg.ptr, config_file, sets)) return finish(rc);
    if (!seed.empty()) {
        if (int rc = sciforge_config_set(cfg.ptr, "seed", seed.c_str())) return finish(rc);
    }

    char* report = nullptr;
    char* table = nullptr;
    int rc = SCIFORGE_OK;

    if (*ingest) {
        rc = sciforge_ingest(cfg.ptr, in_input.c_str(), opt(in_clean), opt(in_quarantine),
                             &report);
    } else if (*annotate) {
        rc = sciforge_annotate(cfg.ptr, an_questions.c_str(), opt(an_solutions),
                               opt(an_checkpoint), &report);
    } else if (*label) {
        rc = sciforge_label(cfg.ptr, lb_questions.c_str(), lb_solutions.c_str(),
                            opt(lb_verdicts), &report);
    } else if (*train) {
        rc = sciforge_train_filter(cfg.ptr, tf_pos.c_str(), tf_neg.c_str(), opt(tf_model),
                                   &report);
    } else if (*score) {
        rc = sciforge_score(cfg.ptr, sc_model.c_str(), sc_dataset.c_str(), sc_fraction,
                            opt(sc_kept), opt(sc_dropped), &report);
    } else if (*assemble) {
        rc = sciforge_assemble(cfg.ptr, as_questions.c_str(), opt(as_solutions), opt(as_dataset),
                               opt(as_stats), &report);
    } else if (*eval) {
        rc = sciforge_eval(cfg.ptr, ev_items.c_str(), ev_responses.c_str(), opt(ev_groups),
                           &report, &table);
    } else if (*stats) {
        rc = sciforge_stats(cfg.ptr, st_dataset.c_str(), &report, &table);
    } else if (*emit) {
        rc = sciforge_emit_train_config(cfg.ptr, opt(em_output), &report);
    }

    if (rc == SCIFORGE_OK) {
        print_owned(table); // human-readable summary first, then the JSON
        print_owned(report);
    }
    return finish(rc);
}
