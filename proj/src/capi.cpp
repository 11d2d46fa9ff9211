#include "sciforge.h"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "sciforge/config.hpp"
#include "sciforge/errors.hpp"
#include "sciforge/filter.hpp"
#include "sciforge/pipeline.hpp"

struct sciforge_config {
    sciforge::PipelineConfig impl;
};

struct sciforge_classifier {
    sciforge::QualityClassifier impl;
};

namespace {

thread_local std::string g_last_error;

int code_for(sciforge::Errc c) {
    using sciforge::Errc;
    switch (c) {
    case Errc::TransportError:
    case Errc::NonRetryable:
    case Errc::MockExhausted:
        return SCIFORGE_E_TRANSPORT;
    case Errc::IoError:
        return SCIFORGE_E_IO;
    case Errc::InvalidArgument:
        return SCIFORGE_E_ARG;
    default:
        return SCIFORGE_E_VALIDATION;
    }
}

// Runs the body, translating exceptions into error codes. Nothing may
// escape an extern-C boundary.
template <typename F>
int guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return SCIFORGE_OK;
    } catch (const sciforge::Error& e) {
        g_last_error = e.what();
        return code_for(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SCIFORGE_E_VALIDATION;
    } catch (...) {
        g_last_error = "unknown error";
        return SCIFORGE_E_VALIDATION;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int require(bool ok, const char* what) {
    if (ok) return SCIFORGE_OK;
    g_last_error = std::string(what) + " must not be null";
    return SCIFORGE_E_ARG;
}

std::string opt_path(const char* p) { return p ? p : ""; }

} // namespace

extern "C" {

const char* sciforge_version(void) { return "0.1.0"; }

const char* sciforge_last_error(void) { return g_last_error.c_str(); }

void sciforge_string_free(char* s) { std::free(s); }

/* ------------------------------------------------------------------ */

sciforge_config* sciforge_config_create(void) {
    try {
        return new sciforge_config{};
    } catch (...) {
        return nullptr;
    }
}

void sciforge_config_destroy(sciforge_config* cfg) { delete cfg; }

int sciforge_config_load_file(sciforge_config* cfg, const char* path) {
    if (int rc = require(cfg && path, "config and path")) return rc;
    return guarded([&] { cfg->impl.load_file(path); });
}

int sciforge_config_load_env(sciforge_config* cfg) {
    if (int rc = require(cfg != nullptr, "config")) return rc;
    return guarded([&] { cfg->impl.load_env(); });
}

int sciforge_config_set(sciforge_config* cfg, const char* key, const char* value) {
    if (int rc = require(cfg && key && value, "config, key and value")) return rc;
    return guarded([&] { cfg->impl.set(key, value); });
}

int sciforge_config_get(const sciforge_config* cfg, const char* key, char** value_out) {
    if (int rc = require(cfg && key && value_out, "config, key and value_out")) return rc;
    return guarded([&] { *value_out = dup_string(cfg->impl.get(key)); });
}

/* ------------------------------------------------------------------ */

int sciforge_ingest(sciforge_config* cfg, const char* input_path, const char* clean_out,
                    const char* quarantine_out, char** report_out) {
    if (int rc = require(cfg && input_path && report_out, "config, input_path and report_out"))
        return rc;
    return guarded([&] {
        auto report = sciforge::run_ingest(cfg->impl, input_path, opt_path(clean_out),
                                           opt_path(quarantine_out));
        *report_out = dup_string(report.dump(2));
    });
}

int sciforge_annotate(sciforge_config* cfg, const char* questions_path, const char* solutions_out,
                      const char* checkpoint_path, char** report_out) {
    if (int rc =
            require(cfg && questions_path && report_out, "config, questions_path and report_out"))
        return rc;
    return guarded([&] {
        auto report = sciforge::run_annotate(cfg->impl, questions_path, opt_path(solutions_out),
                                             opt_path(checkpoint_path));
        *report_out = dup_string(report.dump(2));
    });
}

int sciforge_label(sciforge_config* cfg, const char* questions_path, const char* solutions_path,
                   const char* verdicts_out, char** report_out) {
    if (int rc = require(cfg && questions_path && solutions_path && report_out,
                         "config, questions_path, solutions_path and report_out"))
        return rc;
    return guarded([&] {
        auto report = sciforge::run_label(cfg->impl, questions_path, solutions_path,
                                          opt_path(verdicts_out));
        *report_out = dup_string(report.dump(2));
    });
}

int sciforge_train_filter(sciforge_config* cfg, const char* positives_path,
                          const char* negatives_path, const char* model_out, char** report_out) {
    if (int rc = require(cfg && positives_path && negatives_path && report_out,
                         "config, positives_path, negatives_path and report_out"))
        return rc;
    return guarded([&] {
        auto report = sciforge::run_train_filter(cfg->impl, positives_path, negatives_path,
                                                 opt_path(model_out));
        *report_out = dup_string(report.dump(2));
    });
}

int sciforge_score(sciforge_config* cfg, const char* model_path, const char* dataset_path,
                   double drop_fraction, const char* kept_out, const char* dropped_out,
                   char** report_out) {
    if (int rc = require(cfg && model_path && dataset_path && report_out,
                         "config, model_path, dataset_path and report_out"))
        return rc;
    return guarded([&] {
        auto report = sciforge::run_score(cfg->impl, model_path, dataset_path, drop_fraction,
                                          opt_path(kept_out), opt_path(dropped_out));
        *report_out = dup_string(report.dump(2));
    });
}

int sciforge_assemble(sciforge_config* cfg, const char* questions_path,
                      const char* solutions_path, const char* dataset_out, const char* stats_out,
                      char** report_out) {
    if (int rc =
            require(cfg && questions_path && report_out, "config, questions_path and report_out"))
        return rc;
    return guarded([&] {
        auto report = sciforge::run_assemble(cfg->impl, questions_path, opt_path(solutions_path),
                                             opt_path(dataset_out), opt_path(stats_out));
        *report_out = dup_string(report.dump(2));
    });
}

int sciforge_stats(sciforge_config* cfg, const char* dataset_path, char** stats_json_out,
                   char** stats_table_out) {
    if (int rc = require(cfg && dataset_path && stats_json_out,
                         "config, dataset_path and stats_json_out"))
        return rc;
    return guarded([&] {
        auto [stats, table] = sciforge::run_stats(cfg->impl, dataset_path);
        *stats_json_out = dup_string(stats.dump(2));
        if (stats_table_out) *stats_table_out = dup_string(table);
    });
}

int sciforge_eval(sciforge_config* cfg, const char* items_path, const char* responses_path,
                  const char* groups_path, char** report_json_out, char** report_table_out) {
    if (int rc = require(cfg && items_path && responses_path && report_json_out,
                         "config, items_path, responses_path and report_json_out"))
        return rc;
    return guarded([&] {
        auto [report, table] =
            sciforge::run_eval(cfg->impl, items_path, responses_path, opt_path(groups_path));
        *report_json_out = dup_string(report.dump(2));
        if (report_table_out) *report_table_out = dup_string(table);
    });
}

int sciforge_emit_train_config(sciforge_config* cfg, const char* out_path, char** report_out) {
    if (int rc = require(cfg && report_out, "config and report_out")) return rc;
    return guarded([&] {
        auto report = sciforge::emit_training_config(cfg->impl, opt_path(out_path));
        *report_out = dup_string(report.dump(2));
    });
}

/* ------------------------------------------------------------------ */

int sciforge_classifier_train(sciforge_config* cfg, const char* positives_path,
                              const char* negatives_path, sciforge_classifier** clf_out) {
    if (int rc = require(cfg && positives_path && negatives_path && clf_out,
                         "config, example paths and clf_out"))
        return rc;
    return guarded([&] {
        // Route through the pipeline step so handle training and CLI
        // training behave identically, then reload the persisted model.
        std::string tmp =
            std::string(positives_path) + ".clf." + std::to_string(::getpid()) + ".tmp";
        sciforge::run_train_filter(cfg->impl, positives_path, negatives_path, tmp);
        auto clf = sciforge::QualityClassifier::load_file(tmp);
        std::remove(tmp.c_str());
        *clf_out = new sciforge_classifier{std::move(clf)};
    });
}

int sciforge_classifier_load(const char* path, sciforge_classifier** clf_out) {
    if (int rc = require(path && clf_out, "path and clf_out")) return rc;
    return guarded(
        [&] { *clf_out = new sciforge_classifier{sciforge::QualityClassifier::load_file(path)}; });
}

int sciforge_classifier_save(const sciforge_classifier* clf, const char* path) {
    if (int rc = require(clf && path, "classifier and path")) return rc;
    return guarded([&] { clf->impl.save_file(path); });
}

int sciforge_classifier_score(sciforge_config* cfg, const sciforge_classifier* clf,
                              const char* text, double* score_out) {
    if (int rc = require(cfg && clf && text && score_out, "config, classifier, text and score_out"))
        return rc;
    return guarded([&] {
        sciforge::HashedNgramProvider provider(
            clf->impl.dim(), clf->impl.seed());
        if (provider.id() != clf->impl.provider_id())
            throw sciforge::Error(sciforge::Errc::ProviderError,
                                  "model was trained with provider \"" + clf->impl.provider_id() +
                                      "\", which this build cannot reconstruct locally");
        *score_out = clf->impl.score_text(provider, text);
    });
}

void sciforge_classifier_destroy(sciforge_classifier* clf) { delete clf; }

} // extern "C"
