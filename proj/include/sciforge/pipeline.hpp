#pragma once

#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

#include "sciforge/config.hpp"
#include "sciforge/gateway.hpp"
#include "sciforge/prompts.hpp"

namespace sciforge {

// One function per pipeline step. Each reads its inputs, does the work,
// writes every output atomically, and returns a JSON report of what
// happened. Paths given as empty strings suppress the matching output.

nlohmann::json run_ingest(const PipelineConfig& config, const std::string& input_path,
                          const std::string& clean_out, const std::string& quarantine_out);

nlohmann::json run_annotate(const PipelineConfig& config, const std::string& questions_path,
                            const std::string& solutions_out,
                            const std::string& checkpoint_path);

nlohmann::json run_label(const PipelineConfig& config, const std::string& questions_path,
                         const std::string& solutions_path, const std::string& verdicts_out);

nlohmann::json run_train_filter(const PipelineConfig& config, const std::string& positives_path,
                                const std::string& negatives_path, const std::string& model_out);

// drop_fraction < 0 defers to the filter.drop_fraction config key.
nlohmann::json run_score(const PipelineConfig& config, const std::string& model_path,
                         const std::string& dataset_path, double drop_fraction,
                         const std::string& kept_out, const std::string& dropped_out);

nlohmann::json run_assemble(const PipelineConfig& config, const std::string& questions_path,
                            const std::string& solutions_path, const std::string& dataset_out,
                            const std::string& stats_out);

// Returns {stats json, rendered table}.
std::pair<nlohmann::json, std::string> run_stats(const PipelineConfig& config,
                                                 const std::string& dataset_path);

// Returns {report json, rendered table}.
std::pair<nlohmann::json, std::string> run_eval(const PipelineConfig& config,
                                                const std::string& items_path,
                                                const std::string& responses_path,
                                                const std::string& groups_path);

// Writes (and returns) the downstream fine-tuning recipe derived from the
// train.* keys, with an "overrides" list naming the ones changed from
// their defaults.
nlohmann::json emit_training_config(const PipelineConfig& config, const std::string& out_path);

// Shared wiring, exposed for tests: backend/gateway construction honoring
// gateway.* keys (the API key comes only from SCIFORGE_API_KEY), and prompt
// templates with prompts.* file overrides applied.
std::shared_ptr<Backend> make_backend(const PipelineConfig& config);
std::unique_ptr<Gateway> make_gateway(const PipelineConfig& config,
                                      std::shared_ptr<Clock> clock = nullptr);
PromptTemplates load_templates(const PipelineConfig& config);

} // namespace sciforge
