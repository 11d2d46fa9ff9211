#include "sciforge/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include "sciforge/annotator.hpp"
#include "sciforge/assembler.hpp"
#include "sciforge/eval.hpp"
#include "sciforge/filter.hpp"
#include "sciforge/ingest.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

namespace {

// Serializes a sequence to JSONL and writes it in one atomic step.
template <typename Range>
void write_jsonl(const std::string& path, const Range& items) {
    if (path.empty()) return;
    std::string out;
    for (const auto& item : items) {
        out += json(item).dump();
        out += '\n';
    }
    util::atomic_write_file(path, out);
}

std::vector<json> read_jsonl(const std::string& path) {
    std::vector<json> lines;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        try {
            lines.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedLine,
                        path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what(),
                        static_cast<long long>(line_no));
        }
    }
    return lines;
}

template <typename T>
std::vector<T> read_jsonl_as(const std::string& path) {
    std::vector<T> items;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        try {
            items.push_back(json::parse(line).get<T>());
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(Errc::MalformedLine,
                        path + ":" + std::to_string(line_no) + ": " + e.what(),
                        static_cast<long long>(line_no));
        }
    }
    return items;
}

} // namespace

// ---------------------------------------------------------------------------
// Wiring

std::shared_ptr<Backend> make_backend(const PipelineConfig& config) {
    const std::string kind = config.get("gateway.backend");
    std::shared_ptr<Backend> backend;
    if (kind == "mock") {
        const std::string script = config.get("gateway.script");
        backend = std::make_shared<ScriptedBackend>(
            script.empty() ? nlohmann::json::object() : ScriptedBackend::load_script(script));
    } else if (kind == "replay") {
        const std::string cassette = config.get("gateway.cassette");
        if (cassette.empty())
            throw Error(Errc::ConfigError, "gateway.backend=replay needs gateway.cassette");
        backend = std::make_shared<ReplayBackend>(cassette);
    } else { // http
        const std::string endpoint = config.get("gateway.endpoint");
        if (endpoint.empty())
            throw Error(Errc::ConfigError, "gateway.backend=http needs gateway.endpoint");
        backend = std::make_shared<HttpBackend>(endpoint, config.get("gateway.model"),
                                                api_key_from_env());
    }
    const std::string record = config.get("gateway.record_cassette");
    if (!record.empty()) backend = std::make_shared<RecordingBackend>(backend, record);
    return backend;
}

std::unique_ptr<Gateway> make_gateway(const PipelineConfig& config,
                                      std::shared_ptr<Clock> clock) {
    GatewaySettings settings;
    settings.max_retries = static_cast<int>(config.get_int("gateway.max_retries"));
    settings.base_backoff_ms = config.get_int("gateway.base_backoff_ms");
    settings.requests_per_minute =
        static_cast<std::size_t>(config.get_int("gateway.requests_per_minute"));
    settings.max_in_flight = static_cast<std::size_t>(config.get_int("gateway.max_in_flight"));
    if (!clock) clock = std::make_shared<SystemClock>();
    return std::make_unique<Gateway>(make_backend(config), settings, std::move(clock));
}

PromptTemplates load_templates(const PipelineConfig& config) {
    PromptTemplates tpl = PromptTemplates::defaults();
    struct Slot {
        const char* key;
        std::string PromptTemplates::*member;
    };
    for (const auto& [key, member] : {Slot{"prompts.stage1", &PromptTemplates::stage1},
                                      Slot{"prompts.stage2", &PromptTemplates::stage2},
                                      Slot{"prompts.stage3", &PromptTemplates::stage3},
                                      Slot{"prompts.labeler", &PromptTemplates::labeler}}) {
        const std::string path = config.get(key);
        if (!path.empty()) tpl.*member = util::read_file(path);
    }
    return tpl;
}

namespace {

RequestDefaults request_defaults(const PipelineConfig& config) {
    RequestDefaults rd;
    rd.model = config.get("gateway.model");
    rd.temperature = config.get_double("gateway.temperature");
    rd.max_tokens = static_cast<int>(config.get_int("gateway.max_tokens"));
    return rd;
}

JudgeSettings judge_settings(const PipelineConfig& config) {
    JudgeSettings js;
    js.rule_opts.rel_tol = config.get_double("judge.rel_tol");
    js.rule_opts.abs_tol = config.get_double("judge.abs_tol");
    js.llm_escalation = config.get_bool("judge.llm_escalation");
    return js;
}

std::unique_ptr<EmbeddingProvider> make_provider(const PipelineConfig& config) {
    const auto dim = static_cast<std::size_t>(config.get_int("filter.dim"));
    if (config.get("filter.provider") == "remote") {
        const std::string endpoint = config.get("filter.endpoint");
        if (endpoint.empty())
            throw Error(Errc::ConfigError, "filter.provider=remote needs filter.endpoint");
        return std::make_unique<RemoteEmbeddingProvider>(endpoint, dim);
    }
    return std::make_unique<HashedNgramProvider>(
        dim, static_cast<std::uint64_t>(config.get_int("seed")));
}

// Text a filter example is embedded from: either {"text": ...} or an
// instruction entry's problem and answer.
std::string filter_text_from_json(const json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_object()) {
        if (j.contains("text")) return j.at("text").get<std::string>();
        if (j.contains("problem") && j.contains("answer"))
            return j.at("problem").get<std::string>() + "\n" + j.at("answer").get<std::string>();
    }
    throw Error(Errc::MalformedLine,
                where + ": expected {\"text\": ...} or an instruction entry");
}

std::vector<std::string> load_filter_texts(const std::string& path) {
    std::vector<std::string> texts;
    std::vector<json> lines = read_jsonl(path);
    for (std::size_t i = 0; i < lines.size(); ++i)
        texts.push_back(filter_text_from_json(lines[i], path + " entry " + std::to_string(i + 1)));
    return texts;
}

} // namespace

// ---------------------------------------------------------------------------
// Steps

nlohmann::json run_ingest(const PipelineConfig& config, const std::string& input_path,
                          const std::string& clean_out, const std::string& quarantine_out) {
    (void)config;
    std::vector<QuestionRecord> records = load_corpus(input_path);
    const std::uint64_t loaded = records.size();

    auto [unique, duplicates_dropped] = dedupe(std::move(records));
    QuarantineResult split = quarantine(unique);

    write_jsonl(clean_out, split.clean);

    if (!quarantine_out.empty()) {
        std::string out;
        for (const auto& q : split.quarantined) {
            json j = q.record;
            j["defects"] = q.defects;
            out += j.dump();
            out += '\n';
        }
        util::atomic_write_file(quarantine_out, out);
    }

    return nlohmann::json{{"loaded", loaded},
                          {"duplicates_dropped", duplicates_dropped},
                          {"quarantined", split.quarantined.size()},
                          {"clean", split.clean.size()}};
}

nlohmann::json run_annotate(const PipelineConfig& config, const std::string& questions_path,
                            const std::string& solutions_out,
                            const std::string& checkpoint_path) {
    std::vector<QuestionRecord> records = load_corpus(questions_path);

    FunnelSettings settings;
    settings.request = request_defaults(config);
    settings.judging = judge_settings(config);
    settings.templates = load_templates(config);
    settings.n_candidates = static_cast<int>(config.get_int("annotate.n_candidates"));
    settings.max_in_flight = static_cast<std::size_t>(config.get_int("gateway.max_in_flight"));
    settings.checkpoint_path =
        checkpoint_path.empty() ? config.get("annotate.checkpoint") : checkpoint_path;

    std::unique_ptr<Gateway> gateway = make_gateway(config);
    AnnotateResult result = run_funnel(records, *gateway, settings);

    // Partial transport failures are reported per record so the checkpointed
    // remainder can be retried, but a run in which no record got through the
    // gateway while at least one was abandoned made no progress — surface the
    // outage instead of claiming success. Records that need no gateway work
    // (formal-proof skips, carried solutions, checkpoint restores) don't
    // count as progress here.
    const std::uint64_t reached_terminal =
        result.report.input + result.label_only_input - result.resumed;
    if (result.gateway_failures > 0 && reached_terminal == 0)
        throw Error(Errc::TransportError,
                    "no progress: all " + std::to_string(result.gateway_failures) +
                        " gateway-dependent records failed with transport errors");

    write_jsonl(solutions_out, result.solutions);

    return nlohmann::json{
        {"funnel", result.report},
        {"preexisting", result.preexisting},
        {"label_only", {{"input", result.label_only_input}, {"emitted", result.label_only_emitted}}},
        {"gateway_failures", result.gateway_failures},
        {"resumed", result.resumed},
        {"lean_skipped", result.lean_skipped},
        {"solutions_written", result.solutions.size()},
        {"requests_attempted", gateway->attempts()}};
}

nlohmann::json run_label(const PipelineConfig& config, const std::string& questions_path,
                         const std::string& solutions_path, const std::string& verdicts_out) {
    std::vector<QuestionRecord> questions = load_corpus(questions_path);
    std::vector<CotSolution> solutions = read_jsonl_as<CotSolution>(solutions_path);

    std::unordered_map<std::string, const CotSolution*> by_id;
    for (const auto& s : solutions) by_id.emplace(s.question_id, &s);

    const JudgeSettings judging = judge_settings(config);
    const RequestDefaults defaults = request_defaults(config);
    const PromptTemplates templates = load_templates(config);
    std::unique_ptr<Gateway> gateway;
    if (judging.llm_escalation) gateway = make_gateway(config);

    std::vector<JudgeVerdict> verdicts;
    std::uint64_t correct = 0, escalated = 0, missing_solution = 0, skipped_no_reference = 0,
                  gateway_failures = 0;
    for (const auto& q : questions) {
        auto it = by_id.find(q.id);
        if (it == by_id.end()) {
            ++missing_solution;
            continue;
        }
        if (!q.reference_answer && !gateway) {
            ++skipped_no_reference;
            continue;
        }
        try {
            JudgeVerdict v =
                judge_solution(gateway.get(), q, *it->second, templates, defaults, judging);
            if (v.label == Label::Correct) ++correct;
            if (v.judge == JudgeTier::Model) ++escalated;
            verdicts.push_back(std::move(v));
        } catch (const Error& e) {
            if (!e.is_transport()) throw;
            ++gateway_failures;
        }
    }

    write_jsonl(verdicts_out, verdicts);

    return nlohmann::json{{"judged", verdicts.size()},
                          {"correct", correct},
                          {"incorrect", verdicts.size() - correct},
                          {"escalated", escalated},
                          {"missing_solution", missing_solution},
                          {"skipped_no_reference", skipped_no_reference},
                          {"gateway_failures", gateway_failures}};
}

nlohmann::json run_train_filter(const PipelineConfig& config, const std::string& positives_path,
                                const std::string& negatives_path,
                                const std::string& model_out) {
    std::vector<std::string> positives = load_filter_texts(positives_path);
    std::vector<std::string> negatives = load_filter_texts(negatives_path);

    TrainOptions options;
    options.epochs = static_cast<std::size_t>(config.get_int("filter.epochs"));
    options.learning_rate = config.get_double("filter.learning_rate");

    std::unique_ptr<EmbeddingProvider> provider = make_provider(config);
    QualityClassifier clf = QualityClassifier::train(*provider, positives, negatives, options);
    clf.set_seed(static_cast<std::uint64_t>(config.get_int("seed")));
    if (!model_out.empty()) clf.save_file(model_out);

    return nlohmann::json{{"positives", positives.size()},
                          {"negatives", negatives.size()},
                          {"dim", clf.dim()},
                          {"epochs", options.epochs},
                          {"final_loss", clf.loss_curve().empty() ? 0.0 : clf.loss_curve().back()},
                          {"provider_id", clf.provider_id()}};
}

nlohmann::json run_score(const PipelineConfig& config, const std::string& model_path,
                         const std::string& dataset_path, double drop_fraction,
                         const std::string& kept_out, const std::string& dropped_out) {
    QualityClassifier clf = QualityClassifier::load_file(model_path);
    std::unique_ptr<EmbeddingProvider> provider = make_provider(config);
    if (provider->id() != clf.provider_id())
        throw Error(Errc::ProviderError, "model was trained with provider \"" +
                                             clf.provider_id() + "\" but the configuration "
                                             "builds \"" + provider->id() + "\"");

    std::vector<InstructionEntry> entries = read_jsonl_as<InstructionEntry>(dataset_path);
    if (drop_fraction < 0.0) drop_fraction = config.get_double("filter.drop_fraction");

    std::vector<double> scores;
    scores.reserve(entries.size());
    for (auto& e : entries) {
        double s = clf.score_text(*provider, e.problem + "\n" + e.answer);
        e.provenance.quality = s;
        scores.push_back(s);
    }

    PruneResult pruned = prune_lowest(scores, drop_fraction);

    std::vector<InstructionEntry> kept, dropped;
    kept.reserve(pruned.kept.size());
    dropped.reserve(pruned.dropped.size());
    for (std::size_t i : pruned.kept) kept.push_back(entries[i]);
    for (std::size_t i : pruned.dropped) dropped.push_back(entries[i]);
    write_jsonl(kept_out, kept);
    write_jsonl(dropped_out, dropped);

    double min_s = 0.0, max_s = 0.0, sum = 0.0;
    if (!scores.empty()) {
        min_s = *std::min_element(scores.begin(), scores.end());
        max_s = *std::max_element(scores.begin(), scores.end());
        for (double s : scores) sum += s;
    }
    return nlohmann::json{
        {"scored", entries.size()},
        {"kept", kept.size()},
        {"dropped", dropped.size()},
        {"drop_fraction", drop_fraction},
        {"min_score", min_s},
        {"max_score", max_s},
        {"mean_score", scores.empty() ? 0.0 : sum / static_cast<double>(scores.size())}};
}

nlohmann::json run_assemble(const PipelineConfig& config, const std::string& questions_path,
                            const std::string& solutions_path, const std::string& dataset_out,
                            const std::string& stats_out) {
    (void)config;
    std::vector<QuestionRecord> questions = load_corpus(questions_path);
    std::vector<CotSolution> solutions =
        solutions_path.empty() ? std::vector<CotSolution>{}
                               : read_jsonl_as<CotSolution>(solutions_path);

    AssembleResult result = assemble(questions, solutions);
    write_jsonl(dataset_out, result.entries);
    if (!stats_out.empty())
        util::atomic_write_file(stats_out, json(result.stats).dump(2) + "\n");

    return nlohmann::json{{"written", result.entries.size()}, {"stats", result.stats}};
}

std::pair<nlohmann::json, std::string> run_stats(const PipelineConfig& config,
                                                 const std::string& dataset_path) {
    (void)config;
    DatasetStats stats;
    for (const auto& e : read_jsonl_as<InstructionEntry>(dataset_path)) {
        switch (e.subject) {
        case Subject::Math: ++stats.math; break;
        case Subject::Physics: ++stats.physics; break;
        case Subject::Chemistry: ++stats.chemistry; break;
        case Subject::Lean: ++stats.lean; break;
        }
    }
    return {json(stats), format_stats_table(stats)};
}

std::pair<nlohmann::json, std::string> run_eval(const PipelineConfig& config,
                                                const std::string& items_path,
                                                const std::string& responses_path,
                                                const std::string& groups_path) {
    std::vector<EvalItem> items = read_jsonl_as<EvalItem>(items_path);

    std::map<std::string, std::string> responses;
    for (const auto& j : read_jsonl(responses_path))
        responses[j.at("id").get<std::string>()] = j.at("response").get<std::string>();

    std::map<std::string, std::vector<std::string>> groups;
    if (!groups_path.empty()) {
        try {
            json g = json::parse(util::read_file(groups_path));
            groups = g.get<std::map<std::string, std::vector<std::string>>>();
        } catch (const json::exception& e) {
            throw Error(Errc::ConfigError, "bad groups file " + groups_path + ": " + e.what());
        }
    }

    JudgeSettings judging = judge_settings(config);
    EvalReport report = evaluate(items, responses, groups, judging.rule_opts);
    return {report.to_json(), report.format_table()};
}

nlohmann::json emit_training_config(const PipelineConfig& config, const std::string& out_path) {
    std::vector<std::string> overrides;
    for (const auto& key : config.keys())
        if (key.rfind("train.", 0) == 0 && !config.is_default(key)) overrides.push_back(key);

    nlohmann::json recipe{{"learning_rate", config.get_double("train.learning_rate")},
                          {"scheduler", config.get("train.scheduler")},
                          {"epochs", config.get_int("train.epochs")},
                          {"format", config.get("train.format")},
                          {"overrides", overrides}};
    if (!out_path.empty()) util::atomic_write_file(out_path, recipe.dump(2) + "\n");
    return recipe;
}

} // namespace sciforge
