#include "sciforge/annotator.hpp"

#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "sciforge/assembler.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

// ---------------------------------------------------------------------------
// Response parsing

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// "Step 3:", "Step3.", "  Step 12" — returns the text after the marker.
std::optional<std::string> match_step_marker(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && is_space(line[i])) ++i;
    if (line.compare(i, 4, "Step") != 0) return std::nullopt;
    i += 4;
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t digits = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == digits) return std::nullopt;
    while (i < line.size() && is_space(line[i])) ++i;
    if (i < line.size() && (line[i] == ':' || line[i] == '.')) ++i;
    while (i < line.size() && is_space(line[i])) ++i;
    return line.substr(i);
}

} // namespace

CotSolution parse_cot(const std::string& text) {
    if (util::trim(text).empty())
        throw Error(Errc::EmptyInput, "cannot parse an empty response");

    CotSolution sol;
    sol.final_answer = extract_final_answer(text);

    CueMatch cue = find_answer_cue(text);
    std::string region = cue.found ? text.substr(0, cue.pos) : text;

    std::string current_step;
    bool in_step = false, in_analysis = false;
    auto flush_step = [&]() {
        if (!in_step) return;
        std::string s = util::trim(current_step);
        if (!s.empty()) sol.steps.push_back(std::move(s));
        current_step.clear();
    };

    for (const auto& line : util::split_lines(region)) {
        if (auto rest = match_step_marker(line)) {
            flush_step();
            in_step = true;
            in_analysis = false;
            current_step = *rest;
            continue;
        }
        std::string t = util::trim(line);
        if (!in_step && !in_analysis && t.rfind("Analysis:", 0) == 0) {
            in_analysis = true;
            sol.analysis = util::trim(t.substr(9));
            continue;
        }
        if (in_analysis) {
            if (!t.empty()) {
                if (!sol.analysis.empty()) sol.analysis += ' ';
                sol.analysis += t;
            }
            continue;
        }
        if (in_step) {
            current_step += '\n';
            current_step += line;
        }
        // Anything before the first marker is preamble and is dropped.
    }
    flush_step();

    if (sol.steps.empty()) {
        // Free-form response: salvage it as a single step.
        if (!sol.analysis.empty()) {
            sol.steps.push_back(sol.analysis);
            sol.analysis.clear();
        } else {
            std::string body = util::trim(region);
            sol.steps.push_back(body.empty() ? util::trim(text) : body);
        }
    }
    return sol;
}

LabelOutcome parse_label_response(const std::string& text) {
    std::string low = util::lower(text);

    // Words are maximal alnum runs; the last "correct"/"incorrect" decides.
    std::optional<Label> label;
    std::size_t i = 0;
    while (i < low.size()) {
        if (!std::isalnum(static_cast<unsigned char>(low[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < low.size() && std::isalnum(static_cast<unsigned char>(low[i]))) ++i;
        std::string_view word(low.data() + start, i - start);
        if (word == "correct") label = Label::Correct;
        else if (word == "incorrect") label = Label::Incorrect;
    }
    if (!label)
        throw Error(Errc::UnparseableLabel, "no correct/incorrect verdict in reply: " + text);

    LabelOutcome out;
    out.label = *label;
    if (out.label == Label::Incorrect) {
        // Earliest error-type keyword names the category.
        struct Keyword {
            const char* word;
            ErrorCategory category;
        };
        static const Keyword kKeywords[] = {
            {"calculation", ErrorCategory::Calculation},
            {"comprehension", ErrorCategory::Comprehension},
            {"comprehensive", ErrorCategory::Comprehension},
            {"reasoning", ErrorCategory::FalseReasoning},
            {"other", ErrorCategory::Other},
        };
        std::size_t best = std::string::npos;
        for (const auto& k : kKeywords) {
            std::size_t pos = low.find(k.word);
            if (pos != std::string::npos && pos < best) {
                best = pos;
                out.category = k.category;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model judge

namespace {
ChatRequest make_request(const RequestDefaults& defaults, std::string prompt) {
    ChatRequest req;
    req.model = defaults.model;
    req.temperature = defaults.temperature;
    req.max_tokens = defaults.max_tokens;
    req.messages.push_back({"user", std::move(prompt)});
    return req;
}
} // namespace

JudgeVerdict llm_label(Gateway& gateway, const QuestionRecord& question,
                       const CotSolution& solution, const PromptTemplates& templates,
                       const RequestDefaults& defaults) {
    std::string prompt = build_label_prompt(
        question, solution, question.reference_answer.value_or(std::string()), templates);
    ChatResponse resp = gateway.complete(make_request(defaults, std::move(prompt)));
    LabelOutcome outcome = parse_label_response(resp.content);
    JudgeVerdict v;
    v.question_id = question.id;
    v.label = outcome.label;
    v.judge = JudgeTier::Model;
    if (outcome.label == Label::Incorrect) v.error_category = outcome.category;
    return v;
}

JudgeVerdict judge_solution(Gateway* gateway, const QuestionRecord& question,
                            const CotSolution& solution, const PromptTemplates& templates,
                            const RequestDefaults& defaults, const JudgeSettings& judging) {
    if (question.reference_answer) {
        JudgeVerdict v =
            rule_check(solution.final_answer, *question.reference_answer, judging.rule_opts);
        v.question_id = question.id;
        if (v.label == Label::Correct) return v;
        if (!judging.llm_escalation || !gateway) return v;
        if (!needs_escalation(solution.final_answer, *question.reference_answer,
                              judging.rule_opts))
            return v;
    } else if (!gateway || !judging.llm_escalation) {
        throw Error(Errc::MissingReferenceAnswer,
                    "record " + question.id + " has no reference answer and the model judge "
                    "is unavailable");
    }

    try {
        return llm_label(*gateway, question, solution, templates, defaults);
    } catch (const Error& e) {
        if (e.code() != Errc::UnparseableLabel) throw;
        JudgeVerdict v;
        v.question_id = question.id;
        v.label = Label::Incorrect;
        v.judge = JudgeTier::Model;
        return v;
    }
}

// ---------------------------------------------------------------------------
// Funnel

namespace {

struct RecordOutcome {
    enum class Kind { Skipped, Preexisting, Funnel, LabelOnly, Abandoned };
    Kind kind = Kind::Skipped;
    std::optional<CotSolution> solution;
    Stage stage_reached = Stage::Stage1;
    Label last_verdict = Label::Incorrect;
    bool emitted = false;
    bool restored = false;
};

bool has_carried_solution(const QuestionRecord& r) {
    return r.reference_solution && !util::trim(*r.reference_solution).empty();
}

json checkpoint_line(const std::string& id, const RecordOutcome& o) {
    json j{{"question_id", id},
           {"stage_reached", stage_name(o.stage_reached)},
           {"last_verdict", label_name(o.last_verdict)},
           {"emitted", o.emitted}};
    if (o.emitted && o.solution) j["solution"] = *o.solution;
    return j;
}

struct CheckpointEntry {
    Stage stage_reached = Stage::Stage1;
    Label last_verdict = Label::Incorrect;
    bool emitted = false;
    std::optional<CotSolution> solution;
};

std::unordered_map<std::string, CheckpointEntry> load_checkpoint(const std::string& path) {
    std::unordered_map<std::string, CheckpointEntry> entries;
    if (path.empty() || !util::file_exists(path)) return entries;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        try {
            json j = json::parse(line);
            CheckpointEntry e;
            e.stage_reached = stage_from_name(j.at("stage_reached").get<std::string>());
            e.last_verdict = j.at("last_verdict").get<std::string>() == "correct"
                                 ? Label::Correct
                                 : Label::Incorrect;
            e.emitted = j.at("emitted").get<bool>();
            if (j.contains("solution")) e.solution = j.at("solution").get<CotSolution>();
            entries[j.at("question_id").get<std::string>()] = std::move(e); // last line wins
        } catch (const std::exception& e) {
            throw Error(Errc::IoError, "bad checkpoint line " + std::to_string(line_no) + " in " +
                                           path + ": " + e.what());
        }
    }
    return entries;
}

} // namespace

AnnotateResult run_funnel(const std::vector<QuestionRecord>& records, Gateway& gateway,
                          const FunnelSettings& settings) {
    const auto resume = load_checkpoint(settings.checkpoint_path);
    std::vector<RecordOutcome> outcomes(records.size());

    std::ofstream checkpoint_out;
    std::mutex checkpoint_mu;
    if (!settings.checkpoint_path.empty()) {
        checkpoint_out.open(settings.checkpoint_path, std::ios::app);
        if (!checkpoint_out)
            throw Error(Errc::IoError, "cannot open checkpoint " + settings.checkpoint_path);
    }
    auto append_checkpoint = [&](const std::string& id, const RecordOutcome& o) {
        if (!checkpoint_out.is_open()) return;
        std::lock_guard<std::mutex> lock(checkpoint_mu);
        checkpoint_out << checkpoint_line(id, o).dump() << '\n';
        checkpoint_out.flush();
    };

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mu;

    // One stage attempt: sample up to n_candidates; the first correct one
    // wins, otherwise the first sample becomes the prior for the next stage.
    auto attempt_stage = [&](const QuestionRecord& rec, Stage stage, const CotSolution* prior,
                             const JudgeVerdict* prior_verdict) {
        std::pair<CotSolution, JudgeVerdict> first;
        bool have_first = false;
        int n = std::max(1, settings.n_candidates);
        for (int c = 0; c < n; ++c) {
            std::string prompt =
                build_prompt(stage, rec, prior, prior_verdict, settings.templates);
            ChatResponse resp = gateway.complete(make_request(settings.request, std::move(prompt)));
            CotSolution sol;
            try {
                sol = parse_cot(resp.content);
            } catch (const Error& e) {
                if (e.code() != Errc::EmptyInput) throw;
                sol.steps.push_back("(no usable response)");
            }
            sol.question_id = rec.id;
            sol.stage = stage;
            sol.producer = "model";
            JudgeVerdict v = judge_solution(&gateway, rec, sol, settings.templates,
                                            settings.request, settings.judging);
            if (v.label == Label::Correct) return std::make_pair(std::move(sol), std::move(v));
            if (!have_first) {
                first = {std::move(sol), std::move(v)};
                have_first = true;
            }
        }
        return first;
    };

    auto process_record = [&](std::size_t i) {
        const QuestionRecord& rec = records[i];
        RecordOutcome& out = outcomes[i];

        if (rec.subject == Subject::Lean) return; // proofs skip annotation entirely

        if (has_carried_solution(rec)) {
            CotSolution sol = parse_cot(*rec.reference_solution);
            sol.question_id = rec.id;
            sol.stage = Stage::Preexisting;
            sol.producer = "human";
            out.kind = RecordOutcome::Kind::Preexisting;
            out.solution = std::move(sol);
            out.emitted = true;
            return;
        }

        const bool funnel_eligible = rec.reference_answer.has_value();

        // Resumed terminal records are restored without touching the gateway.
        if (auto it = resume.find(rec.id); it != resume.end()) {
            const CheckpointEntry& e = it->second;
            bool terminal = e.emitted || (funnel_eligible && e.stage_reached == Stage::Stage3) ||
                            (!funnel_eligible && e.stage_reached == Stage::Stage1);
            bool usable = !e.emitted || e.solution.has_value();
            if (terminal && usable) {
                out.kind =
                    funnel_eligible ? RecordOutcome::Kind::Funnel : RecordOutcome::Kind::LabelOnly;
                out.solution = e.solution;
                out.stage_reached = e.stage_reached;
                out.last_verdict = e.last_verdict;
                out.emitted = e.emitted;
                out.restored = true;
                return;
            }
        }

        if (funnel_eligible) {
            out.kind = RecordOutcome::Kind::Funnel;
            CotSolution prior;
            JudgeVerdict prior_verdict;
            for (Stage stage : {Stage::Stage1, Stage::Stage2, Stage::Stage3}) {
                auto [sol, verdict] =
                    attempt_stage(rec, stage,
                                  stage == Stage::Stage1 ? nullptr : &prior,
                                  stage == Stage::Stage1 ? nullptr : &prior_verdict);
                out.stage_reached = stage;
                out.last_verdict = verdict.label;
                if (verdict.label == Label::Correct) {
                    out.solution = std::move(sol);
                    out.emitted = true;
                    break;
                }
                prior = std::move(sol);
                prior_verdict = std::move(verdict);
            }
        } else {
            // No reference answer: one attempt, graded by the model judge.
            out.kind = RecordOutcome::Kind::LabelOnly;
            auto [sol, verdict] = attempt_stage(rec, Stage::Stage1, nullptr, nullptr);
            out.stage_reached = Stage::Stage1;
            out.last_verdict = verdict.label;
            if (verdict.label == Label::Correct) {
                out.solution = std::move(sol);
                out.emitted = true;
            }
        }
        append_checkpoint(rec.id, out);
    };

    auto worker = [&]() {
        while (!stop.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            try {
                process_record(i);
            } catch (const Error& e) {
                if (e.is_transport()) {
                    outcomes[i] = RecordOutcome{};
                    outcomes[i].kind = RecordOutcome::Kind::Abandoned;
                    continue;
                }
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                stop.store(true);
                return;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                stop.store(true);
                return;
            }
        }
    };

    std::size_t n_workers = std::min<std::size_t>(std::max<std::size_t>(settings.max_in_flight, 1),
                                                  records.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Aggregate serially so the report is assembled in one deterministic pass.
    AnnotateResult result;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const RecordOutcome& o = outcomes[i];
        switch (o.kind) {
        case RecordOutcome::Kind::Skipped:
            if (records[i].subject == Subject::Lean) ++result.lean_skipped;
            break;
        case RecordOutcome::Kind::Abandoned:
            ++result.gateway_failures;
            break;
        case RecordOutcome::Kind::Preexisting:
            ++result.preexisting;
            break;
        case RecordOutcome::Kind::LabelOnly:
            ++result.label_only_input;
            if (o.emitted) ++result.label_only_emitted;
            if (o.restored) ++result.resumed;
            break;
        case RecordOutcome::Kind::Funnel: {
            FunnelReport& r = result.report;
            ++r.input;
            if (o.emitted && o.stage_reached == Stage::Stage1) {
                ++r.stage1_correct;
            } else {
                ++r.stage1_incorrect;
                if (o.emitted && o.stage_reached == Stage::Stage2) {
                    ++r.stage2_correct;
                } else {
                    ++r.stage2_incorrect;
                    if (o.emitted) ++r.stage3_correct;
                    else ++r.unresolved;
                }
            }
            if (o.restored) ++result.resumed;
            break;
        }
        }
        if (o.solution) result.solutions.push_back(*o.solution);
    }

    // Compact the checkpoint: one line per terminal record, input order, so
    // two runs over the same inputs leave byte-identical files.
    if (!settings.checkpoint_path.empty()) {
        checkpoint_out.close();
        std::string compact;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const RecordOutcome& o = outcomes[i];
            if (o.kind != RecordOutcome::Kind::Funnel && o.kind != RecordOutcome::Kind::LabelOnly)
                continue;
            compact += checkpoint_line(records[i].id, o).dump();
            compact += '\n';
        }
        util::atomic_write_file(settings.checkpoint_path, compact);
    }
    return result;
}

} // namespace sciforge
