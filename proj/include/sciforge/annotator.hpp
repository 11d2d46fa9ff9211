#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sciforge/gateway.hpp"
#include "sciforge/judge.hpp"
#include "sciforge/prompts.hpp"
#include "sciforge/types.hpp"

namespace sciforge {

// Parses a model response in the canonical instruction format back into its
// parts. Tolerant of formatting drift: step numbering is ignored (steps are
// renumbered on output), "Step1:" without a space parses, continuation
// lines attach to the step above, and a response with no step markers at
// all becomes a single step. Throws Error(EmptyInput) on blank text.
CotSolution parse_cot(const std::string& text);

struct LabelOutcome {
    Label label = Label::Incorrect;
    std::optional<ErrorCategory> category;
};

// Reads the grading out of a model-judge response: the last "correct" /
// "incorrect" word decides the label; for incorrect, the earliest error-type
// keyword (calculation, comprehension, reasoning, other) names the category.
// Throws Error(UnparseableLabel) when no label word appears; the raw
// response is carried in the message.
LabelOutcome parse_label_response(const std::string& text);

// Sampling parameters applied to every request the funnel issues.
struct RequestDefaults {
    std::string model = "default";
    double temperature = 0.7;
    int max_tokens = 2048;
};

// Asks the model judge to grade one solution. `question.reference_answer`
// fills the known-answer slot when present; otherwise the prompt says the
// answer is not provided and the judge must decide on its own.
JudgeVerdict llm_label(Gateway& gateway, const QuestionRecord& question,
                       const CotSolution& solution, const PromptTemplates& templates,
                       const RequestDefaults& defaults);

struct JudgeSettings {
    RuleCheckOptions rule_opts;
    bool llm_escalation = true;
};

// Two-tier judgment: the deterministic rule check runs first; a mismatch in
// which either side is symbolic is escalated to the model judge (when
// escalation is enabled and a gateway is available). An unparseable judge
// reply counts as incorrect rather than aborting the record.
JudgeVerdict judge_solution(Gateway* gateway, const QuestionRecord& question,
                            const CotSolution& solution, const PromptTemplates& templates,
                            const RequestDefaults& defaults, const JudgeSettings& judging);

struct FunnelSettings {
    RequestDefaults request;
    JudgeSettings judging;
    PromptTemplates templates = PromptTemplates::defaults();
    int n_candidates = 1;          // attempts sampled per stage
    std::size_t max_in_flight = 4; // records annotated concurrently
    std::string checkpoint_path;   // empty disables checkpointing
};

struct AnnotateResult {
    // Solutions for every record that produced one (funnel passes,
    // label-only passes, and preexisting pass-throughs), in input order.
    std::vector<CotSolution> solutions;

    // Funnel-eligible records only (reference answer, no carried solution).
    FunnelReport report;

    std::uint64_t preexisting = 0;         // carried solutions passed through
    std::uint64_t label_only_input = 0;    // no reference answer: one pass, model-judged
    std::uint64_t label_only_emitted = 0;
    std::uint64_t gateway_failures = 0;    // records abandoned on transport errors
    std::uint64_t resumed = 0;             // restored from the checkpoint file
    std::uint64_t lean_skipped = 0;        // formal proofs pass the funnel by
};

// Runs the three-pass annotation funnel:
//   pass 1: plain step-by-step attempt
//   pass 2: retry with the judged-incorrect attempt and its verdict shown
//   pass 3: retry that additionally reveals the reference answer
// A record leaves the funnel at its first correct verdict. Records carrying
// a solution are passed through untouched; records with no reference answer
// get a single model-judged attempt. Records that fail on transport are
// dropped from the report and counted separately — their terminal state is
// unknown, so they stay eligible for a resumed run.
AnnotateResult run_funnel(const std::vector<QuestionRecord>& records, Gateway& gateway,
                          const FunnelSettings& settings);

} // namespace sciforge
