#include "sciforge/prompts.hpp"

#include <array>

#include "sciforge/assembler.hpp"
#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

namespace {

const char* kStage1Template = R"(Solve the following problem step by step.

{question}

Write your solution in exactly this format:
Analysis: This question examines *** knowledge points.
Step 1: ***
Step 2: ***
Step n: ***
To sum up, the answer to this question is ***.)";

const char* kStage2Template = R"(Your previous attempt at this problem was judged incorrect. Read the problem again, reflect on the verdict, and produce a corrected solution.

{question}

Previous attempt:
{previous_solution}

Verdict on the previous attempt: {verdict}

Write the corrected solution in exactly this format:
Analysis: This question examines *** knowledge points.
Step 1: ***
Step 2: ***
Step n: ***
To sum up, the answer to this question is ***.)";

const char* kStage3Template = R"(Your previous attempt at this problem was judged incorrect. The correct final answer is {real_answer}. Work out the reasoning that arrives at this answer; do not just restate it.

{question}

Previous attempt:
{previous_solution}

Verdict on the previous attempt: {verdict}

Write the corrected solution in exactly this format:
Analysis: This question examines *** knowledge points.
Step 1: ***
Step 2: ***
Step n: ***
To sum up, the answer to this question is ***.)";

const char* kLabelerTemplate = R"(You are checking a worked solution against the known correct answer.

Problem:
{question}

Worked solution:
{solution}

Known correct answer: {real_answer}

Decide whether the solution's final answer agrees with the known correct answer. If it does not, name the main error type: comprehension, calculation, false reasoning, or other.
Reply with a short justification, then finish with a single word on the last line: Correct or Incorrect.)";

const std::array<const char*, 5> kKnownSlots = {"question", "previous_solution", "verdict",
                                                "real_answer", "solution"};

} // namespace

PromptTemplates PromptTemplates::defaults() {
    return {kStage1Template, kStage2Template, kStage3Template, kLabelerTemplate};
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots) {
    std::string out = tmpl;
    for (const auto& [name, value] : slots) out = util::replace_all(out, "{" + name + "}", value);
    for (const char* slot : kKnownSlots) {
        std::string marker = std::string("{") + slot + "}";
        if (out.find(marker) != std::string::npos)
            throw Error(Errc::ConfigError,
                        "template placeholder " + marker + " has no value in this context");
    }
    return out;
}

std::string render_verdict(const JudgeVerdict& verdict) {
    std::string out = label_name(verdict.label);
    if (verdict.label == Label::Incorrect && verdict.error_category) {
        switch (*verdict.error_category) {
        case ErrorCategory::Comprehension: out += " (comprehension)"; break;
        case ErrorCategory::Calculation: out += " (calculation)"; break;
        case ErrorCategory::FalseReasoning: out += " (false reasoning)"; break;
        case ErrorCategory::Other: out += " (other)"; break;
        }
    }
    return out;
}

std::string build_prompt(Stage stage, const QuestionRecord& question, const CotSolution* prior,
                         const JudgeVerdict* prior_verdict, const PromptTemplates& templates) {
    std::map<std::string, std::string> slots{{"question", question.body}};

    switch (stage) {
    case Stage::Stage1:
        return render_template(templates.stage1, slots);

    case Stage::Stage3:
        if (!question.reference_answer)
            throw Error(Errc::MissingReferenceAnswer,
                        "stage3 prompt needs a reference answer for " + question.id);
        [[fallthrough]];
    case Stage::Stage2: {
        if (!prior || !prior_verdict || prior_verdict->label != Label::Incorrect)
            throw Error(Errc::MissingPrior,
                        std::string(stage_name(stage)) +
                            " prompt needs a prior attempt judged incorrect");
        slots["previous_solution"] = format_instruction(*prior);
        slots["verdict"] = render_verdict(*prior_verdict);
        if (stage == Stage::Stage3) {
            slots["real_answer"] = *question.reference_answer;
            return render_template(templates.stage3, slots);
        }
        return render_template(templates.stage2, slots);
    }

    case Stage::Preexisting:
        break;
    }
    throw Error(Errc::InvalidArgument, "no prompt is defined for this stage");
}

std::string build_label_prompt(const QuestionRecord& question, const CotSolution& solution,
                               const std::string& real_answer, const PromptTemplates& templates) {
    std::map<std::string, std::string> slots{
        {"question", question.body},
        {"solution", format_instruction(solution)},
        {"real_answer", real_answer.empty() ? "(not provided)" : real_answer}};
    return render_template(templates.labeler, slots);
}

} // namespace sciforge
