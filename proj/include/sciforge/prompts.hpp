#pragma once

#include <map>
#include <string>

#include "sciforge/types.hpp"

namespace sciforge {

// The four prompt texts the pipeline sends. Defaults are embedded; any of
// them can be overridden from a file. Placeholders use {name} syntax:
//   stage1:  {question}
//   stage2:  {question} {previous_solution} {verdict}
//   stage3:  {question} {previous_solution} {verdict} {real_answer}
//   labeler: {question} {solution} {real_answer}
struct PromptTemplates {
    std::string stage1;
    std::string stage2;
    std::string stage3;
    std::string labeler;

    static PromptTemplates defaults();
};

// Substitutes the given slots, then rejects any known placeholder left
// unfilled (a template asking for a slot its stage does not provide is a
// configuration mistake, not something to send to a model).
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots);

// "incorrect (calculation)" / "incorrect" / "correct"
std::string render_verdict(const JudgeVerdict& verdict);

// Builds the user prompt for one funnel pass. Stage2/Stage3 require a prior
// attempt judged incorrect (Error(MissingPrior) otherwise); Stage3
// additionally requires the record to carry a reference answer
// (Error(MissingReferenceAnswer)).
std::string build_prompt(Stage stage, const QuestionRecord& question, const CotSolution* prior,
                         const JudgeVerdict* prior_verdict, const PromptTemplates& templates);

// Builds the grading prompt for the model-judge tier. `real_answer` may be
// empty when the record has no reference answer; the slot then says so.
std::string build_label_prompt(const QuestionRecord& question, const CotSolution& solution,
                               const std::string& real_answer, const PromptTemplates& templates);

} // namespace sciforge
