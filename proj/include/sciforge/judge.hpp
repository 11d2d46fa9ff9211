#pragma once

#include <string>

#include "sciforge/types.hpp"

namespace sciforge {

// Location of the last closing cue ("To sum up, the answer to this question
// is", "To sum up, the answer is", "Final answer:", "In summary,") in a
// response, if any. Shared by answer extraction and response parsing.
struct CueMatch {
    bool found = false;
    std::size_t pos = 0;
    std::size_t len = 0;
};
CueMatch find_answer_cue(const std::string& text);

// Pulls the final answer out of a model response: the trimmed remainder
// after the last closing cue (an optional colon right after the cue is
// skipped), which may span lines. With no cue present, returns the last
// nonempty line. Throws Error(EmptyInput) when the text trims to nothing.
// The result is always a contiguous substring of the input.
std::string extract_final_answer(const std::string& text);

// Reduces an answer string to a comparable form: strips math delimiters,
// \text/\mathrm wrappers and spacing macros, then classifies as a number
// (with optional unit token), a multiple-choice letter A-D, or a leftover
// symbolic expression.
Answer normalize_answer(const std::string& raw);

struct RuleCheckOptions {
    double rel_tol = 1e-4;
    double abs_tol = 1e-9;
};

// Deterministic first-tier check of a candidate answer against the
// reference. Numeric answers match within max(abs_tol, rel_tol*|reference|)
// and must agree on the unit when both sides carry one. Choice answers match
// by letter; symbolic answers by whitespace-collapsed exact text. Mixed-kind
// pairs never match. The verdict's judge tier is RuleBased and
// error_category is unset.
JudgeVerdict rule_check(const std::string& candidate, const std::string& reference,
                        const RuleCheckOptions& opts = {});

// True when the rule tier alone cannot be trusted to reject the pair:
// a mismatch in which either side normalizes to Symbolic.
bool needs_escalation(const std::string& candidate, const std::string& reference,
                      const RuleCheckOptions& opts = {});

} // namespace sciforge
