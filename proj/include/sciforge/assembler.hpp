#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sciforge/types.hpp"

namespace sciforge {

// Renders a solution into the canonical instruction text:
//   Analysis: <analysis>
//   Step 1: ...
//   Step n: ...
//   To sum up, the answer to this question is <final answer>.
// The analysis line is kept even when the analysis is empty so the shape is
// uniform. Throws Error(MissingSteps) when the solution has no steps.
std::string format_instruction(const CotSolution& solution);

// Instruction entry for a reasoning subject (problem = question body,
// answer = formatted solution).
InstructionEntry make_instruction_entry(const QuestionRecord& question,
                                        const CotSolution& solution,
                                        std::optional<double> quality = std::nullopt);

// Instruction entry for a formal-proof record: the statement is the problem
// and the proof script is carried over verbatim. Throws Error(EmptyProof)
// when the record has no proof or it trims to nothing.
InstructionEntry make_lean_entry(const QuestionRecord& record);

struct AssembleResult {
    std::vector<InstructionEntry> entries;
    DatasetStats stats;
};

// Joins questions with their solutions and lays the dataset out
// deterministically: entries grouped math, physics, chemistry, formal
// proofs; each group sorted by (question id, problem, answer). Questions
// with no solution are skipped; formal-proof records need no solution.
AssembleResult assemble(const std::vector<QuestionRecord>& questions,
                        const std::vector<CotSolution>& solutions);

} // namespace sciforge
