#include "sciforge/assembler.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

std::string format_instruction(const CotSolution& solution) {
    if (solution.steps.empty())
        throw Error(Errc::MissingSteps,
                    "solution for " + solution.question_id + " has no steps");
    std::ostringstream out;
    out << "Analysis:";
    if (!solution.analysis.empty()) out << ' ' << solution.analysis;
    for (std::size_t i = 0; i < solution.steps.size(); ++i)
        out << '\n' << "Step " << (i + 1) << ": " << solution.steps[i];
    out << '\n' << "To sum up, the answer to this question is " << solution.final_answer;
    if (solution.final_answer.empty() || solution.final_answer.back() != '.') out << '.';
    return out.str();
}

InstructionEntry make_instruction_entry(const QuestionRecord& question,
                                        const CotSolution& solution,
                                        std::optional<double> quality) {
    InstructionEntry e;
    e.subject = question.subject;
    e.problem = question.body;
    e.answer = format_instruction(solution);
    e.provenance.stage = solution.stage;
    e.provenance.producer = solution.producer;
    e.provenance.quality = quality;
    e.provenance.question_id = question.id;
    e.provenance.empty_analysis = solution.analysis.empty();
    return e;
}

InstructionEntry make_lean_entry(const QuestionRecord& record) {
    if (!record.reference_solution || util::trim(*record.reference_solution).empty())
        throw Error(Errc::EmptyProof, "formal-proof record " + record.id + " has no proof");
    InstructionEntry e;
    e.subject = Subject::Lean;
    e.problem = record.body;
    e.answer = *record.reference_solution;
    e.provenance.stage = Stage::Preexisting;
    e.provenance.producer = "human";
    e.provenance.question_id = record.id;
    return e;
}

AssembleResult assemble(const std::vector<QuestionRecord>& questions,
                        const std::vector<CotSolution>& solutions) {
    std::unordered_map<std::string, const CotSolution*> by_id;
    for (const auto& s : solutions) by_id.emplace(s.question_id, &s); // first one wins

    std::vector<InstructionEntry> groups[4];
    for (const auto& q : questions) {
        if (q.subject == Subject::Lean) {
            groups[3].push_back(make_lean_entry(q));
            continue;
        }
        auto it = by_id.find(q.id);
        if (it == by_id.end()) continue; // never annotated successfully
        std::size_t g = q.subject == Subject::Math ? 0 : q.subject == Subject::Physics ? 1 : 2;
        groups[g].push_back(make_instruction_entry(q, *it->second));
    }

    AssembleResult result;
    for (auto& group : groups) {
        std::sort(group.begin(), group.end(),
                  [](const InstructionEntry& a, const InstructionEntry& b) {
                      return std::tie(a.provenance.question_id, a.problem, a.answer) <
                             std::tie(b.provenance.question_id, b.problem, b.answer);
                  });
        result.entries.insert(result.entries.end(), group.begin(), group.end());
    }
    result.stats.math = groups[0].size();
    result.stats.physics = groups[1].size();
    result.stats.chemistry = groups[2].size();
    result.stats.lean = groups[3].size();
    return result;
}

} // namespace sciforge
