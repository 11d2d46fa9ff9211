#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "sciforge/annotator.hpp"
#include "sciforge/assembler.hpp"
#include "sciforge/errors.hpp"

using namespace sciforge;

namespace {

CotSolution make_solution(const std::string& id, const std::string& final_answer,
                          std::vector<std::string> steps = {"work"},
                          const std::string& analysis = "Overview.") {
    CotSolution s;
    s.question_id = id;
    s.analysis = analysis;
    s.steps = std::move(steps);
    s.final_answer = final_answer;
    s.stage = Stage::Stage1;
    s.producer = "model";
    return s;
}

QuestionRecord make_question(const std::string& id, Subject subject,
                             const std::string& body = "body") {
    QuestionRecord q;
    q.id = id;
    q.subject = subject;
    q.body = body;
    q.source = "test";
    return q;
}

} // namespace

TEST_CASE("format_instruction renders the canonical shape") {
    CotSolution s = make_solution("q", "7", {"Add 3 and 4.", "State the result."},
                                  "This question examines addition.");
    CHECK(format_instruction(s) ==
          "Analysis: This question examines addition.\n"
          "Step 1: Add 3 and 4.\n"
          "Step 2: State the result.\n"
          "To sum up, the answer to this question is 7.");
}

TEST_CASE("format_instruction keeps the analysis line when empty") {
    CotSolution s = make_solution("q", "7", {"only step"}, "");
    CHECK(format_instruction(s) == "Analysis:\n"
                                   "Step 1: only step\n"
                                   "To sum up, the answer to this question is 7.");
}

TEST_CASE("format_instruction does not double the terminal period") {
    CotSolution s = make_solution("q", "7.");
    std::string text = format_instruction(s);
    CHECK(text.substr(text.size() - 2) == "7.");
    CHECK(text.substr(text.size() - 3) != "7..");
}

TEST_CASE("format_instruction requires steps") {
    CotSolution s = make_solution("q", "7", {});
    CHECK_THROWS_AS(format_instruction(s), Error);
}

TEST_CASE("instruction text round-trips through the response parser") {
    CotSolution original = make_solution("q", "x = 2", {"First step.", "Second\nwith continuation"},
                                         "Multi word analysis.");
    CotSolution reparsed = parse_cot(format_instruction(original));
    CHECK(reparsed.analysis == original.analysis);
    REQUIRE(reparsed.steps.size() == original.steps.size());
    CHECK(reparsed.steps[0] == original.steps[0]);
    CHECK(reparsed.steps[1] == original.steps[1]);
    // The terminal period added by the renderer stays on the extracted answer.
    CHECK(reparsed.final_answer == "x = 2.");
}

TEST_CASE("make_instruction_entry carries provenance") {
    QuestionRecord q = make_question("id1", Subject::Physics, "How fast?");
    CotSolution s = make_solution("id1", "4 m/s");
    s.stage = Stage::Stage2;

    InstructionEntry e = make_instruction_entry(q, s, 0.75);
    CHECK(e.subject == Subject::Physics);
    CHECK(e.problem == "How fast?");
    CHECK(e.answer == format_instruction(s));
    CHECK(e.provenance.stage == Stage::Stage2);
    CHECK(e.provenance.producer == "model");
    CHECK(e.provenance.question_id == "id1");
    REQUIRE(e.provenance.quality.has_value());
    CHECK(*e.provenance.quality == doctest::Approx(0.75));
    CHECK(!e.provenance.empty_analysis);

    CotSolution bare = make_solution("id1", "4", {"w"}, "");
    CHECK(make_instruction_entry(q, bare).provenance.empty_analysis);
}

TEST_CASE("make_lean_entry carries the proof verbatim") {
    QuestionRecord q = make_question("gcd", Subject::Lean,
                                     "theorem gcd_self (n : Nat) : gcd n n = n");
    q.reference_solution = "cases n <;> simp [gcd, mod_self]";

    InstructionEntry e = make_lean_entry(q);
    CHECK(e.problem == "theorem gcd_self (n : Nat) : gcd n n = n");
    CHECK(e.answer == "cases n <;> simp [gcd, mod_self]");
    CHECK(e.provenance.stage == Stage::Preexisting);
    CHECK(e.provenance.producer == "human");

    q.reference_solution = "   ";
    CHECK_THROWS_AS(make_lean_entry(q), Error);
    q.reference_solution.reset();
    CHECK_THROWS_AS(make_lean_entry(q), Error);
}

TEST_CASE("assemble groups by subject and sorts within groups") {
    std::vector<QuestionRecord> questions = {
        make_question("p2", Subject::Physics), make_question("m2", Subject::Math),
        make_question("c1", Subject::Chemistry), make_question("m1", Subject::Math),
        make_question("l1", Subject::Lean, "theorem t : True"),
        make_question("p1", Subject::Physics), make_question("m3", Subject::Math),
    };
    questions[4].reference_solution = "trivial";

    std::vector<CotSolution> solutions = {
        make_solution("m1", "1"), make_solution("m2", "2"), make_solution("p1", "3"),
        make_solution("p2", "4"), make_solution("c1", "5"),
        // m3 has no solution and must be skipped
    };

    AssembleResult result = assemble(questions, solutions);
    REQUIRE(result.entries.size() == 6);
    CHECK(result.entries[0].provenance.question_id == "m1");
    CHECK(result.entries[1].provenance.question_id == "m2");
    CHECK(result.entries[2].provenance.question_id == "p1");
    CHECK(result.entries[3].provenance.question_id == "p2");
    CHECK(result.entries[4].provenance.question_id == "c1");
    CHECK(result.entries[5].provenance.question_id == "l1");

    CHECK(result.stats.math == 2);
    CHECK(result.stats.physics == 2);
    CHECK(result.stats.chemistry == 1);
    CHECK(result.stats.lean == 1);
    CHECK(result.stats.total() == 6);
    CHECK(result.stats.physics_chemistry() == 3);
}

TEST_CASE("assemble takes the first solution offered for an id") {
    std::vector<QuestionRecord> questions = {make_question("m1", Subject::Math)};
    std::vector<CotSolution> solutions = {make_solution("m1", "first"),
                                          make_solution("m1", "second")};
    AssembleResult result = assemble(questions, solutions);
    REQUIRE(result.entries.size() == 1);
    CHECK(result.entries[0].answer.find("first") != std::string::npos);
}

TEST_CASE("assemble output is invariant to input order") {
    std::vector<QuestionRecord> questions = {
        make_question("a", Subject::Math), make_question("b", Subject::Math),
        make_question("c", Subject::Physics)};
    std::vector<CotSolution> solutions = {make_solution("a", "1"), make_solution("b", "2"),
                                          make_solution("c", "3")};

    AssembleResult forward = assemble(questions, solutions);
    std::reverse(questions.begin(), questions.end());
    std::reverse(solutions.begin(), solutions.end());
    AssembleResult backward = assemble(questions, solutions);

    REQUIRE(forward.entries.size() == backward.entries.size());
    for (std::size_t i = 0; i < forward.entries.size(); ++i) {
        CHECK(forward.entries[i].provenance.question_id ==
              backward.entries[i].provenance.question_id);
        CHECK(forward.entries[i].answer == backward.entries[i].answer);
    }
}

TEST_CASE("stats table renders with thousands separators") {
    CHECK(with_thousands_separators(0) == "0");
    CHECK(with_thousands_separators(999) == "999");
    CHECK(with_thousands_separators(1000) == "1,000");
    CHECK(with_thousands_separators(89934) == "89,934");
    CHECK(with_thousands_separators(1234567) == "1,234,567");

    DatasetStats s;
    s.math = 2;
    s.physics = 1;
    s.chemistry = 1;
    s.lean = 1;
    std::string table = format_stats_table(s);
    CHECK(table ==
          "| Subject | Math | Physics & Chemistry | Formal Proofs (Lean) | Total |\n"
          "|---------|------|---------------------|----------------------|-------|\n"
          "| #Number | 2    | 2                   | 1                    | 5     |\n");
}
