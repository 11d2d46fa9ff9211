#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "sciforge/errors.hpp"
#include "sciforge/ingest.hpp"
#include "support/test_support.hpp"

using namespace sciforge;

namespace {

Errc code_of(const std::string& text) {
    try {
        parse_corpus(text);
    } catch (const Error& e) {
        return e.code();
    }
    throw std::runtime_error("expected parse_corpus to throw");
}

} // namespace

TEST_CASE("parse_corpus reads records and skips blank lines") {
    std::string text =
        R"({"id": "a", "subject": "math", "body": "What is 2+2?", "reference_answer": "4", "reference_solution": null, "source": "t"})"
        "\n\n"
        R"({"id": "b", "subject": "lean", "body": "theorem t : True", "reference_answer": null, "reference_solution": "trivial", "source": "t"})"
        "\n";
    auto records = parse_corpus(text);
    REQUIRE(records.size() == 2);
    CHECK(records[0].id == "a");
    CHECK(records[0].subject == Subject::Math);
    REQUIRE(records[0].reference_answer.has_value());
    CHECK(*records[0].reference_answer == "4");
    CHECK(!records[0].reference_solution.has_value());
    CHECK(records[1].subject == Subject::Lean);
    REQUIRE(records[1].reference_solution.has_value());
    CHECK(*records[1].reference_solution == "trivial");
}

TEST_CASE("parse_corpus failure variants carry the line number") {
    // Bad JSON on line 2.
    try {
        parse_corpus(R"({"id": "a", "subject": "math", "body": "x", "source": "t"})"
                     "\nnot json\n");
        FAIL("expected MalformedLine");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MalformedLine);
        CHECK(e.arg() == 2);
    }

    CHECK(code_of(R"({"subject": "math", "body": "x", "source": "t"})") == Errc::MalformedLine);
    CHECK(code_of(R"({"id": "", "subject": "math", "body": "x", "source": "t"})") ==
          Errc::MalformedLine);
    CHECK(code_of(R"({"id": "a", "subject": "math", "body": "   ", "source": "t"})") ==
          Errc::MalformedLine);
    CHECK(code_of(R"({"id": "a", "subject": "botany", "body": "x", "source": "t"})") ==
          Errc::UnknownSubject);

    std::string dup = R"({"id": "a", "subject": "math", "body": "x", "source": "t"})";
    CHECK(code_of(dup + "\n" + dup) == Errc::DuplicateId);
}

TEST_CASE("validate_latex finds unbalanced math delimiters") {
    auto defects = validate_latex("cost is $5 and rising");
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].kind == DefectKind::UnbalancedMathDelimiters);
    CHECK(defects[0].location == 8);

    CHECK(validate_latex("balanced $x+y$ here").empty());
    CHECK(validate_latex("display $$x$$ done").empty());
    CHECK(!validate_latex("open display $$x").empty());
}

TEST_CASE("validate_latex tracks environments as a stack") {
    CHECK(validate_latex("\\begin{align}x\\end{align}").empty());
    CHECK(validate_latex("\\begin{a}\\begin{b}x\\end{b}\\end{a}").empty());

    auto mismatch = validate_latex("\\begin{align}x\\end{aligned}");
    REQUIRE(!mismatch.empty());
    CHECK(mismatch[0].kind == DefectKind::MismatchedEnvironment);

    auto unclosed = validate_latex("\\begin{align}x");
    REQUIRE(unclosed.size() == 1);
    CHECK(unclosed[0].kind == DefectKind::MismatchedEnvironment);
    CHECK(unclosed[0].location == 0);

    auto stray = validate_latex("x\\end{align}");
    REQUIRE(stray.size() == 1);
    CHECK(stray[0].kind == DefectKind::MismatchedEnvironment);
}

TEST_CASE("validate_latex escape skipping") {
    // Escaped dollar signs are literal text, not delimiters.
    CHECK(validate_latex("price \\$5 and \\$6").empty());
}

TEST_CASE("validate_latex truncation and control characters") {
    auto ell = validate_latex("and so on\xe2\x80\xa6");
    REQUIRE(ell.size() == 1);
    CHECK(ell[0].kind == DefectKind::TruncationMarker);

    auto placeholder = validate_latex("value is [?] here");
    REQUIRE(placeholder.size() == 1);
    CHECK(placeholder[0].kind == DefectKind::TruncationMarker);

    auto ctrl = validate_latex(std::string("a\x01" "b"));
    REQUIRE(ctrl.size() == 1);
    CHECK(ctrl[0].kind == DefectKind::ControlCharacter);
    CHECK(ctrl[0].detail.find("0x01") != std::string::npos);

    CHECK(validate_latex("tabs\tand\nnewlines are fine").empty());
}

TEST_CASE("validate_latex empty body is the sole defect") {
    auto defects = validate_latex("   \n  ");
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].kind == DefectKind::EmptyBody);
    CHECK(defects[0].location == 0);
}

TEST_CASE("dedupe_key normalizes case, whitespace, and dollars") {
    CHECK(dedupe_key("What is  $x$?") == dedupe_key("what is x?"));
    CHECK(dedupe_key("A  B") == dedupe_key("a b"));
    CHECK(dedupe_key("alpha") != dedupe_key("beta"));
}

TEST_CASE("dedupe keeps first occurrence in order") {
    std::vector<QuestionRecord> records(4);
    records[0].id = "r0";
    records[0].body = "Question one";
    records[1].id = "r1";
    records[1].body = "question  ONE"; // same key as r0
    records[2].id = "r2";
    records[2].body = "Question two";
    records[3].id = "r3";
    records[3].body = "QUESTION TWO "; // same key as r2
    for (auto& r : records) r.subject = Subject::Math;

    auto [kept, dropped] = dedupe(records);
    CHECK(dropped == 2);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "r0");
    CHECK(kept[1].id == "r2");
}

TEST_CASE("quarantine splits while preserving order") {
    std::vector<QuestionRecord> records(3);
    records[0].id = "good1";
    records[0].body = "fine body";
    records[1].id = "bad";
    records[1].body = "unclosed $math";
    records[2].id = "good2";
    records[2].body = "also fine";
    for (auto& r : records) r.subject = Subject::Physics;

    auto result = quarantine(records);
    REQUIRE(result.clean.size() == 2);
    CHECK(result.clean[0].id == "good1");
    CHECK(result.clean[1].id == "good2");
    REQUIRE(result.quarantined.size() == 1);
    CHECK(result.quarantined[0].record.id == "bad");
    REQUIRE(!result.quarantined[0].defects.empty());
    CHECK(result.quarantined[0].defects[0].kind == DefectKind::UnbalancedMathDelimiters);
}

TEST_CASE("golden corpus fixture: load, dedupe, quarantine") {
    auto records = load_corpus(testsupport::fixture_path("golden_corpus.jsonl"));
    CHECK(records.size() == 12);

    auto [kept, dropped] = dedupe(records);
    CHECK(dropped == 1);
    REQUIRE(kept.size() == 11);

    auto result = quarantine(kept);
    CHECK(result.clean.size() == 8);
    REQUIRE(result.quarantined.size() == 3);
    CHECK(result.quarantined[0].record.id == "bad-001");
    CHECK(result.quarantined[1].record.id == "bad-002");
    CHECK(result.quarantined[2].record.id == "bad-003");
}
