#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sciforge/types.hpp"

namespace sciforge {

// Parses a JSONL corpus. Blank lines are skipped. Throws Error(MalformedLine)
// with the 1-based line number in arg() for unparseable JSON, missing or
// wrong-typed required fields, or a body that trims to nothing; DuplicateId
// when an id repeats; UnknownSubject for an unrecognized subject string.
std::vector<QuestionRecord> load_corpus(const std::string& path);

// Same parser over an in-memory buffer (used by load_corpus and tests).
std::vector<QuestionRecord> parse_corpus(const std::string& text);

// Syntactic screen over a record body. Reports, in scan order:
//   - UnbalancedMathDelimiters: a $ or $$ region opened but never closed
//     (located at the opener)
//   - MismatchedEnvironment: \end with no matching \begin, or \begin left
//     open at end of input
//   - TruncationMarker: a literal ellipsis character or "[?]" placeholder
//   - ControlCharacter: any C0 control byte other than \n and \t
//   - EmptyBody: the body trims to nothing (sole defect in that case)
std::vector<Defect> validate_latex(const std::string& body);

// Normalization key under which two bodies count as the same question:
// lowercased, whitespace collapsed, math delimiters ($) stripped.
std::string dedupe_key(const std::string& body);

// Drops records whose body normalizes to a key already seen. First
// occurrence wins; input order is preserved. Returns survivors and the
// number dropped.
std::pair<std::vector<QuestionRecord>, std::uint64_t> dedupe(std::vector<QuestionRecord> records);

struct QuarantinedRecord {
    QuestionRecord record;
    std::vector<Defect> defects;
};

struct QuarantineResult {
    std::vector<QuestionRecord> clean;
    std::vector<QuarantinedRecord> quarantined;
};

// Splits records into defect-free ones and ones that failed validate_latex.
// Both halves preserve input order.
QuarantineResult quarantine(const std::vector<QuestionRecord>& records);

} // namespace sciforge
