#pragma once

#include <vector>

#include "minic/ast.hpp"
#include "warnings/warning.hpp"

namespace warnrank::warnings {

// Library calls the buffer-overflow rule reports.
inline constexpr const char* kRiskyBufferCalls[] = {"strcat", "strcpy", "sprintf", "memcpy"};

// One BO warning per (statement line, risky callee); detector "bo.<callee>".
std::vector<Warning> detect_bo(const minic::TranslationUnit& unit);

// One NPD warning per (statement line, pointer) for dereferences of a pointer
// that may hold NULL or an unchecked malloc result: some reaching definition
// assigns NULL or malloc(...), and no enclosing condition (transitive control
// dependence) reads the pointer. Detector "npd.deref".
std::vector<Warning> detect_npd(const minic::TranslationUnit& unit);

// Both detectors, sorted by (line, kind, detector).
std::vector<Warning> detect_all(const minic::TranslationUnit& unit);

std::string warning_id(const std::string& file, int line, WarningKind kind, const std::string& detector);

}  // namespace warnrank::warnings
