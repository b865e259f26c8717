#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "minic/ast.hpp"
#include "warnings/warning.hpp"

namespace warnrank::warnings {

// Line-delimited JSON, one object per warning:
//   {"detector":..,"file":..,"function":..,"id":..,"kind":"BO"|"NPD","label":"TP"|"FP"|null,"line":N}
// Labels are normalized to upper case. Throws SchemaError (with the 1-based
// line number) on malformed records and DuplicateWarning when two records
// share (file, line, kind, detector) or an id.
Dataset parse_warnings(std::string_view text, const std::string& origin = "<input>");
Dataset load_warnings(const std::filesystem::path& path);
std::string format_warnings(const Dataset& data);
void save_warnings(const Dataset& data, const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;     // relative to the corpus directory
  std::string project;

  bool operator==(const ManifestEntry&) const = default;
};

// {"files": [{"path": "...", "project": "..."}, ...]}
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::string format_manifest(const std::vector<ManifestEntry>& entries);

struct Corpus {
  std::filesystem::path dir;
  std::vector<ManifestEntry> files;
  std::vector<minic::TranslationUnit> units;  // parallel to files; source_id = entry path
  std::string content_hash;                   // SHA-256 over manifest and file bytes

  std::map<std::string, std::string> project_map() const;
};

// Reads <dir>/manifest.json and parses every listed file.
Corpus load_corpus(const std::filesystem::path& dir);

// Fills project_of from the corpus; SchemaError if a warning names a file the
// corpus does not list.
void attach_projects(Dataset& data, const Corpus& corpus);

}  // namespace warnrank::warnings
