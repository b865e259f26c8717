#include "warnings/io.hpp"

#include "json.hpp"
#include <set>
#include <sstream>
#include <tuple>

#include "minic/parser.hpp"
#include "util/error.hpp"
#include "util/hash.hpp"

namespace warnrank::warnings {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* name, std::size_t line) {
  auto it = obj.find(name);
  if (it == obj.end()) throw SchemaError("line " + std::to_string(line) + ": missing field '" + name + "'");
  return *it;
}

std::string string_field(const json& obj, const char* name, std::size_t line) {
  const json& v = field(obj, name, line);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw SchemaError("line " + std::to_string(line) + ": field '" + name + "' must be a non-empty string");
  }
  return v.get<std::string>();
}

}  // namespace

Dataset parse_warnings(std::string_view text, const std::string& origin) {
  Dataset data;
  std::set<std::tuple<std::string, int, WarningKind, std::string>> keys;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw SchemaError(origin + ": line " + std::to_string(line_no) + ": not valid JSON");
    }
    if (!obj.is_object()) throw SchemaError(origin + ": line " + std::to_string(line_no) + ": expected an object");
    try {
      Warning w;
      w.id = string_field(obj, "id", line_no);
      w.file = string_field(obj, "file", line_no);
      w.function = string_field(obj, "function", line_no);
      w.detector = string_field(obj, "detector", line_no);
      const json& line = field(obj, "line", line_no);
      if (!line.is_number_integer() || line.get<long long>() < 1) {
        throw SchemaError("line " + std::to_string(line_no) + ": field 'line' must be a positive integer");
      }
      w.line = static_cast<int>(line.get<long long>());
      const auto kind = parse_kind(string_field(obj, "kind", line_no));
      if (!kind) throw SchemaError("line " + std::to_string(line_no) + ": field 'kind' must be BO or NPD");
      w.kind = *kind;
      if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
        std::optional<Label> label;
        if (it->is_string()) label = parse_label(it->get<std::string>());
        if (!label) {
          throw SchemaError("line " + std::to_string(line_no) + ": invalid label " + it->dump() + " (expected TP or FP)");
        }
        w.label = label;
      }
      if (!keys.emplace(w.file, w.line, w.kind, w.detector).second || !ids.insert(w.id).second) {
        throw DuplicateWarning(origin + ": line " + std::to_string(line_no) + ": duplicate warning " + w.id);
      }
      data.warnings.push_back(std::move(w));
    } catch (const SchemaError& e) {
      throw SchemaError(origin + ": " + e.what());
    }
  }
  return data;
}

Dataset load_warnings(const std::filesystem::path& path) { return parse_warnings(read_file(path), path.string()); }

std::string format_warnings(const Dataset& data) {
  std::string out;
  for (const auto& w : data.warnings) {
    json obj{{"id", w.id},       {"file", w.file}, {"function", w.function}, {"line", w.line},
             {"kind", kind_name(w.kind)}, {"detector", w.detector}};
    obj["label"] = w.label ? json(label_name(*w.label)) : json(nullptr);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_warnings(const Dataset& data, const std::filesystem::path& path) { write_file(path, format_warnings(data)); }

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    throw SchemaError("corpus manifest is not valid JSON");
  }
  if (!doc.is_object() || !doc.contains("files") || !doc["files"].is_array()) {
    throw SchemaError("corpus manifest needs a \"files\" array");
  }
  std::vector<ManifestEntry> out;
  std::set<std::string> seen;
  for (const auto& f : doc["files"]) {
    if (!f.is_object() || !f.contains("path") || !f["path"].is_string()) {
      throw SchemaError("corpus manifest entry without a \"path\" string");
    }
    ManifestEntry e{f["path"].get<std::string>(), f.value("project", std::string("default"))};
    if (!seen.insert(e.path).second) throw SchemaError("corpus manifest lists " + e.path + " twice");
    out.push_back(std::move(e));
  }
  return out;
}

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  json files = json::array();
  for (const auto& e : entries) files.push_back({{"path", e.path}, {"project", e.project}});
  return json{{"files", files}}.dump(2) + "\n";
}

std::map<std::string, std::string> Corpus::project_map() const {
  std::map<std::string, std::string> out;
  for (const auto& f : files) out[f.path] = f.project;
  return out;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus c;
  c.dir = dir;
  const std::string manifest = read_file(dir / "manifest.json");
  c.files = parse_manifest(manifest);
  std::string digest_input = manifest;
  for (const auto& f : c.files) {
    const std::string text = read_file(dir / f.path);
    digest_input += '\0' + f.path + '\0' + text;
    try {
      c.units.push_back(minic::parse_source(text, f.path));
    } catch (const Error& e) {
      throw Error(e.code(), f.path + ": " + e.what());
    }
  }
  c.content_hash = sha256_hex(digest_input);
  return c;
}

void attach_projects(Dataset& data, const Corpus& corpus) {
  data.project_of = corpus.project_map();
  for (const auto& w : data.warnings) {
    if (!data.project_of.count(w.file)) {
      throw SchemaError("warning " + w.id + " names " + w.file + ", which the corpus manifest does not list");
    }
  }
}

}  // namespace warnrank::warnings
