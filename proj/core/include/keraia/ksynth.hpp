#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "keraia/error.hpp"
#include "keraia/knowledge_base.hpp"

namespace keraia::ksynth {

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Diagnostic {
  ErrorCode code = ErrorCode::SyntaxError;
  Position pos;
  std::string source;
  std::string message;

  std::string str() const;
};

struct Decl;

struct CloudDecl {
  std::string name;
  std::vector<std::string> tags;  // dimension names
  std::vector<Decl> body;

  friend bool operator==(const CloudDecl& a, const CloudDecl& b);
};

struct KsDecl {
  std::string name;
  SlotValue slots = SlotValue::map();
  std::vector<ResponderBinding> responders;
  std::vector<AttractorBinding> attractors;
  std::optional<std::string> explains;

  friend bool operator==(const KsDecl&, const KsDecl&) = default;
};

// `use "file"`: `body` holds the included declarations once expanded. Only
// the path takes part in equality and serialization.
struct UseDecl {
  std::string path;
  std::vector<Decl> body;

  friend bool operator==(const UseDecl& a, const UseDecl& b) { return a.path == b.path; }
};

using DeclNode = std::variant<CloudDecl, KsDecl, DRel, LineOfThought, Dimension, Juncture, Rule, GppbTemplate,
                              AnomalySpec, ElaborationPlan, UseDecl>;

struct Decl {
  DeclNode node;
  Position pos;

  friend bool operator==(const Decl& a, const Decl& b) { return a.node == b.node; }
};

inline bool operator==(const CloudDecl& a, const CloudDecl& b) {
  return a.name == b.name && a.tags == b.tags && a.body == b.body;
}

struct Document {
  std::vector<Decl> decls;

  friend bool operator==(const Document&, const Document&) = default;
};

struct ParseOptions {
  std::string source_name = "<input>";
  // Directory `use` paths are resolved against; empty disables expansion.
  std::filesystem::path include_dir;
  bool check_references = true;
};

struct ParseResult {
  Document document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

ParseResult parse(std::string_view text, const ParseOptions& options = {});
ParseResult parse_file(const std::filesystem::path& path, bool check_references = true);

// Throws Error carrying the first diagnostic.
Document parse_or_throw(std::string_view text, const ParseOptions& options = {});
Document parse_file_or_throw(const std::filesystem::path& path);

// Cross-reference pass over a document (includes expanded bodies).
std::vector<Diagnostic> check_references(const Document& doc, const std::string& source_name = "<input>");

std::string serialize(const Document& doc);
std::string serialize_value(const SlotValue& value);

// Commits every declaration, in order, into `kb`.
void load(KnowledgeBase& kb, const Document& doc);

}  // namespace keraia::ksynth
