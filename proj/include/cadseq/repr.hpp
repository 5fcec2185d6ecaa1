#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cadseq/model.hpp"

namespace cadseq {

enum class ReprKind { Json, Dsl, StructuredText, Gpl };

inline constexpr ReprKind kAllReprKinds[] = {ReprKind::Json, ReprKind::Dsl,
                                             ReprKind::StructuredText, ReprKind::Gpl};

std::string_view to_string(ReprKind kind);        // "json", "dsl", "st", "gpl"
std::optional<ReprKind> repr_from_string(std::string_view name);
std::string_view file_extension(ReprKind kind);   // ".cad.json", ...
std::optional<ReprKind> repr_from_path(std::string_view path);

enum class ParseErrorKind { Lexical, Syntactic, Semantic };

std::string_view to_string(ParseErrorKind kind);

struct ParseError {
  int line = 1;
  int column = 1;
  std::string message;
  ParseErrorKind kind = ParseErrorKind::Syntactic;

  std::string describe() const;
};

// Either a canonical, validated model or the first error encountered.
class ParseOutcome {
 public:
  ParseOutcome(CadModel model) : model_(std::move(model)) {}
  ParseOutcome(ParseError error) : error_(std::move(error)) {}

  bool ok() const { return model_.has_value(); }
  explicit operator bool() const { return ok(); }
  const CadModel &model() const { return *model_; }
  CadModel &model() { return *model_; }
  const ParseError &error() const { return *error_; }

 private:
  std::optional<CadModel> model_;
  std::optional<ParseError> error_;
};

// Never throws on malformed input.
ParseOutcome parse(std::string_view text, ReprKind kind);

// Prints canonicalize(model); throws InvalidModel.
std::string print(const CadModel &model, ReprKind kind);

// print(parse(text, from), to); throws Error{ParseFailed} with the parse error.
std::string convert(std::string_view text, ReprKind from, ReprKind to);

bool check_format(std::string_view text, ReprKind kind);

// Parse or throw Error{ParseFailed}.
CadModel parse_or_throw(std::string_view text, ReprKind kind);

// Single-line structured-text fragments for one <operation> or <loop>. Values
// print in shortest round-trip form; parsing checks structure only and throws
// Error{ParseFailed}.
std::string print_op_fragment(const SketchExtrude &op);
std::string print_loop_fragment(const Loop &loop);
SketchExtrude parse_op_fragment(std::string_view text);
Loop parse_loop_fragment(std::string_view text);

// Balance check for <name>...</name> markers embedded in free text. Returns the
// first problem, naming the unclosed tag.
std::optional<ParseError> check_markers(std::string_view text);

}  // namespace cadseq
