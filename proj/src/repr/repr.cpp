#include "cadseq/repr.hpp"

#include "cadseq/canonical.hpp"
#include "cadseq/error.hpp"
#include "formats.hpp"

namespace cadseq {

std::string_view to_string(ReprKind kind) {
  switch (kind) {
    case ReprKind::Json: return "json";
    case ReprKind::Dsl: return "dsl";
    case ReprKind::StructuredText: return "st";
    case ReprKind::Gpl: return "gpl";
  }
  return "json";
}

std::optional<ReprKind> repr_from_string(std::string_view name) {
  for (const ReprKind k : kAllReprKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view file_extension(ReprKind kind) {
  switch (kind) {
    case ReprKind::Json: return ".cad.json";
    case ReprKind::Dsl: return ".cad.dsl";
    case ReprKind::StructuredText: return ".cad.st";
    case ReprKind::Gpl: return ".cad.gpl";
  }
  return ".cad.json";
}

std::optional<ReprKind> repr_from_path(std::string_view path) {
  for (const ReprKind k : kAllReprKinds) {
    const std::string_view ext = file_extension(k);
    if (path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Lexical: return "lexical";
    case ParseErrorKind::Syntactic: return "syntactic";
    case ParseErrorKind::Semantic: return "semantic";
  }
  return "syntactic";
}

std::string ParseError::describe() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " +
         std::string(to_string(kind)) + " error: " + message;
}

ParseOutcome parse(std::string_view text, ReprKind kind) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return ParseError{1, 1, "empty input", ParseErrorKind::Syntactic};
  }
  switch (kind) {
    case ReprKind::Json: return detail::parse_json(text);
    case ReprKind::Dsl: return detail::parse_dsl(text);
    case ReprKind::StructuredText: return detail::parse_st(text);
    case ReprKind::Gpl: return detail::parse_gpl(text);
  }
  return ParseError{1, 1, "unknown representation", ParseErrorKind::Syntactic};
}

std::string print(const CadModel &model, ReprKind kind) {
  const CadModel canonical = canonicalize(model);
  switch (kind) {
    case ReprKind::Json: return detail::print_json(canonical);
    case ReprKind::Dsl: return detail::print_dsl(canonical);
    case ReprKind::StructuredText: return detail::print_st(canonical);
    case ReprKind::Gpl: return detail::print_gpl(canonical);
  }
  return {};
}

CadModel parse_or_throw(std::string_view text, ReprKind kind) {
  ParseOutcome outcome = parse(text, kind);
  if (!outcome) {
    throw Error(ErrorCode::ParseFailed,
                std::string(to_string(kind)) + " " + outcome.error().describe());
  }
  return std::move(outcome.model());
}

std::string convert(std::string_view text, ReprKind from, ReprKind to) {
  return print(parse_or_throw(text, from), to);
}

bool check_format(std::string_view text, ReprKind kind) { return parse(text, kind).ok(); }

}  // namespace cadseq
