#pragma once

// Shared tokenizer and helpers for the textual grammars (DSL, ST, GPL).

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cadseq/repr.hpp"
#include "cadseq/validate.hpp"

namespace cadseq::detail {

enum class TokenKind { Ident, Number, String, Punct, Newline, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier name, string contents, or punctuation char
  double number = 0.0;
  int line = 1;
  int column = 1;
};

struct LexOptions {
  bool hash_comments = true;
  bool newline_tokens = false;
};

// Thrown internally by parsers; converted to ParseOutcome at the boundary.
struct ParseFailure {
  ParseError error;
};

[[noreturn]] void fail(const Token &at, ParseErrorKind kind, std::string message);

std::vector<Token> tokenize(std::string_view text, const LexOptions &options);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token &peek(std::size_t ahead = 0) const;
  const Token &next();
  bool at_end() const { return peek().kind == TokenKind::End; }

  bool is_ident(std::string_view name, std::size_t ahead = 0) const;
  bool is_punct(char c, std::size_t ahead = 0) const;

  const Token &expect_ident(std::string_view name);
  const Token &expect_any_ident();
  const Token &expect_punct(char c);
  double expect_number();
  std::string expect_string();
  void expect_newline();
  void skip_newlines();

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string describe(const Token &token);

// Remembers where ops/loops/curves were declared so validation violations can be
// reported at a source position.
class SourceMap {
 public:
  void mark(std::string path, const Token &token) {
    positions_[std::move(path)] = {token.line, token.column};
  }
  std::pair<int, int> locate(const std::string &path) const;

 private:
  std::map<std::string, std::pair<int, int>> positions_;
};

// Validates then canonicalizes; validation failures become Semantic errors.
ParseOutcome finish(CadModel model, const SourceMap &map);

std::string format_number(double value);
std::string quote(std::string_view raw);
std::string path_for(std::size_t op);
std::string path_for(std::size_t op, std::size_t loop);
std::string path_for(std::size_t op, std::size_t loop, std::size_t curve);

}  // namespace cadseq::detail
