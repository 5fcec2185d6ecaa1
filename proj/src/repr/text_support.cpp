#include "text_support.hpp"

#include <charconv>

#include "cadseq/canonical.hpp"

namespace cadseq::detail {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

constexpr std::string_view kPunct = "()=,.<>/";

ParseError make_error(int line, int column, ParseErrorKind kind, std::string message) {
  ParseError e;
  e.line = line;
  e.column = column;
  e.kind = kind;
  e.message = std::move(message);
  return e;
}

}  // namespace

void fail(const Token &at, ParseErrorKind kind, std::string message) {
  throw ParseFailure{make_error(at.line, at.column, kind, std::move(message))};
}

std::vector<Token> tokenize(std::string_view text, const LexOptions &options) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  auto lex_error = [&](std::string message) {
    throw ParseFailure{make_error(line, column, ParseErrorKind::Lexical, std::move(message))};
  };

  while (i < n) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '\n') {
      if (options.newline_tokens) {
        Token t;
        t.kind = TokenKind::Newline;
        t.line = line;
        t.column = column;
        out.push_back(std::move(t));
      }
      advance(1);
      continue;
    }
    if (c == '#' && options.hash_comments) {
      while (i < n && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = column;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < n && is_ident_char(text[j])) ++j;
      t.kind = TokenKind::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    const bool signed_number =
        (c == '-' || c == '+') && i + 1 < n &&
        (is_digit(text[i + 1]) || (text[i + 1] == '.' && i + 2 < n && is_digit(text[i + 2])));
    if (is_digit(c) || signed_number || (c == '.' && i + 1 < n && is_digit(text[i + 1]))) {
      std::size_t j = i;
      if (text[j] == '-' || text[j] == '+') ++j;
      while (j < n && is_digit(text[j])) ++j;
      if (j < n && text[j] == '.') {
        ++j;
        while (j < n && is_digit(text[j])) ++j;
      }
      if (j < n && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (text[k] == '-' || text[k] == '+')) ++k;
        if (k < n && is_digit(text[k])) {
          while (k < n && is_digit(text[k])) ++k;
          j = k;
        } else {
          lex_error("malformed exponent in number");
        }
      }
      if (j < n && is_ident_char(text[j])) lex_error("malformed number");
      std::size_t begin = i;
      if (text[begin] == '+') ++begin;
      double value = 0.0;
      const auto res = std::from_chars(text.data() + begin, text.data() + j, value);
      if (res.ec != std::errc() || res.ptr != text.data() + j) {
        lex_error("number out of range");
      }
      t.kind = TokenKind::Number;
      t.number = value;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < n) {
        const char d = text[j];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\') {
          if (j + 1 >= n) break;
          const char e = text[j + 1];
          if (e == 'n') value += '\n';
          else if (e == 't') value += '\t';
          else if (e == '"' || e == '\\') value += e;
          else lex_error("unknown escape sequence in string");
          j += 2;
          continue;
        }
        value += d;
        ++j;
      }
      if (!closed) lex_error("unterminated string");
      t.kind = TokenKind::String;
      t.text = std::move(value);
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }
    if (kPunct.find(c) != std::string_view::npos) {
      t.kind = TokenKind::Punct;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    lex_error(std::string("unexpected character '") +
              (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7f
                   ? std::string(1, c)
                   : "\\x" + std::to_string(static_cast<unsigned char>(c))) +
              "'");
  }
  Token end;
  end.kind = TokenKind::End;
  end.line = line;
  end.column = column;
  out.push_back(std::move(end));
  return out;
}

std::string describe(const Token &token) {
  switch (token.kind) {
    case TokenKind::Ident: return "'" + token.text + "'";
    case TokenKind::Number: return "number " + token.text;
    case TokenKind::String: return "string";
    case TokenKind::Punct: return "'" + token.text + "'";
    case TokenKind::Newline: return "end of line";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

const Token &TokenStream::peek(std::size_t ahead) const {
  const std::size_t idx = pos_ + ahead;
  return idx < tokens_.size() ? tokens_[idx] : tokens_.back();
}

const Token &TokenStream::next() {
  const Token &t = peek();
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::is_ident(std::string_view name, std::size_t ahead) const {
  const Token &t = peek(ahead);
  return t.kind == TokenKind::Ident && t.text == name;
}

bool TokenStream::is_punct(char c, std::size_t ahead) const {
  const Token &t = peek(ahead);
  return t.kind == TokenKind::Punct && t.text[0] == c;
}

const Token &TokenStream::expect_ident(std::string_view name) {
  if (!is_ident(name)) {
    fail(peek(), ParseErrorKind::Syntactic,
         "expected '" + std::string(name) + "' but found " + describe(peek()));
  }
  return next();
}

const Token &TokenStream::expect_any_ident() {
  if (peek().kind != TokenKind::Ident) {
    fail(peek(), ParseErrorKind::Syntactic, "expected a name but found " + describe(peek()));
  }
  return next();
}

const Token &TokenStream::expect_punct(char c) {
  if (!is_punct(c)) {
    fail(peek(), ParseErrorKind::Syntactic,
         std::string("expected '") + c + "' but found " + describe(peek()));
  }
  return next();
}

double TokenStream::expect_number() {
  if (peek().kind != TokenKind::Number) {
    fail(peek(), ParseErrorKind::Syntactic, "expected a number but found " + describe(peek()));
  }
  return next().number;
}

std::string TokenStream::expect_string() {
  if (peek().kind != TokenKind::String) {
    fail(peek(), ParseErrorKind::Syntactic, "expected a string but found " + describe(peek()));
  }
  return next().text;
}

void TokenStream::expect_newline() {
  if (peek().kind == TokenKind::End) return;
  if (peek().kind != TokenKind::Newline) {
    fail(peek(), ParseErrorKind::Syntactic, "expected end of line but found " + describe(peek()));
  }
  skip_newlines();
}

void TokenStream::skip_newlines() {
  while (peek().kind == TokenKind::Newline) next();
}

std::pair<int, int> SourceMap::locate(const std::string &path) const {
  std::string probe = path;
  while (!probe.empty()) {
    auto it = positions_.find(probe);
    if (it != positions_.end()) return it->second;
    const auto cut = probe.find_last_of(".[");
    if (cut == std::string::npos) break;
    probe.resize(cut);
  }
  return {1, 1};
}

ParseOutcome finish(CadModel model, const SourceMap &map) {
  const ValidationReport report = validate(model);
  if (!report.ok()) {
    const Violation &v = report.violations.front();
    const auto [line, column] = map.locate(v.path);
    return ParseError{line, column, v.path + ": " + v.message + " (" + v.code + ")",
                      ParseErrorKind::Semantic};
  }
  CadModel canonical = normalize(model);
  if (!canonical.ops.empty()) canonical.ops.front().boolean = BooleanKind::New;
  return canonical;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value == 0.0 ? 0.0 : value);
  return std::string(buf, res.ptr);
}

std::string quote(std::string_view raw) {
  std::string out = "\"";
  for (const char c : raw) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  out += '"';
  return out;
}

std::string path_for(std::size_t op) { return "ops[" + std::to_string(op) + "]"; }
std::string path_for(std::size_t op, std::size_t loop) {
  return path_for(op) + ".profile.loops[" + std::to_string(loop) + "]";
}
std::string path_for(std::size_t op, std::size_t loop, std::size_t curve) {
  return path_for(op, loop) + ".curves[" + std::to_string(curve) + "]";
}

}  // namespace cadseq::detail
