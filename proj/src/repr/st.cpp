// Marker-tagged structured text. Every hierarchy level is a <name>...</name>
// pair; attributes are `key=value` items inside the pair.
//
//   <model> source="optional"
//     <operation>
//       <frame> origin=(0, 0, 0) x_axis=(1, 0, 0) y_axis=(0, 1, 0) z_axis=(0, 0, 1) </frame>
//       <sketch> scale=1
//         <loop>
//           <line> start=(0, 0) end=(1, 0) </line>
//           <arc> start=(1, 0) end=(1, 1) sweep=1.5707963268 direction=ccw </arc>
//           <circle> center=(0.5, 0.5) radius=0.25 </circle>
//         </loop>
//       </sketch>
//       <extrude> boolean=new toward=1 opposite=0 </extrude>
//     </operation>
//   </model>

#include <memory>
#include <vector>

#include "cadseq/error.hpp"
#include "formats.hpp"
#include "text_support.hpp"

namespace cadseq::detail {

namespace {

constexpr std::size_t kMaxDepth = 32;

struct Value {
  enum class Kind { Number, Word, String, Tuple } kind = Kind::Number;
  double number = 0.0;
  std::string text;
  std::vector<double> tuple;
};

struct Attribute {
  Token name;
  Value value;
};

struct Element {
  Token open;  // the name token of the opening marker
  std::vector<Attribute> attributes;
  std::vector<std::unique_ptr<Element>> children;
};

Value read_value(TokenStream &ts) {
  Value v;
  const Token &t = ts.peek();
  if (t.kind == TokenKind::Number) {
    v.number = ts.next().number;
  } else if (t.kind == TokenKind::Ident) {
    v.kind = Value::Kind::Word;
    v.text = ts.next().text;
  } else if (t.kind == TokenKind::String) {
    v.kind = Value::Kind::String;
    v.text = ts.next().text;
  } else if (ts.is_punct('(')) {
    ts.next();
    v.kind = Value::Kind::Tuple;
    v.tuple.push_back(ts.expect_number());
    while (ts.is_punct(',')) {
      ts.next();
      v.tuple.push_back(ts.expect_number());
    }
    ts.expect_punct(')');
  } else {
    fail(t, ParseErrorKind::Syntactic, "expected an attribute value but found " + describe(t));
  }
  return v;
}

std::string where(const Token &t) {
  return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column);
}

// Builds the element tree with an explicit stack so nesting depth never
// touches the call stack.
std::unique_ptr<Element> read_tree(TokenStream &ts) {
  std::vector<std::unique_ptr<Element>> stack;
  std::unique_ptr<Element> root;
  while (true) {
    const Token &t = ts.peek();
    if (t.kind == TokenKind::End) {
      if (stack.empty()) {
        fail(t, ParseErrorKind::Syntactic, "expected '<model>' but found end of input");
      }
      const Token &open = stack.back()->open;
      fail(t, ParseErrorKind::Syntactic,
           "unclosed tag <" + open.text + "> opened at " + where(open));
    }
    if (ts.is_punct('<') && ts.is_punct('/', 1)) {
      ts.next();
      ts.next();
      const Token &name = ts.expect_any_ident();
      if (stack.empty()) {
        fail(name, ParseErrorKind::Syntactic, "closing tag </" + name.text + "> without an opening tag");
      }
      if (name.text != stack.back()->open.text) {
        const Token &open = stack.back()->open;
        fail(name, ParseErrorKind::Syntactic,
             "unclosed tag <" + open.text + "> opened at " + where(open) + ": found </" +
                 name.text + ">");
      }
      ts.expect_punct('>');
      std::unique_ptr<Element> done = std::move(stack.back());
      stack.pop_back();
      if (stack.empty()) {
        root = std::move(done);
        break;
      }
      stack.back()->children.push_back(std::move(done));
      continue;
    }
    if (ts.is_punct('<')) {
      ts.next();
      auto element = std::make_unique<Element>();
      element->open = ts.expect_any_ident();
      ts.expect_punct('>');
      if (stack.size() >= kMaxDepth) {
        fail(element->open, ParseErrorKind::Syntactic, "markers nested too deeply");
      }
      stack.push_back(std::move(element));
      continue;
    }
    if (stack.empty()) {
      fail(t, ParseErrorKind::Syntactic, "expected '<' but found " + describe(t));
    }
    Attribute attr;
    attr.name = ts.expect_any_ident();
    ts.expect_punct('=');
    attr.value = read_value(ts);
    stack.back()->attributes.push_back(std::move(attr));
  }
  return root;
}

class Attributes {
 public:
  explicit Attributes(const Element &e) : element_(e) {
    for (std::size_t i = 0; i < e.attributes.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (e.attributes[j].name.text == e.attributes[i].name.text) {
          fail(e.attributes[i].name, ParseErrorKind::Syntactic,
               "duplicate attribute '" + e.attributes[i].name.text + "'");
        }
      }
    }
  }

  // Every attribute must be consumed by the time the element is interpreted.
  void allow(std::initializer_list<std::string_view> names) const {
    for (const Attribute &a : element_.attributes) {
      bool known = false;
      for (const auto n : names) known = known || n == a.name.text;
      if (!known) {
        fail(a.name, ParseErrorKind::Syntactic,
             "unknown attribute '" + a.name.text + "' in <" + element_.open.text + ">");
      }
    }
  }

  const Attribute *find(std::string_view name) const {
    for (const Attribute &a : element_.attributes) {
      if (a.name.text == name) return &a;
    }
    return nullptr;
  }

  const Attribute &require(std::string_view name) const {
    const Attribute *a = find(name);
    if (!a) {
      fail(element_.open, ParseErrorKind::Syntactic,
           "<" + element_.open.text + "> is missing attribute '" + std::string(name) + "'");
    }
    return *a;
  }

  double number(std::string_view name) const {
    const Attribute &a = require(name);
    if (a.value.kind != Value::Kind::Number) {
      fail(a.name, ParseErrorKind::Syntactic, "attribute '" + a.name.text + "' must be a number");
    }
    return a.value.number;
  }

  std::vector<double> tuple(std::string_view name, std::size_t arity) const {
    const Attribute &a = require(name);
    if (a.value.kind != Value::Kind::Tuple || a.value.tuple.size() != arity) {
      fail(a.name, ParseErrorKind::Syntactic,
           "attribute '" + a.name.text + "' must be a tuple of " + std::to_string(arity) +
               " numbers");
    }
    return a.value.tuple;
  }

  Vec2 vec2(std::string_view name) const {
    const auto t = tuple(name, 2);
    return {t[0], t[1]};
  }

  Vec3 vec3(std::string_view name) const {
    const auto t = tuple(name, 3);
    return {t[0], t[1], t[2]};
  }

  std::string word(std::string_view name) const {
    const Attribute &a = require(name);
    if (a.value.kind != Value::Kind::Word) {
      fail(a.name, ParseErrorKind::Syntactic, "attribute '" + a.name.text + "' must be a word");
    }
    return a.value.text;
  }

 private:
  const Element &element_;
};

void expect_name(const Element &e, std::string_view name) {
  if (e.open.text != name) {
    fail(e.open, ParseErrorKind::Syntactic,
         "expected <" + std::string(name) + "> but found <" + e.open.text + ">");
  }
}

void expect_leaf(const Element &e) {
  if (!e.children.empty()) {
    fail(e.children.front()->open, ParseErrorKind::Syntactic,
         "<" + e.open.text + "> cannot contain <" + e.children.front()->open.text + ">");
  }
}

Curve read_curve(const Element &e) {
  expect_leaf(e);
  const Attributes a(e);
  if (e.open.text == "line") {
    a.allow({"start", "end"});
    return Line{a.vec2("start"), a.vec2("end")};
  }
  if (e.open.text == "arc") {
    a.allow({"start", "end", "sweep", "direction"});
    const std::string dir = a.word("direction");
    if (dir != "ccw" && dir != "cw") {
      fail(a.require("direction").name, ParseErrorKind::Syntactic,
           "arc direction must be 'ccw' or 'cw'");
    }
    return Arc{a.vec2("start"), a.vec2("end"), a.number("sweep"), dir == "ccw"};
  }
  if (e.open.text == "circle") {
    a.allow({"center", "radius"});
    return Circle{a.vec2("center"), a.number("radius")};
  }
  fail(e.open, ParseErrorKind::Syntactic,
       "expected <line>, <arc> or <circle> but found <" + e.open.text + ">");
}

Loop read_loop(const Element &e, SourceMap *map, std::size_t op, std::size_t loop_index) {
  expect_name(e, "loop");
  Attributes(e).allow({});
  Loop loop;
  for (const auto &child : e.children) {
    if (map) map->mark(path_for(op, loop_index, loop.curves.size()), child->open);
    loop.curves.push_back(read_curve(*child));
  }
  return loop;
}

SketchExtrude read_op(const Element &e, SourceMap *map, std::size_t index) {
  expect_name(e, "operation");
  Attributes(e).allow({});
  if (map) map->mark(path_for(index), e.open);
  if (e.children.size() != 3) {
    fail(e.open, ParseErrorKind::Syntactic,
         "<operation> must contain <frame>, <sketch> and <extrude> in that order");
  }
  SketchExtrude op;
  {
    const Element &frame = *e.children[0];
    expect_name(frame, "frame");
    expect_leaf(frame);
    if (map) map->mark(path_for(index) + ".frame", frame.open);
    const Attributes a(frame);
    a.allow({"origin", "x_axis", "y_axis", "z_axis"});
    op.frame = {a.vec3("origin"), a.vec3("x_axis"), a.vec3("y_axis"), a.vec3("z_axis")};
  }
  {
    const Element &sketch = *e.children[1];
    expect_name(sketch, "sketch");
    if (map) map->mark(path_for(index) + ".profile", sketch.open);
    const Attributes a(sketch);
    a.allow({"scale"});
    op.scale = a.number("scale");
    for (const auto &child : sketch.children) {
      const std::size_t li = op.profile.loops.size();
      if (map) map->mark(path_for(index, li), child->open);
      op.profile.loops.push_back(read_loop(*child, map, index, li));
    }
  }
  {
    const Element &extrude = *e.children[2];
    expect_name(extrude, "extrude");
    expect_leaf(extrude);
    if (map) {
      map->mark(path_for(index) + ".extrude_toward", extrude.open);
      map->mark(path_for(index) + ".extrude_opposite", extrude.open);
    }
    const Attributes a(extrude);
    a.allow({"boolean", "toward", "opposite"});
    const std::string kind = a.word("boolean");
    const auto boolean = boolean_from_string(kind);
    if (!boolean) {
      fail(a.require("boolean").name, ParseErrorKind::Semantic,
           "unknown boolean kind '" + kind + "'");
    }
    op.boolean = *boolean;
    op.extrude_toward = a.number("toward");
    op.extrude_opposite = a.number("opposite");
  }
  return op;
}

std::unique_ptr<Element> read_single_tree(std::string_view text) {
  TokenStream ts(tokenize(text, {.hash_comments = false, .newline_tokens = false}));
  auto root = read_tree(ts);
  if (!ts.at_end()) {
    fail(ts.peek(), ParseErrorKind::Syntactic,
         "unexpected " + describe(ts.peek()) + " after the closing marker");
  }
  return root;
}

struct Printer {
  std::string out;
  bool compact = false;
  int depth = 0;

  void line(const std::string &text) {
    if (compact) {
      if (!out.empty()) out += ' ';
      out += text;
    } else {
      out.append(static_cast<std::size_t>(depth) * 2, ' ');
      out += text;
      out += '\n';
    }
  }
};

std::string tuple(std::initializer_list<double> values) {
  std::string s = "(";
  bool first = true;
  for (const double v : values) {
    if (!first) s += ", ";
    s += format_number(v);
    first = false;
  }
  return s + ")";
}

void print_curve(Printer &p, const Curve &curve) {
  if (const auto *l = std::get_if<Line>(&curve)) {
    p.line("<line> start=" + tuple({l->start.x, l->start.y}) +
           " end=" + tuple({l->end.x, l->end.y}) + " </line>");
  } else if (const auto *a = std::get_if<Arc>(&curve)) {
    p.line("<arc> start=" + tuple({a->start.x, a->start.y}) +
           " end=" + tuple({a->end.x, a->end.y}) + " sweep=" + format_number(a->sweep) +
           " direction=" + (a->counterclockwise ? "ccw" : "cw") + " </arc>");
  } else {
    const auto &c = std::get<Circle>(curve);
    p.line("<circle> center=" + tuple({c.center.x, c.center.y}) +
           " radius=" + format_number(c.radius) + " </circle>");
  }
}

void print_loop(Printer &p, const Loop &loop) {
  p.line("<loop>");
  ++p.depth;
  for (const Curve &c : loop.curves) print_curve(p, c);
  --p.depth;
  p.line("</loop>");
}

void print_op(Printer &p, const SketchExtrude &op) {
  const CoordinateFrame &f = op.frame;
  p.line("<operation>");
  ++p.depth;
  p.line("<frame> origin=" + tuple({f.origin.x, f.origin.y, f.origin.z}) +
         " x_axis=" + tuple({f.axis_x.x, f.axis_x.y, f.axis_x.z}) +
         " y_axis=" + tuple({f.axis_y.x, f.axis_y.y, f.axis_y.z}) +
         " z_axis=" + tuple({f.axis_z.x, f.axis_z.y, f.axis_z.z}) + " </frame>");
  p.line("<sketch> scale=" + format_number(op.scale));
  ++p.depth;
  for (const Loop &loop : op.profile.loops) print_loop(p, loop);
  --p.depth;
  p.line("</sketch>");
  p.line("<extrude> boolean=" + std::string(to_string(op.boolean)) +
         " toward=" + format_number(op.extrude_toward) +
         " opposite=" + format_number(op.extrude_opposite) + " </extrude>");
  --p.depth;
  p.line("</operation>");
}

}  // namespace

ParseOutcome parse_st(std::string_view text) {
  try {
    const auto root = read_single_tree(text);
    expect_name(*root, "model");
    const Attributes a(*root);
    a.allow({"source"});
    CadModel model;
    if (const Attribute *src = a.find("source")) {
      if (src->value.kind != Value::Kind::String) {
        fail(src->name, ParseErrorKind::Syntactic, "attribute 'source' must be a string");
      }
      model.source = src->value.text;
    }
    SourceMap map;
    for (const auto &child : root->children) {
      model.ops.push_back(read_op(*child, &map, model.ops.size()));
    }
    return finish(std::move(model), map);
  } catch (const ParseFailure &f) {
    return f.error;
  }
}

std::string print_st(const CadModel &model) {
  Printer p;
  p.line(model.source ? "<model> source=" + quote(*model.source) : std::string("<model>"));
  ++p.depth;
  for (const SketchExtrude &op : model.ops) print_op(p, op);
  --p.depth;
  p.line("</model>");
  return p.out;
}

}  // namespace cadseq::detail

namespace cadseq {

namespace {

[[noreturn]] void throw_fragment(const detail::ParseFailure &f, std::string_view what) {
  throw Error(ErrorCode::ParseFailed,
              "malformed " + std::string(what) + " fragment: " + f.error.describe());
}

}  // namespace

std::string print_op_fragment(const SketchExtrude &op) {
  detail::Printer p;
  p.compact = true;
  detail::print_op(p, op);
  return p.out;
}

std::string print_loop_fragment(const Loop &loop) {
  detail::Printer p;
  p.compact = true;
  detail::print_loop(p, loop);
  return p.out;
}

SketchExtrude parse_op_fragment(std::string_view text) {
  try {
    const auto root = detail::read_single_tree(text);
    return detail::read_op(*root, nullptr, 0);
  } catch (const detail::ParseFailure &f) {
    throw_fragment(f, "operation");
  }
}

Loop parse_loop_fragment(std::string_view text) {
  try {
    const auto root = detail::read_single_tree(text);
    return detail::read_loop(*root, nullptr, 0, 0);
  } catch (const detail::ParseFailure &f) {
    throw_fragment(f, "loop");
  }
}

std::optional<ParseError> check_markers(std::string_view text) {
  struct Open {
    std::string name;
    int line;
    int column;
  };
  std::vector<Open> stack;
  int line = 1;
  int column = 1;
  auto is_name_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '<') {
      std::size_t j = i + 1;
      const bool closing = j < text.size() && text[j] == '/';
      if (closing) ++j;
      const std::size_t name_begin = j;
      while (j < text.size() && is_name_char(text[j])) ++j;
      if (j > name_begin && j < text.size() && text[j] == '>') {
        std::string name(text.substr(name_begin, j - name_begin));
        if (!closing) {
          stack.push_back({std::move(name), line, column});
        } else if (stack.empty()) {
          return ParseError{line, column, "closing tag </" + name + "> without an opening tag",
                            ParseErrorKind::Syntactic};
        } else if (stack.back().name != name) {
          const Open &open = stack.back();
          return ParseError{line, column,
                            "unclosed tag <" + open.name + "> opened at line " +
                                std::to_string(open.line) + ", column " +
                                std::to_string(open.column) + ": found </" + name + ">",
                            ParseErrorKind::Syntactic};
        } else {
          stack.pop_back();
        }
      }
    }
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  if (!stack.empty()) {
    const Open &open = stack.back();
    return ParseError{line, column,
                      "unclosed tag <" + open.name + "> opened at line " +
                          std::to_string(open.line) + ", column " + std::to_string(open.column),
                      ParseErrorKind::Syntactic};
  }
  return std::nullopt;
}

}  // namespace cadseq
