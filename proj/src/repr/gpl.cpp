// Restricted fluent builder script. It is parsed as data and never executed.
//
//   import cadquery as cq
//
//   model = cq.Model(source="optional")
//   model = model.new(
//       cq.Workplane(origin=(0, 0, 0), xDir=(1, 0, 0), yDir=(0, 1, 0), normal=(0, 0, 1))
//       .scale(1)
//       .moveTo(0, 0).lineTo(1, 0).arcTo(1, 1, sweep=1.57, ccw=True).close()
//       .moveTo(0.5, 0.5).circle(0.25)
//       .extrude(1, opposite=0)
//   )
//
// Boolean methods: new, union, cut, intersect. close() adds a closing line
// when the chain does not already end at its moveTo point.

#include "formats.hpp"
#include "text_support.hpp"

namespace cadseq::detail {

namespace {

struct BooleanMethod {
  std::string_view name;
  BooleanKind kind;
};

constexpr BooleanMethod kMethods[] = {{"new", BooleanKind::New},
                                      {"union", BooleanKind::Join},
                                      {"cut", BooleanKind::Cut},
                                      {"intersect", BooleanKind::Intersect}};

std::string_view method_for(BooleanKind kind) {
  for (const auto &m : kMethods) {
    if (m.kind == kind) return m.name;
  }
  return "new";
}

class Parser {
 public:
  explicit Parser(std::string_view text)
      : ts_(tokenize(text, {.hash_comments = true, .newline_tokens = false})) {}

  CadModel run() {
    ts_.expect_ident("import");
    ts_.expect_ident("cadquery");
    ts_.expect_ident("as");
    ts_.expect_ident("cq");

    CadModel model;
    ts_.expect_ident("model");
    ts_.expect_punct('=');
    ts_.expect_ident("cq");
    ts_.expect_punct('.');
    ts_.expect_ident("Model");
    ts_.expect_punct('(');
    if (ts_.is_ident("source")) {
      ts_.next();
      ts_.expect_punct('=');
      model.source = ts_.expect_string();
    }
    ts_.expect_punct(')');

    while (!ts_.at_end()) model.ops.push_back(op_statement(model.ops.size()));
    return model;
  }

  const SourceMap &map() const { return map_; }

 private:
  double keyword_number(std::string_view name) {
    ts_.expect_ident(name);
    ts_.expect_punct('=');
    return ts_.expect_number();
  }

  Vec3 keyword_vec3(std::string_view name) {
    ts_.expect_ident(name);
    ts_.expect_punct('=');
    ts_.expect_punct('(');
    Vec3 v;
    v.x = ts_.expect_number();
    ts_.expect_punct(',');
    v.y = ts_.expect_number();
    ts_.expect_punct(',');
    v.z = ts_.expect_number();
    ts_.expect_punct(')');
    return v;
  }

  Vec2 point_args() {
    Vec2 p;
    p.x = ts_.expect_number();
    ts_.expect_punct(',');
    p.y = ts_.expect_number();
    return p;
  }

  const Token &method(std::string_view name) {
    ts_.expect_punct('.');
    const Token &t = ts_.expect_ident(name);
    ts_.expect_punct('(');
    return t;
  }

  SketchExtrude op_statement(std::size_t index) {
    const Token &start = ts_.expect_ident("model");
    map_.mark(path_for(index), start);
    ts_.expect_punct('=');
    ts_.expect_ident("model");
    ts_.expect_punct('.');
    const Token &kind_tok = ts_.expect_any_ident();
    SketchExtrude op;
    bool known = false;
    for (const auto &m : kMethods) {
      if (m.name == kind_tok.text) {
        op.boolean = m.kind;
        known = true;
      }
    }
    if (!known) {
      fail(kind_tok, ParseErrorKind::Syntactic,
           "expected new, union, cut or intersect but found '" + kind_tok.text + "'");
    }
    ts_.expect_punct('(');

    ts_.expect_ident("cq");
    ts_.expect_punct('.');
    map_.mark(path_for(index) + ".frame", ts_.expect_ident("Workplane"));
    ts_.expect_punct('(');
    op.frame.origin = keyword_vec3("origin");
    ts_.expect_punct(',');
    op.frame.axis_x = keyword_vec3("xDir");
    ts_.expect_punct(',');
    op.frame.axis_y = keyword_vec3("yDir");
    ts_.expect_punct(',');
    op.frame.axis_z = keyword_vec3("normal");
    ts_.expect_punct(')');

    map_.mark(path_for(index) + ".profile", method("scale"));
    op.scale = ts_.expect_number();
    ts_.expect_punct(')');

    while (ts_.is_punct('.') && ts_.is_ident("moveTo", 1)) {
      const std::size_t li = op.profile.loops.size();
      map_.mark(path_for(index, li), ts_.peek(1));
      op.profile.loops.push_back(loop(index, li));
    }

    const Token &extrude = method("extrude");
    map_.mark(path_for(index) + ".extrude_toward", extrude);
    map_.mark(path_for(index) + ".extrude_opposite", extrude);
    op.extrude_toward = ts_.expect_number();
    ts_.expect_punct(',');
    op.extrude_opposite = keyword_number("opposite");
    ts_.expect_punct(')');
    ts_.expect_punct(')');
    return op;
  }

  Loop loop(std::size_t op, std::size_t li) {
    method("moveTo");
    const Vec2 first = point_args();
    ts_.expect_punct(')');
    Loop loop;
    if (ts_.is_punct('.') && ts_.is_ident("circle", 1)) {
      map_.mark(path_for(op, li, 0), ts_.peek(1));
      method("circle");
      loop.curves.push_back(Circle{first, ts_.expect_number()});
      ts_.expect_punct(')');
      return loop;
    }
    Vec2 cursor = first;
    while (true) {
      if (!ts_.is_punct('.')) {
        fail(ts_.peek(), ParseErrorKind::Syntactic,
             "expected '.' but found " + describe(ts_.peek()));
      }
      const Token &name = ts_.peek(1);
      map_.mark(path_for(op, li, loop.curves.size()), name);
      if (ts_.is_ident("lineTo", 1)) {
        method("lineTo");
        const Vec2 end = point_args();
        ts_.expect_punct(')');
        loop.curves.push_back(Line{cursor, end});
        cursor = end;
      } else if (ts_.is_ident("arcTo", 1)) {
        method("arcTo");
        const Vec2 end = point_args();
        ts_.expect_punct(',');
        const double sweep = keyword_number("sweep");
        ts_.expect_punct(',');
        ts_.expect_ident("ccw");
        ts_.expect_punct('=');
        const Token &flag = ts_.expect_any_ident();
        if (flag.text != "True" && flag.text != "False") {
          fail(flag, ParseErrorKind::Syntactic, "expected True or False but found '" + flag.text + "'");
        }
        ts_.expect_punct(')');
        loop.curves.push_back(Arc{cursor, end, sweep, flag.text == "True"});
        cursor = end;
      } else if (ts_.is_ident("close", 1)) {
        method("close");
        ts_.expect_punct(')');
        if (!(cursor == first)) loop.curves.push_back(Line{cursor, first});
        return loop;
      } else {
        fail(name, ParseErrorKind::Syntactic,
             "expected lineTo, arcTo or close but found " + describe(name));
      }
    }
  }

  TokenStream ts_;
  SourceMap map_;
};

std::string args(std::initializer_list<double> values) {
  std::string s;
  bool first = true;
  for (const double v : values) {
    if (!first) s += ", ";
    s += format_number(v);
    first = false;
  }
  return s;
}

}  // namespace

ParseOutcome parse_gpl(std::string_view text) {
  try {
    Parser parser(text);
    CadModel model = parser.run();
    return finish(std::move(model), parser.map());
  } catch (const ParseFailure &f) {
    return f.error;
  }
}

std::string print_gpl(const CadModel &model) {
  std::string out = "import cadquery as cq\n\n";
  out += "model = cq.Model(";
  if (model.source) out += "source=" + quote(*model.source);
  out += ")\n";
  for (const SketchExtrude &op : model.ops) {
    const CoordinateFrame &f = op.frame;
    out += "model = model." + std::string(method_for(op.boolean)) + "(\n";
    out += "    cq.Workplane(origin=(" + args({f.origin.x, f.origin.y, f.origin.z}) +
           "), xDir=(" + args({f.axis_x.x, f.axis_x.y, f.axis_x.z}) + "), yDir=(" +
           args({f.axis_y.x, f.axis_y.y, f.axis_y.z}) + "), normal=(" +
           args({f.axis_z.x, f.axis_z.y, f.axis_z.z}) + "))\n";
    out += "    .scale(" + format_number(op.scale) + ")\n";
    for (const Loop &loop : op.profile.loops) {
      out += "    ";
      if (const auto *c = std::get_if<Circle>(&loop.curves.front())) {
        out += ".moveTo(" + args({c->center.x, c->center.y}) + ").circle(" +
               format_number(c->radius) + ")\n";
        continue;
      }
      const Vec2 s = curve_start(loop.curves.front());
      out += ".moveTo(" + args({s.x, s.y}) + ")";
      // A trailing line back to the start is implied by close().
      std::size_t count = loop.curves.size();
      if (std::holds_alternative<Line>(loop.curves.back())) --count;
      for (std::size_t k = 0; k < count; ++k) {
        const Curve &curve = loop.curves[k];
        if (const auto *l = std::get_if<Line>(&curve)) {
          out += ".lineTo(" + args({l->end.x, l->end.y}) + ")";
        } else {
          const auto &a = std::get<Arc>(curve);
          out += ".arcTo(" + args({a.end.x, a.end.y}) + ", sweep=" + format_number(a.sweep) +
                 ", ccw=" + (a.counterclockwise ? "True" : "False") + ")";
        }
      }
      out += ".close()\n";
    }
    out += "    .extrude(" + format_number(op.extrude_toward) +
           ", opposite=" + format_number(op.extrude_opposite) + ")\n";
    out += ")\n";
  }
  return out;
}

}  // namespace cadseq::detail
