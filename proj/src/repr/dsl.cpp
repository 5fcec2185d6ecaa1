// Line-oriented command language:
//
//   model "optional source"
//     op new
//       frame origin 0 0 0 x_axis 1 0 0 y_axis 0 1 0 z_axis 0 0 1
//       sketch scale 1
//         loop
//           line from 0 0 to 1 0
//           arc from 1 0 to 1 1 sweep 1.5707963268 direction ccw
//           circle center 0.5 0.5 radius 0.25
//         end
//       end
//       extrude toward 1 opposite 0
//     end
//   end
//
// Named parameters may appear in any order; each is required exactly once.

#include <map>
#include <vector>

#include "formats.hpp"
#include "text_support.hpp"

namespace cadseq::detail {

namespace {

struct ParamSpec {
  std::string_view name;
  int numbers;  // count of numeric values; 0 means a single word
};

using Params = std::map<std::string, std::vector<double>>;
using Words = std::map<std::string, std::string>;

void read_params(TokenStream &ts, const Token &statement, std::initializer_list<ParamSpec> specs,
                 Params &numbers, Words &words) {
  while (ts.peek().kind != TokenKind::Newline && !ts.at_end()) {
    const Token &name = ts.expect_any_ident();
    const ParamSpec *spec = nullptr;
    for (const ParamSpec &s : specs) {
      if (s.name == name.text) spec = &s;
    }
    if (!spec) {
      fail(name, ParseErrorKind::Syntactic,
           "unknown parameter '" + name.text + "' for '" + statement.text + "'");
    }
    if (numbers.count(name.text) || words.count(name.text)) {
      fail(name, ParseErrorKind::Syntactic, "duplicate parameter '" + name.text + "'");
    }
    if (spec->numbers == 0) {
      words[name.text] = ts.expect_any_ident().text;
    } else {
      std::vector<double> values;
      for (int k = 0; k < spec->numbers; ++k) values.push_back(ts.expect_number());
      numbers[name.text] = std::move(values);
    }
  }
  for (const ParamSpec &s : specs) {
    const bool present = s.numbers == 0 ? words.count(std::string(s.name)) > 0
                                        : numbers.count(std::string(s.name)) > 0;
    if (!present) {
      fail(ts.peek(), ParseErrorKind::Syntactic,
           "'" + statement.text + "' is missing parameter '" + std::string(s.name) + "'");
    }
  }
  ts.expect_newline();
}

Vec2 v2(const std::vector<double> &v) { return {v[0], v[1]}; }
Vec3 v3(const std::vector<double> &v) { return {v[0], v[1], v[2]}; }

Curve parse_curve(TokenStream &ts) {
  const Token &kw = ts.peek();
  Params p;
  Words w;
  if (ts.is_ident("line")) {
    ts.next();
    read_params(ts, kw, {{"from", 2}, {"to", 2}}, p, w);
    return Line{v2(p["from"]), v2(p["to"])};
  }
  if (ts.is_ident("arc")) {
    ts.next();
    read_params(ts, kw, {{"from", 2}, {"to", 2}, {"sweep", 1}, {"direction", 0}}, p, w);
    const std::string &dir = w["direction"];
    if (dir != "ccw" && dir != "cw") {
      fail(kw, ParseErrorKind::Syntactic, "arc direction must be 'ccw' or 'cw'");
    }
    return Arc{v2(p["from"]), v2(p["to"]), p["sweep"][0], dir == "ccw"};
  }
  if (ts.is_ident("circle")) {
    ts.next();
    read_params(ts, kw, {{"center", 2}, {"radius", 1}}, p, w);
    return Circle{v2(p["center"]), p["radius"][0]};
  }
  fail(kw, ParseErrorKind::Syntactic,
       "expected 'line', 'arc', 'circle' or 'end' but found " + describe(kw));
}

SketchExtrude parse_op(TokenStream &ts, std::size_t index, SourceMap &map) {
  const Token &op_kw = ts.expect_ident("op");
  map.mark(path_for(index), op_kw);
  const Token &kind_tok = ts.expect_any_ident();
  const auto kind = boolean_from_string(kind_tok.text);
  if (!kind) {
    fail(kind_tok, ParseErrorKind::Semantic, "unknown boolean kind '" + kind_tok.text + "'");
  }
  ts.expect_newline();

  SketchExtrude op;
  op.boolean = *kind;
  {
    const Token &kw = ts.expect_ident("frame");
    map.mark(path_for(index) + ".frame", kw);
    Params p;
    Words w;
    read_params(ts, kw, {{"origin", 3}, {"x_axis", 3}, {"y_axis", 3}, {"z_axis", 3}}, p, w);
    op.frame = {v3(p["origin"]), v3(p["x_axis"]), v3(p["y_axis"]), v3(p["z_axis"])};
  }
  {
    const Token &kw = ts.expect_ident("sketch");
    map.mark(path_for(index) + ".profile", kw);
    Params p;
    Words w;
    read_params(ts, kw, {{"scale", 1}}, p, w);
    op.scale = p["scale"][0];
    while (ts.is_ident("loop")) {
      const std::size_t li = op.profile.loops.size();
      map.mark(path_for(index, li), ts.next());
      ts.expect_newline();
      Loop loop;
      while (!ts.is_ident("end")) {
        if (ts.at_end()) fail(ts.peek(), ParseErrorKind::Syntactic, "unterminated loop block");
        map.mark(path_for(index, li, loop.curves.size()), ts.peek());
        loop.curves.push_back(parse_curve(ts));
      }
      ts.next();
      ts.expect_newline();
      op.profile.loops.push_back(std::move(loop));
    }
    ts.expect_ident("end");
    ts.expect_newline();
  }
  {
    const Token &kw = ts.expect_ident("extrude");
    map.mark(path_for(index) + ".extrude_toward", kw);
    map.mark(path_for(index) + ".extrude_opposite", kw);
    Params p;
    Words w;
    read_params(ts, kw, {{"toward", 1}, {"opposite", 1}}, p, w);
    op.extrude_toward = p["toward"][0];
    op.extrude_opposite = p["opposite"][0];
  }
  ts.expect_ident("end");
  ts.expect_newline();
  return op;
}

}  // namespace

ParseOutcome parse_dsl(std::string_view text) {
  try {
    TokenStream ts(tokenize(text, {.hash_comments = true, .newline_tokens = true}));
    SourceMap map;
    CadModel model;
    ts.skip_newlines();
    ts.expect_ident("model");
    if (ts.peek().kind == TokenKind::String) model.source = ts.expect_string();
    ts.expect_newline();
    while (ts.is_ident("op")) model.ops.push_back(parse_op(ts, model.ops.size(), map));
    if (!ts.is_ident("end")) {
      fail(ts.peek(), ParseErrorKind::Syntactic,
           "expected 'op' or 'end' but found " + describe(ts.peek()));
    }
    ts.next();
    ts.expect_newline();
    if (!ts.at_end()) {
      fail(ts.peek(), ParseErrorKind::Syntactic,
           "unexpected " + describe(ts.peek()) + " after the model");
    }
    return finish(std::move(model), map);
  } catch (const ParseFailure &f) {
    return f.error;
  }
}

std::string print_dsl(const CadModel &model) {
  std::string out = "model";
  if (model.source) out += " " + quote(*model.source);
  out += "\n";
  auto nums = [](std::initializer_list<double> values) {
    std::string s;
    for (const double v : values) s += " " + format_number(v);
    return s;
  };
  for (const SketchExtrude &op : model.ops) {
    const CoordinateFrame &f = op.frame;
    out += "  op " + std::string(to_string(op.boolean)) + "\n";
    out += "    frame origin" + nums({f.origin.x, f.origin.y, f.origin.z}) + " x_axis" +
           nums({f.axis_x.x, f.axis_x.y, f.axis_x.z}) + " y_axis" +
           nums({f.axis_y.x, f.axis_y.y, f.axis_y.z}) + " z_axis" +
           nums({f.axis_z.x, f.axis_z.y, f.axis_z.z}) + "\n";
    out += "    sketch scale" + nums({op.scale}) + "\n";
    for (const Loop &loop : op.profile.loops) {
      out += "      loop\n";
      for (const Curve &curve : loop.curves) {
        out += "        ";
        if (const auto *line = std::get_if<Line>(&curve)) {
          out += "line from" + nums({line->start.x, line->start.y}) + " to" +
                 nums({line->end.x, line->end.y});
        } else if (const auto *arc = std::get_if<Arc>(&curve)) {
          out += "arc from" + nums({arc->start.x, arc->start.y}) + " to" +
                 nums({arc->end.x, arc->end.y}) + " sweep" + nums({arc->sweep}) +
                 " direction " + (arc->counterclockwise ? "ccw" : "cw");
        } else {
          const auto &circle = std::get<Circle>(curve);
          out += "circle center" + nums({circle.center.x, circle.center.y}) + " radius" +
                 nums({circle.radius});
        }
        out += "\n";
      }
      out += "      end\n";
    }
    out += "    end\n";
    out += "    extrude toward" + nums({op.extrude_toward}) + " opposite" +
           nums({op.extrude_opposite}) + "\n";
    out += "  end\n";
  }
  out += "end\n";
  return out;
}

}  // namespace cadseq::detail
