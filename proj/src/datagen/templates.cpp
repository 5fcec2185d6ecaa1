#include <charconv>
#include <regex>
#include <sstream>

#include "cadseq/canonical.hpp"
#include "cadseq/datagen.hpp"
#include "cadseq/error.hpp"
#include "cadseq/validate.hpp"

namespace cadseq {

namespace {

std::string num(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string pair(Vec2 v) { return "(" + num(v.x) + ", " + num(v.y) + ")"; }
std::string triple(Vec3 v) { return "(" + num(v.x) + ", " + num(v.y) + ", " + num(v.z) + ")"; }

std::string_view verb(BooleanKind kind) {
  switch (kind) {
    case BooleanKind::New: return "creates a new body";
    case BooleanKind::Join: return "joins material";
    case BooleanKind::Cut: return "cuts material";
    case BooleanKind::Intersect: return "intersects the model";
  }
  return "";
}

std::string step_sentence(const SketchExtrude &op, std::size_t step) {
  return "Step " + std::to_string(step) + " " + std::string(verb(op.boolean)) + " by extruding " +
         num(op.extrude_toward) + " along the normal and " + num(op.extrude_opposite) +
         " opposite it, on a plane with origin " + triple(op.frame.origin) + ", x axis " + triple(op.frame.axis_x) +
         ", y axis " + triple(op.frame.axis_y) + " and normal " + triple(op.frame.axis_z) + ", at sketch scale " +
         num(op.scale) + ".";
}

std::string curve_body(const Curve &curve) {
  return std::visit(
      [](const auto &c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Line>) {
          return "a line from " + pair(c.start) + " to " + pair(c.end) + ".";
        } else if constexpr (std::is_same_v<T, Arc>) {
          return std::string("a ") + (c.counterclockwise ? "counterclockwise" : "clockwise") + " arc from " +
                 pair(c.start) + " to " + pair(c.end) + " sweeping " + num(c.sweep) + " radians.";
        } else {
          return "a circle centered at " + pair(c.center) + " with radius " + num(c.radius) + ".";
        }
      },
      curve);
}

void loop_sentences(const Loop &loop, std::size_t index, std::string &out) {
  for (std::size_t k = 0; k < loop.curves.size(); ++k) {
    std::string lead;
    if (k > 0) {
      lead = "Continue with ";
    } else if (index == 0) {
      lead = "Start the outer boundary with ";
    } else {
      lead = "Start hole " + std::to_string(index) + " with ";
    }
    out += lead + curve_body(loop.curves[k]) + "\n";
  }
}

void op_sentences(const SketchExtrude &op, std::size_t step, std::string &out) {
  out += step_sentence(op, step) + "\n";
  for (std::size_t j = 0; j < op.profile.loops.size(); ++j) loop_sentences(op.profile.loops[j], j, out);
}

// ---------------------------------------------------------------- parsing

const std::string kNum = R"(([-+0-9.eE]+|-?inf|nan))";
const std::string kPair = R"(\()" + kNum + ", " + kNum + R"(\))";
const std::string kTriple = R"(\()" + kNum + ", " + kNum + ", " + kNum + R"(\))";

const std::regex &step_re() {
  static const std::regex re("Step ([0-9]+) (creates a new body|joins material|cuts material|intersects the model)"
                             " by extruding " +
                             kNum + " along the normal and " + kNum + " opposite it, on a plane with origin " +
                             kTriple + ", x axis " + kTriple + ", y axis " + kTriple + " and normal " + kTriple +
                             ", at sketch scale " + kNum + R"(\.)");
  return re;
}

const std::regex &curve_re() {
  static const std::regex re(R"((Start the outer boundary|Start hole ([0-9]+)|Continue) with (.*))");
  return re;
}

const std::regex &line_re() {
  static const std::regex re("a line from " + kPair + " to " + kPair + R"(\.)");
  return re;
}

const std::regex &arc_re() {
  static const std::regex re("a (counterclockwise|clockwise) arc from " + kPair + " to " + kPair + " sweeping " +
                             kNum + R"( radians\.)");
  return re;
}

const std::regex &circle_re() {
  static const std::regex re("a circle centered at " + kPair + " with radius " + kNum + R"(\.)");
  return re;
}

[[noreturn]] void fail(std::size_t line, const std::string &message) {
  throw Error(ErrorCode::ParseFailed, "template line " + std::to_string(line) + ": " + message);
}

double to_double(const std::string &s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "bad number '" + s + "'");
  return v;
}

Vec3 to_vec3(const std::smatch &m, std::size_t first, std::size_t line) {
  return {to_double(m[first], line), to_double(m[first + 1], line), to_double(m[first + 2], line)};
}

Vec2 to_vec2(const std::smatch &m, std::size_t first, std::size_t line) {
  return {to_double(m[first], line), to_double(m[first + 1], line)};
}

BooleanKind kind_from_verb(const std::string &v) {
  if (v == "creates a new body") return BooleanKind::New;
  if (v == "joins material") return BooleanKind::Join;
  if (v == "cuts material") return BooleanKind::Cut;
  return BooleanKind::Intersect;
}

// ---------------------------------------------------------------- edits

std::string step_ref(const std::string &index) { return "step " + std::to_string(std::stoul(index) + 1); }

std::string describe_path(const std::string &path) {
  static const std::regex op_re(R"(ops\[([0-9]+)\]\.(.*))");
  static const std::regex frame_re(R"(frame\.(origin|axis_x|axis_y|axis_z)\.([xyz]))");
  static const std::regex curve_re(R"(profile\.loops\[([0-9]+)\]\.curves\[([0-9]+)\]\.(.*))");
  std::smatch m;
  if (!std::regex_match(path, m, op_re)) return path;
  const std::string step = step_ref(m[1]);
  const std::string rest = m[2];
  if (rest == "boolean") return "the boolean operation of " + step;
  if (rest == "scale") return "the sketch scale of " + step;
  if (rest == "extrude_toward") return "the extrusion along the normal of " + step;
  if (rest == "extrude_opposite") return "the extrusion opposite the normal of " + step;
  std::smatch f;
  if (std::regex_match(rest, f, frame_re)) {
    const std::string which = f[1];
    if (which == "origin") return "the " + std::string(f[2]) + " coordinate of the plane origin of " + step;
    const std::string axis = which == "axis_z" ? "normal" : (which == "axis_x" ? "x axis" : "y axis");
    return "the " + std::string(f[2]) + " component of the plane " + axis + " of " + step;
  }
  if (std::regex_match(rest, f, curve_re)) {
    const std::size_t loop = std::stoul(f[1]);
    const std::string loop_name = loop == 0 ? "the outer boundary" : "hole " + std::to_string(loop);
    std::string field = f[3];
    if (field == "radius") {
      field = "radius";
    } else if (field == "sweep") {
      field = "sweep angle";
    } else if (field == "counterclockwise") {
      field = "direction";
    } else {
      const auto dot = field.find('.');
      field = field.substr(0, dot) + " " + field.substr(dot + 1) + " coordinate";
    }
    return "the " + field + " of curve " + std::to_string(std::stoul(f[2]) + 1) + " in " + loop_name + " of " +
           step;
  }
  return path;
}

}  // namespace

std::string template_quantitative(const CadModel &model) {
  require_valid(model);
  const CadModel canonical = canonicalize(model);
  if (canonical.ops.empty()) return "The model is empty.\n";
  std::string out;
  for (std::size_t i = 0; i < canonical.ops.size(); ++i) op_sentences(canonical.ops[i], i + 1, out);
  return out;
}

CadModel parse_quantitative(std::string_view text) {
  CadModel model;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool empty_declared = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == "The model is empty.") {
      empty_declared = true;
      continue;
    }
    std::smatch m;
    if (std::regex_match(line, m, step_re())) {
      if (std::stoul(m[1]) != model.ops.size() + 1) fail(line_no, "steps must be numbered in order");
      SketchExtrude op;
      op.boolean = kind_from_verb(m[2]);
      op.extrude_toward = to_double(m[3], line_no);
      op.extrude_opposite = to_double(m[4], line_no);
      op.frame.origin = to_vec3(m, 5, line_no);
      op.frame.axis_x = to_vec3(m, 8, line_no);
      op.frame.axis_y = to_vec3(m, 11, line_no);
      op.frame.axis_z = to_vec3(m, 14, line_no);
      op.scale = to_double(m[17], line_no);
      model.ops.push_back(std::move(op));
      continue;
    }
    if (!std::regex_match(line, m, curve_re())) fail(line_no, "unrecognized sentence");
    if (model.ops.empty()) fail(line_no, "curve before any step");
    auto &loops = model.ops.back().profile.loops;
    const std::string lead = m[1];
    if (lead == "Continue") {
      if (loops.empty()) fail(line_no, "continuation without a started loop");
    } else {
      const std::size_t expected = lead == "Start the outer boundary" ? 0 : std::stoul(m[2]);
      if (expected != loops.size()) fail(line_no, "loops must start in order");
      loops.emplace_back();
    }
    const std::string body = m[3];
    std::smatch c;
    if (std::regex_match(body, c, line_re())) {
      loops.back().curves.push_back(Line{to_vec2(c, 1, line_no), to_vec2(c, 3, line_no)});
    } else if (std::regex_match(body, c, arc_re())) {
      loops.back().curves.push_back(
          Arc{to_vec2(c, 2, line_no), to_vec2(c, 4, line_no), to_double(c[6], line_no), c[1] == "counterclockwise"});
    } else if (std::regex_match(body, c, circle_re())) {
      loops.back().curves.push_back(Circle{to_vec2(c, 1, line_no), to_double(c[3], line_no)});
    } else {
      fail(line_no, "unrecognized curve");
    }
  }
  if (empty_declared && !model.ops.empty()) fail(line_no, "empty model declared alongside steps");
  if (!empty_declared && model.ops.empty()) fail(line_no, "no steps");
  return model;
}

std::string template_edit(const EditScript &script) {
  std::string out;
  for (const EditAction &action : script.actions) {
    std::visit(
        [&](const auto &a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, DeleteOp>) {
            out += "Remove step " + std::to_string(a.op + 1) + ".\n";
          } else if constexpr (std::is_same_v<T, InsertOp>) {
            out += "Insert a new step " + std::to_string(a.op + 1) + ".\n";
            op_sentences(a.payload, a.op + 1, out);
          } else if constexpr (std::is_same_v<T, DeleteLoop>) {
            out += a.loop == 0 ? "Remove the outer boundary of step " + std::to_string(a.op + 1) + ".\n"
                               : "Remove hole " + std::to_string(a.loop) + " of step " + std::to_string(a.op + 1) +
                                     ".\n";
          } else if constexpr (std::is_same_v<T, InsertLoop>) {
            out += a.loop == 0 ? "Add a new outer boundary to step " + std::to_string(a.op + 1) + ".\n"
                               : "Add hole " + std::to_string(a.loop) + " to step " + std::to_string(a.op + 1) +
                                     ".\n";
            loop_sentences(a.payload, a.loop, out);
          } else {
            out += "Change " + describe_path(a.path) + " from " + to_string(a.old_value) + " to " +
                   to_string(a.new_value) + ".\n";
          }
        },
        action);
  }
  return out;
}

}  // namespace cadseq
