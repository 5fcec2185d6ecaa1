// DeepCAD-shaped JSON: an `entities` map of Sketch and ExtrudeFeature records
// plus a `sequence` list. Sketch curves live in sketch-local coordinates with
// the frame in `transform`. Extensions carry what DeepCAD leaves implicit:
// `sketch_scale` on sketches, exact `sweep_angle`/`counterclockwise` on arcs,
// and a top-level `extensions` record with the raw-coordinate flag and source.

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "cadseq/canonical.hpp"
#include "formats.hpp"
#include "text_support.hpp"

namespace cadseq::detail {

namespace {

using nlohmann::json;

constexpr int kMaxNesting = 64;

struct SchemaError {
  std::string message;
};

[[noreturn]] void schema(const std::string &message) { throw SchemaError{message}; }

const json &field(const json &obj, const char *name, const std::string &where) {
  if (!obj.is_object()) schema(where + " must be an object");
  const auto it = obj.find(name);
  if (it == obj.end()) schema(where + " is missing '" + name + "'");
  return *it;
}

double number(const json &obj, const char *name, const std::string &where) {
  const json &v = field(obj, name, where);
  if (!v.is_number()) schema(where + "." + name + " must be a number");
  return v.get<double>();
}

std::string text(const json &obj, const char *name, const std::string &where) {
  const json &v = field(obj, name, where);
  if (!v.is_string()) schema(where + "." + name + " must be a string");
  return v.get<std::string>();
}

Vec3 point3(const json &obj, const char *name, const std::string &where) {
  const json &p = field(obj, name, where);
  const std::string w = where + "." + name;
  return {number(p, "x", w), number(p, "y", w), number(p, "z", w)};
}

Vec2 point2(const json &obj, const char *name, const std::string &where) {
  const Vec3 p = point3(obj, name, where);
  return {p.x, p.y};
}

Curve read_curve(const json &c, const std::string &where) {
  const std::string type = text(c, "type", where);
  if (type == "Line3D") {
    return Line{point2(c, "start_point", where), point2(c, "end_point", where)};
  }
  if (type == "Arc3D") {
    Arc arc;
    arc.start = point2(c, "start_point", where);
    arc.end = point2(c, "end_point", where);
    if (c.contains("sweep_angle")) {
      arc.sweep = number(c, "sweep_angle", where);
    } else {
      arc.sweep = number(c, "end_angle", where) - number(c, "start_angle", where);
    }
    if (c.contains("counterclockwise")) {
      const json &flag = c["counterclockwise"];
      if (!flag.is_boolean()) schema(where + ".counterclockwise must be a boolean");
      arc.counterclockwise = flag.get<bool>();
    } else if (c.contains("normal")) {
      arc.counterclockwise = point3(c, "normal", where).z >= 0.0;
    }
    return arc;
  }
  if (type == "Circle3D") {
    return Circle{point2(c, "center_point", where), number(c, "radius", where)};
  }
  schema(where + ".type '" + type + "' is not Line3D, Arc3D or Circle3D");
}

Curve reversed(const Curve &curve) {
  if (const auto *l = std::get_if<Line>(&curve)) return Line{l->end, l->start};
  if (const auto *a = std::get_if<Arc>(&curve)) {
    return Arc{a->end, a->start, a->sweep, !a->counterclockwise};
  }
  return curve;
}

bool near(Vec2 a, Vec2 b) { return norm(a - b) <= 1e-7; }

// DeepCAD loops are not always stored head to tail. Chain them greedily,
// flipping curves that are stored backwards; leave the order alone when no
// consistent chain exists so validation can report it.
Loop chain(Loop loop) {
  const std::size_t n = loop.curves.size();
  if (n < 2) return loop;
  for (const Curve &c : loop.curves) {
    if (std::holds_alternative<Circle>(c)) return loop;
  }
  bool ordered = true;
  for (std::size_t k = 0; k < n; ++k) {
    ordered = ordered && near(curve_end(loop.curves[k]), curve_start(loop.curves[(k + 1) % n]));
  }
  if (ordered) return loop;

  Loop out;
  std::vector<bool> used(n, false);
  out.curves.push_back(loop.curves[0]);
  used[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const Vec2 tail = curve_end(out.curves.back());
    bool found = false;
    for (std::size_t k = 0; k < n && !found; ++k) {
      if (used[k]) continue;
      if (near(curve_start(loop.curves[k]), tail)) {
        out.curves.push_back(loop.curves[k]);
      } else if (near(curve_end(loop.curves[k]), tail)) {
        out.curves.push_back(reversed(loop.curves[k]));
      } else {
        continue;
      }
      used[k] = true;
      found = true;
    }
    if (!found) return loop;
  }
  return out;
}

Profile read_profile(const json &p, const std::string &where) {
  const json &loops = field(p, "loops", where);
  if (!loops.is_array()) schema(where + ".loops must be an array");
  Profile profile;
  std::size_t outer = 0;
  bool have_outer = false;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const std::string lw = where + ".loops[" + std::to_string(i) + "]";
    const json &l = loops[i];
    const json &curves = field(l, "profile_curves", lw);
    if (!curves.is_array()) schema(lw + ".profile_curves must be an array");
    Loop loop;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      loop.curves.push_back(read_curve(curves[k], lw + ".profile_curves[" + std::to_string(k) + "]"));
    }
    if (l.is_object() && l.contains("is_outer") && l["is_outer"].is_boolean() &&
        l["is_outer"].get<bool>() && !have_outer) {
      outer = i;
      have_outer = true;
    }
    profile.loops.push_back(chain(std::move(loop)));
  }
  if (outer != 0) std::rotate(profile.loops.begin(), profile.loops.begin() + static_cast<long>(outer),
                              profile.loops.begin() + static_cast<long>(outer) + 1);
  return profile;
}

BooleanKind read_operation(const std::string &name, const std::string &where) {
  if (name == "NewBodyFeatureOperation") return BooleanKind::New;
  if (name == "JoinFeatureOperation") return BooleanKind::Join;
  if (name == "CutFeatureOperation") return BooleanKind::Cut;
  if (name == "IntersectFeatureOperation") return BooleanKind::Intersect;
  schema(where + ".operation '" + name + "' is not a known feature operation");
}

double extent_distance(const json &extrude, const char *name, const std::string &where) {
  const json &extent = field(extrude, name, where);
  return number(field(extent, "distance", where + "." + name), "value",
                where + "." + name + ".distance");
}

CadModel read_model(const json &doc) {
  if (!doc.is_object()) schema("document must be an object");
  const json &entities = field(doc, "entities", "document");
  if (!entities.is_object()) schema("entities must be an object");
  const json &sequence = field(doc, "sequence", "document");
  if (!sequence.is_array()) schema("sequence must be an array");

  CadModel model;
  if (doc.contains("extensions")) {
    const json &ext = doc["extensions"];
    if (ext.is_object() && ext.contains("source")) {
      if (!ext["source"].is_string()) schema("extensions.source must be a string");
      model.source = ext["source"].get<std::string>();
    }
  }

  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const std::string sw = "sequence[" + std::to_string(i) + "]";
    const std::string id = text(sequence[i], "entity", sw);
    const std::string ew = "entities." + id;
    const json &entity = field(entities, id.c_str(), "entities");
    const std::string type = text(entity, "type", ew);
    if (type == "Sketch") continue;
    if (type != "ExtrudeFeature") schema(ew + ".type '" + type + "' is not Sketch or ExtrudeFeature");

    const BooleanKind kind = read_operation(text(entity, "operation", ew), ew);
    const std::string extent_type = text(entity, "extent_type", ew);
    const double one = extent_distance(entity, "extent_one", ew);
    double two = 0.0;
    if (extent_type == "TwoSidesFeatureExtentType") {
      two = extent_distance(entity, "extent_two", ew);
    } else if (extent_type == "SymmetricFeatureExtentType") {
      two = one;
    } else if (extent_type != "OneSideFeatureExtentType") {
      schema(ew + ".extent_type '" + extent_type + "' is not a known extent type");
    }

    const json &refs = field(entity, "profiles", ew);
    if (!refs.is_array()) schema(ew + ".profiles must be an array");
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const std::string rw = ew + ".profiles[" + std::to_string(r) + "]";
      const std::string sketch_id = text(refs[r], "sketch", rw);
      const std::string profile_id = text(refs[r], "profile", rw);
      const std::string kw = "entities." + sketch_id;
      const json &sketch = field(entities, sketch_id.c_str(), "entities");
      if (text(sketch, "type", kw) != "Sketch") schema(kw + " is not a Sketch");
      const json &transform = field(sketch, "transform", kw);
      const std::string tw = kw + ".transform";
      const json &profiles = field(sketch, "profiles", kw);

      SketchExtrude op;
      op.frame = {point3(transform, "origin", tw), point3(transform, "x_axis", tw),
                  point3(transform, "y_axis", tw), point3(transform, "z_axis", tw)};
      op.scale = sketch.contains("sketch_scale") ? number(sketch, "sketch_scale", kw) : 1.0;
      op.profile = read_profile(field(profiles, profile_id.c_str(), kw + ".profiles"),
                                kw + ".profiles." + profile_id);
      op.extrude_toward = one;
      op.extrude_opposite = two;
      op.boolean = kind;
      model.ops.push_back(std::move(op));
    }
  }
  return model;
}

json point_json(double x, double y, double z) { return {{"x", x}, {"y", y}, {"z", z}}; }
json point_json(Vec2 p) { return point_json(p.x, p.y, 0.0); }
json point_json(Vec3 p) { return point_json(p.x, p.y, p.z); }

json curve_json(const Curve &curve) {
  if (const auto *l = std::get_if<Line>(&curve)) {
    return {{"type", "Line3D"}, {"start_point", point_json(l->start)},
            {"end_point", point_json(l->end)}};
  }
  if (const auto *a = std::get_if<Arc>(&curve)) {
    const ArcGeometry g = arc_geometry(*a);
    const Vec2 ref = (a->start - g.center) * (1.0 / g.radius);
    return {{"type", "Arc3D"},
            {"start_point", point_json(a->start)},
            {"end_point", point_json(a->end)},
            {"center_point", point_json(Vec2{round_significant(g.center.x),
                                             round_significant(g.center.y)})},
            {"radius", round_significant(g.radius)},
            {"reference_vector", point_json(Vec2{round_significant(ref.x),
                                                 round_significant(ref.y)})},
            {"normal", point_json(0.0, 0.0, a->counterclockwise ? 1.0 : -1.0)},
            {"start_angle", 0.0},
            {"end_angle", a->sweep},
            {"sweep_angle", a->sweep},
            {"counterclockwise", a->counterclockwise}};
  }
  const auto &c = std::get<Circle>(curve);
  return {{"type", "Circle3D"}, {"center_point", point_json(c.center)}, {"radius", c.radius},
          {"normal", point_json(0.0, 0.0, 1.0)}};
}

json extent_json(double distance) {
  return {{"type", "DistanceExtentDefinition"},
          {"distance", {{"type", "ModelParameter"}, {"role", "AlongDistance"}, {"value", distance}}}};
}

std::string_view operation_name(BooleanKind kind) {
  switch (kind) {
    case BooleanKind::New: return "NewBodyFeatureOperation";
    case BooleanKind::Join: return "JoinFeatureOperation";
    case BooleanKind::Cut: return "CutFeatureOperation";
    case BooleanKind::Intersect: return "IntersectFeatureOperation";
  }
  return "NewBodyFeatureOperation";
}

// Max bracket depth outside strings; guards the recursive parser.
int nesting_depth(std::string_view text) {
  int depth = 0;
  int max_depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') max_depth = std::max(max_depth, ++depth);
    else if (c == '}' || c == ']') --depth;
  }
  return max_depth;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

ParseOutcome parse_json(std::string_view text) {
  if (nesting_depth(text) > kMaxNesting) {
    return ParseError{1, 1, "nesting deeper than " + std::to_string(kMaxNesting) + " levels",
                      ParseErrorKind::Syntactic};
  }
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    const auto [line, column] = line_column(text, e.byte);
    const std::string what = e.what();
    const bool lexical = what.find("invalid literal") != std::string::npos ||
                         what.find("invalid string") != std::string::npos ||
                         what.find("invalid number") != std::string::npos;
    return ParseError{line, column, what,
                      lexical ? ParseErrorKind::Lexical : ParseErrorKind::Syntactic};
  }
  try {
    return finish(read_model(doc), SourceMap{});
  } catch (const SchemaError &e) {
    return ParseError{1, 1, e.message, ParseErrorKind::Syntactic};
  } catch (const json::exception &e) {
    return ParseError{1, 1, e.what(), ParseErrorKind::Syntactic};
  }
}

std::string print_json(const CadModel &model) {
  json entities = json::object();
  json sequence = json::array();
  for (std::size_t i = 0; i < model.ops.size(); ++i) {
    const SketchExtrude &op = model.ops[i];
    const std::string sketch_id = "sketch_" + std::to_string(i);
    const std::string extrude_id = "extrude_" + std::to_string(i);

    json loops = json::array();
    for (std::size_t l = 0; l < op.profile.loops.size(); ++l) {
      json curves = json::array();
      for (const Curve &c : op.profile.loops[l].curves) curves.push_back(curve_json(c));
      loops.push_back({{"is_outer", l == 0}, {"profile_curves", std::move(curves)}});
    }
    entities[sketch_id] = {
        {"type", "Sketch"},
        {"name", "Sketch " + std::to_string(i + 1)},
        {"sketch_scale", op.scale},
        {"transform",
         {{"origin", point_json(op.frame.origin)},
          {"x_axis", point_json(op.frame.axis_x)},
          {"y_axis", point_json(op.frame.axis_y)},
          {"z_axis", point_json(op.frame.axis_z)}}},
        {"profiles", {{"profile_0", {{"loops", std::move(loops)}}}}}};

    json extrude = {
        {"type", "ExtrudeFeature"},
        {"name", "Extrude " + std::to_string(i + 1)},
        {"profiles", json::array({{{"sketch", sketch_id}, {"profile", "profile_0"}}})},
        {"operation", operation_name(op.boolean)},
        {"start_extent", {{"type", "ProfilePlaneStartDefinition"}}},
        {"extent_one", extent_json(op.extrude_toward)},
        {"extent_type",
         op.extrude_opposite == 0.0 ? "OneSideFeatureExtentType" : "TwoSidesFeatureExtentType"}};
    if (op.extrude_opposite != 0.0) extrude["extent_two"] = extent_json(op.extrude_opposite);
    entities[extrude_id] = std::move(extrude);

    sequence.push_back({{"index", 2 * i}, {"type", "Sketch"}, {"entity", sketch_id}});
    sequence.push_back({{"index", 2 * i + 1}, {"type", "ExtrudeFeature"}, {"entity", extrude_id}});
  }
  json extensions = {{"raw_coordinates", true}};
  if (model.source) extensions["source"] = *model.source;
  json doc = {{"entities", std::move(entities)},
              {"sequence", std::move(sequence)},
              {"extensions", std::move(extensions)}};
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace cadseq::detail
