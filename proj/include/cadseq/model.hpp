#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cadseq/vec.hpp"

namespace cadseq {

enum class BooleanKind { New, Join, Cut, Intersect };

std::string_view to_string(BooleanKind kind);
std::optional<BooleanKind> boolean_from_string(std::string_view name);

struct Line {
  Vec2 start;
  Vec2 end;

  bool operator==(const Line &) const = default;
};

// Stored as end points plus sweep and direction; center and radius are derived.
struct Arc {
  Vec2 start;
  Vec2 end;
  double sweep = 0.0;  // radians, (0, 2*pi)
  bool counterclockwise = true;

  bool operator==(const Arc &) const = default;
};

struct Circle {
  Vec2 center;
  double radius = 0.0;

  bool operator==(const Circle &) const = default;
};

using Curve = std::variant<Line, Arc, Circle>;

// A closed chain of curves: a single circle, or >= 2 lines/arcs joined end to start.
struct Loop {
  std::vector<Curve> curves;

  bool operator==(const Loop &) const = default;
};

// loops[0] bounds material; the remaining loops are holes.
struct Profile {
  std::vector<Loop> loops;

  bool operator==(const Profile &) const = default;
};

struct CoordinateFrame {
  Vec3 origin{0.0, 0.0, 0.0};
  Vec3 axis_x{1.0, 0.0, 0.0};
  Vec3 axis_y{0.0, 1.0, 0.0};
  Vec3 axis_z{0.0, 0.0, 1.0};

  bool operator==(const CoordinateFrame &) const = default;
};

// One sketch-extrude step. The profile lives in the frame's xy plane, scaled by
// `scale`; the solid spans [-extrude_opposite*scale, extrude_toward*scale]
// along axis_z.
struct SketchExtrude {
  CoordinateFrame frame;
  Profile profile;
  double extrude_toward = 0.0;
  double extrude_opposite = 0.0;
  double scale = 1.0;
  BooleanKind boolean = BooleanKind::New;

  bool operator==(const SketchExtrude &) const = default;
};

struct CadModel {
  std::vector<SketchExtrude> ops;
  std::optional<std::string> source;

  bool operator==(const CadModel &) const = default;
  bool empty() const { return ops.empty(); }
};

// Endpoint helpers; for a circle both return the rightmost point.
Vec2 curve_start(const Curve &curve);
Vec2 curve_end(const Curve &curve);

struct ArcGeometry {
  Vec2 center;
  double radius = 0.0;
  double start_angle = 0.0;  // angle of `start` around `center`
};

ArcGeometry arc_geometry(const Arc &arc);

// Signed area: positive for counterclockwise loops. Arcs contribute their
// circular segment exactly.
double signed_area(const Loop &loop);

double curve_length(const Curve &curve);

// Point at arc-length fraction t in [0, 1] along the curve, with unit tangent.
Vec2 curve_point(const Curve &curve, double t);
Vec2 curve_tangent(const Curve &curve, double t);

struct Box2 {
  Vec2 lo;
  Vec2 hi;
};

Box2 loop_bounds(const Loop &loop);
Box2 profile_bounds(const Profile &profile);

// Even-odd classification; arcs are handled analytically through their
// circular segments. Boundary points may land on either side.
bool point_in_loop(const Loop &loop, Vec2 p);
bool point_in_profile(const Profile &profile, Vec2 p);

std::size_t primitive_count(const CadModel &model);

}  // namespace cadseq
