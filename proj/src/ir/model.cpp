#include "cadseq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cadseq/error.hpp"

namespace cadseq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

bool angle_on_arc(const Arc &arc, const ArcGeometry &g, double angle) {
  const double delta = arc.counterclockwise ? wrap_angle(angle - g.start_angle)
                                            : wrap_angle(g.start_angle - angle);
  return delta <= arc.sweep;
}

void extend(Box2 &box, Vec2 p) {
  box.lo.x = std::min(box.lo.x, p.x);
  box.lo.y = std::min(box.lo.y, p.y);
  box.hi.x = std::max(box.hi.x, p.x);
  box.hi.y = std::max(box.hi.y, p.y);
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ParseFailed: return "ParseFailed";
    case ErrorCode::EmptyGeometry: return "EmptyGeometry";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::EmptyEditSet: return "EmptyEditSet";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::StaleOldValue: return "StaleOldValue";
    case ErrorCode::InvalidResult: return "InvalidResult";
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::NothingRemovable: return "NothingRemovable";
    case ErrorCode::ClientUnavailable: return "ClientUnavailable";
    case ErrorCode::ClientTimeout: return "ClientTimeout";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
  }
  return "Unknown";
}

std::string_view to_string(BooleanKind kind) {
  switch (kind) {
    case BooleanKind::New: return "new";
    case BooleanKind::Join: return "join";
    case BooleanKind::Cut: return "cut";
    case BooleanKind::Intersect: return "intersect";
  }
  return "new";
}

std::optional<BooleanKind> boolean_from_string(std::string_view name) {
  if (name == "new") return BooleanKind::New;
  if (name == "join") return BooleanKind::Join;
  if (name == "cut") return BooleanKind::Cut;
  if (name == "intersect") return BooleanKind::Intersect;
  return std::nullopt;
}

Vec2 curve_start(const Curve &curve) {
  return std::visit(
      [](const auto &c) -> Vec2 {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return {c.center.x + c.radius, c.center.y};
        } else {
          return c.start;
        }
      },
      curve);
}

Vec2 curve_end(const Curve &curve) {
  return std::visit(
      [](const auto &c) -> Vec2 {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return {c.center.x + c.radius, c.center.y};
        } else {
          return c.end;
        }
      },
      curve);
}

ArcGeometry arc_geometry(const Arc &arc) {
  const Vec2 chord = arc.end - arc.start;
  const double c = norm(chord);
  const double half = 0.5 * arc.sweep;
  const double radius = c / (2.0 * std::sin(half));
  const double offset = radius * std::cos(half);
  const Vec2 left{-chord.y / c, chord.x / c};
  const Vec2 mid = (arc.start + arc.end) * 0.5;
  const Vec2 center = arc.counterclockwise ? mid + left * offset : mid - left * offset;
  const double start_angle = std::atan2(arc.start.y - center.y, arc.start.x - center.x);
  return {center, radius, start_angle};
}

double signed_area(const Loop &loop) {
  if (loop.curves.size() == 1) {
    if (const auto *circle = std::get_if<Circle>(&loop.curves.front())) {
      return std::numbers::pi * circle->radius * circle->radius;
    }
  }
  double twice = 0.0;
  double segments = 0.0;
  for (const Curve &curve : loop.curves) {
    const Vec2 a = curve_start(curve);
    const Vec2 b = curve_end(curve);
    twice += cross(a, b);
    if (const auto *arc = std::get_if<Arc>(&curve)) {
      const double r = arc_geometry(*arc).radius;
      const double seg = 0.5 * r * r * (arc->sweep - std::sin(arc->sweep));
      segments += arc->counterclockwise ? seg : -seg;
    }
  }
  return 0.5 * twice + segments;
}

double curve_length(const Curve &curve) {
  return std::visit(
      [](const auto &c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Line>) {
          return norm(c.end - c.start);
        } else if constexpr (std::is_same_v<T, Arc>) {
          return arc_geometry(c).radius * c.sweep;
        } else {
          return kTwoPi * c.radius;
        }
      },
      curve);
}

Vec2 curve_point(const Curve &curve, double t) {
  return std::visit(
      [t](const auto &c) -> Vec2 {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Line>) {
          return c.start + (c.end - c.start) * t;
        } else if constexpr (std::is_same_v<T, Arc>) {
          const ArcGeometry g = arc_geometry(c);
          const double a = g.start_angle + (c.counterclockwise ? t : -t) * c.sweep;
          return {g.center.x + g.radius * std::cos(a), g.center.y + g.radius * std::sin(a)};
        } else {
          const double a = t * kTwoPi;
          return {c.center.x + c.radius * std::cos(a), c.center.y + c.radius * std::sin(a)};
        }
      },
      curve);
}

Vec2 curve_tangent(const Curve &curve, double t) {
  return std::visit(
      [t](const auto &c) -> Vec2 {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Line>) {
          const Vec2 d = c.end - c.start;
          return d * (1.0 / norm(d));
        } else if constexpr (std::is_same_v<T, Arc>) {
          const ArcGeometry g = arc_geometry(c);
          const double a = g.start_angle + (c.counterclockwise ? t : -t) * c.sweep;
          return c.counterclockwise ? Vec2{-std::sin(a), std::cos(a)}
                                    : Vec2{std::sin(a), -std::cos(a)};
        } else {
          const double a = t * kTwoPi;
          return {-std::sin(a), std::cos(a)};
        }
      },
      curve);
}

Box2 loop_bounds(const Loop &loop) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Box2 box{{inf, inf}, {-inf, -inf}};
  for (const Curve &curve : loop.curves) {
    if (const auto *circle = std::get_if<Circle>(&curve)) {
      extend(box, circle->center - Vec2{circle->radius, circle->radius});
      extend(box, circle->center + Vec2{circle->radius, circle->radius});
      continue;
    }
    extend(box, curve_start(curve));
    extend(box, curve_end(curve));
    if (const auto *arc = std::get_if<Arc>(&curve)) {
      const ArcGeometry g = arc_geometry(*arc);
      for (int k = 0; k < 4; ++k) {
        const double angle = k * 0.5 * std::numbers::pi;
        if (angle_on_arc(*arc, g, angle)) {
          extend(box, {g.center.x + g.radius * std::cos(angle),
                       g.center.y + g.radius * std::sin(angle)});
        }
      }
    }
  }
  return box;
}

Box2 profile_bounds(const Profile &profile) {
  if (profile.loops.empty()) return {};
  return loop_bounds(profile.loops.front());
}

bool point_in_loop(const Loop &loop, Vec2 p) {
  if (loop.curves.empty()) return false;
  if (const auto *circle = std::get_if<Circle>(&loop.curves.front())) {
    const Vec2 d = p - circle->center;
    return dot(d, d) < circle->radius * circle->radius;
  }
  // Crossing parity of the chord polygon, then flip for every circular
  // segment (region between chord and arc) containing p.
  bool inside = false;
  const std::size_t n = loop.curves.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = curve_start(loop.curves[i]);
    const Vec2 b = curve_start(loop.curves[(i + 1) % n]);
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  for (const Curve &curve : loop.curves) {
    const auto *arc = std::get_if<Arc>(&curve);
    if (!arc) continue;
    const ArcGeometry g = arc_geometry(*arc);
    const Vec2 d = p - g.center;
    if (dot(d, d) >= g.radius * g.radius) continue;
    const double side = cross(arc->end - arc->start, p - arc->start);
    const bool bulge_side = arc->counterclockwise ? side < 0.0 : side > 0.0;
    if (bulge_side) inside = !inside;
  }
  return inside;
}

bool point_in_profile(const Profile &profile, Vec2 p) {
  if (profile.loops.empty() || !point_in_loop(profile.loops.front(), p)) return false;
  for (std::size_t i = 1; i < profile.loops.size(); ++i) {
    if (point_in_loop(profile.loops[i], p)) return false;
  }
  return true;
}

std::size_t primitive_count(const CadModel &model) {
  std::size_t count = model.ops.size();
  for (const SketchExtrude &op : model.ops) {
    for (const Loop &loop : op.profile.loops) count += loop.curves.size();
  }
  return count;
}

}  // namespace cadseq
