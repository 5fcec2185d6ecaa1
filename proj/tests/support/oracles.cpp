#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cadseq::testing {

namespace oracle {

constexpr double kPi = std::numbers::pi;

std::vector<Vec2> polyline(const Loop &loop) {
  std::vector<Vec2> out;
  for (const Curve &curve : loop.curves) {
    if (const auto *c = std::get_if<Circle>(&curve)) {
      for (int i = 0; i < 720; ++i) {
        const double a = 2 * kPi * i / 720;
        out.push_back({c->center.x + c->radius * std::cos(a), c->center.y + c->radius * std::sin(a)});
      }
    } else if (const auto *a = std::get_if<Arc>(&curve)) {
      const Vec2 chord = a->end - a->start;
      const double len = norm(chord);
      const double r = len / (2 * std::sin(a->sweep / 2));
      const Vec2 left{-chord.y / len, chord.x / len};
      const double d = r * std::cos(a->sweep / 2);
      const Vec2 center = (a->start + a->end) * 0.5 + left * (a->counterclockwise ? d : -d);
      const double a0 = std::atan2(a->start.y - center.y, a->start.x - center.x);
      const double dir = a->counterclockwise ? 1.0 : -1.0;
      for (int i = 0; i < 360; ++i) {
        const double t = a0 + dir * a->sweep * i / 360;
        out.push_back({center.x + r * std::cos(t), center.y + r * std::sin(t)});
      }
    } else {
      out.push_back(std::get<Line>(curve).start);
    }
  }
  return out;
}

bool in_polygon(const std::vector<Vec2> &poly, Vec2 p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

std::vector<Op> build(const CadModel &model) {
  std::vector<Op> out;
  for (const SketchExtrude &op : model.ops) {
    Op o{op, {}, {}, {}};
    for (const Loop &loop : op.profile.loops) o.loops.push_back(polyline(loop));
    o.lo = o.hi = o.loops[0][0];
    for (const Vec2 &q : o.loops[0]) {
      o.lo = {std::min(o.lo.x, q.x), std::min(o.lo.y, q.y)};
      o.hi = {std::max(o.hi.x, q.x), std::max(o.hi.y, q.y)};
    }
    out.push_back(std::move(o));
  }
  return out;
}

bool op_inside(const Op &o, Vec3 p) {
  const CoordinateFrame &f = o.op.frame;
  const Vec3 d = p - f.origin;
  const double h = dot(d, f.axis_z) / o.op.scale;
  if (h < -o.op.extrude_opposite || h > o.op.extrude_toward) return false;
  const Vec2 uv{dot(d, f.axis_x) / o.op.scale, dot(d, f.axis_y) / o.op.scale};
  if (uv.x < o.lo.x || uv.x > o.hi.x || uv.y < o.lo.y || uv.y > o.hi.y) return false;
  if (!in_polygon(o.loops[0], uv)) return false;
  for (std::size_t k = 1; k < o.loops.size(); ++k) {
    if (in_polygon(o.loops[k], uv)) return false;
  }
  return true;
}

bool inside(const std::vector<Op> &ops, Vec3 p) {
  bool s = false;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const bool v = op_inside(ops[i], p);
    const BooleanKind kind = i == 0 ? BooleanKind::New : ops[i].op.boolean;
    switch (kind) {
      case BooleanKind::New:
      case BooleanKind::Join: s = s || v; break;
      case BooleanKind::Cut: s = s && !v; break;
      case BooleanKind::Intersect: s = s && v; break;
    }
  }
  return s;
}

}  // namespace oracle

double brute_chamfer(const std::vector<Vec3> &a, const std::vector<Vec3> &b) {
  auto one_way = [](const std::vector<Vec3> &from, const std::vector<Vec3> &to) {
    double sum = 0.0;
    for (const Vec3 &p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3 &q : to) best = std::min(best, squared_distance(p, q));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return one_way(a, b) + one_way(b, a);
}

}  // namespace cadseq::testing
