#include "cadseq/canonical.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "cadseq/validate.hpp"

namespace cadseq {

namespace {

Vec2 round2(Vec2 v) { return {round_significant(v.x), round_significant(v.y)}; }
Vec3 round3(Vec3 v) {
  return {round_significant(v.x), round_significant(v.y), round_significant(v.z)};
}

Curve round_curve(const Curve &curve) {
  return std::visit(
      [](const auto &c) -> Curve {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Line>) {
          return Line{round2(c.start), round2(c.end)};
        } else if constexpr (std::is_same_v<T, Arc>) {
          return Arc{round2(c.start), round2(c.end), round_significant(c.sweep),
                     c.counterclockwise};
        } else {
          return Circle{round2(c.center), round_significant(c.radius)};
        }
      },
      curve);
}

void set_start(Curve &curve, Vec2 p) {
  if (auto *line = std::get_if<Line>(&curve)) line->start = p;
  if (auto *arc = std::get_if<Arc>(&curve)) arc->start = p;
}

void append_key(std::vector<double> &key, const Curve &curve) {
  key.push_back(static_cast<double>(curve.index()));
  std::visit(
      [&key](const auto &c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Line>) {
          key.insert(key.end(), {c.start.x, c.start.y, c.end.x, c.end.y});
        } else if constexpr (std::is_same_v<T, Arc>) {
          key.insert(key.end(), {c.start.x, c.start.y, c.end.x, c.end.y, c.sweep,
                                 c.counterclockwise ? 1.0 : 0.0});
        } else {
          key.insert(key.end(), {c.center.x, c.center.y, c.radius});
        }
      },
      curve);
}

std::vector<double> loop_key(const Loop &loop) {
  std::vector<double> key;
  for (const Curve &c : loop.curves) append_key(key, c);
  return key;
}

bool less_point(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

Loop rotate_to_smallest(const Loop &loop) {
  const std::size_t n = loop.curves.size();
  if (n < 2) return loop;
  Vec2 best_point = curve_start(loop.curves[0]);
  for (const Curve &c : loop.curves) {
    if (less_point(curve_start(c), best_point)) best_point = curve_start(c);
  }
  Loop best;
  std::vector<double> best_key;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(curve_start(loop.curves[k]) == best_point)) continue;
    Loop candidate;
    candidate.curves.reserve(n);
    for (std::size_t i = 0; i < n; ++i) candidate.curves.push_back(loop.curves[(k + i) % n]);
    std::vector<double> key = loop_key(candidate);
    if (best.curves.empty() || key < best_key) {
      best = std::move(candidate);
      best_key = std::move(key);
    }
  }
  return best;
}

}  // namespace

double round_significant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  const double out = std::strtod(buf, nullptr);
  return out == 0.0 ? 0.0 : out;
}

Loop normalize_loop(const Loop &loop) {
  Loop out;
  out.curves.reserve(loop.curves.size());
  for (const Curve &c : loop.curves) out.curves.push_back(round_curve(c));
  const std::size_t n = out.curves.size();
  if (n >= 2) {
    for (std::size_t k = 0; k < n; ++k) {
      set_start(out.curves[(k + 1) % n], curve_end(out.curves[k]));
    }
  }
  return rotate_to_smallest(out);
}

SketchExtrude normalize_op(const SketchExtrude &op) {
  SketchExtrude out;
  out.frame = {round3(op.frame.origin), round3(op.frame.axis_x), round3(op.frame.axis_y),
               round3(op.frame.axis_z)};
  out.extrude_toward = round_significant(op.extrude_toward);
  out.extrude_opposite = round_significant(op.extrude_opposite);
  out.scale = round_significant(op.scale);
  out.boolean = op.boolean;
  for (const Loop &loop : op.profile.loops) out.profile.loops.push_back(normalize_loop(loop));
  auto &loops = out.profile.loops;
  if (loops.size() > 2) {
    std::stable_sort(loops.begin() + 1, loops.end(), [](const Loop &a, const Loop &b) {
      const Box2 ba = loop_bounds(a);
      const Box2 bb = loop_bounds(b);
      if (ba.lo.x != bb.lo.x) return ba.lo.x < bb.lo.x;
      if (ba.lo.y != bb.lo.y) return ba.lo.y < bb.lo.y;
      return loop_key(a) < loop_key(b);
    });
  }
  return out;
}

CadModel normalize(const CadModel &model) {
  CadModel out;
  out.source = model.source;
  out.ops.reserve(model.ops.size());
  for (const SketchExtrude &op : model.ops) out.ops.push_back(normalize_op(op));
  return out;
}

CadModel canonicalize(const CadModel &model) {
  require_valid(model);
  CadModel out = normalize(model);
  if (!out.ops.empty()) out.ops.front().boolean = BooleanKind::New;
  return out;
}

}  // namespace cadseq
