#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/validate.hpp"
#include "geom_support.hpp"

namespace cadseq {

namespace {

void extend(Box3 &box, Vec3 p) {
  box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
  box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
}

Box3 empty_box() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{inf, inf, inf}, {-inf, -inf, -inf}};
}

std::array<Vec3, 8> corners(const CompiledOp &op) {
  const Box2 &b = op.loop_boxes.front();
  std::array<Vec3, 8> out;
  std::size_t k = 0;
  for (const double u : {b.lo.x, b.hi.x}) {
    for (const double v : {b.lo.y, b.hi.y}) {
      for (const double h : {op.z_lo, op.z_hi}) out[k++] = op.to_world({u, v}, h);
    }
  }
  return out;
}

void hash_double(detail::Fnv &h, double v) {
  if (v == 0.0) v = 0.0;  // fold -0 into +0
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  h.add(bits);
}

std::uint64_t op_fingerprint(const SketchExtrude &op) {
  detail::Fnv h;
  hash_double(h, op.scale);
  hash_double(h, op.extrude_toward);
  hash_double(h, op.extrude_opposite);
  for (const Loop &loop : op.profile.loops) {
    h.add(0xA5);
    for (const Curve &curve : loop.curves) {
      h.add(curve.index());
      std::visit(
          [&](const auto &c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Circle>) {
              hash_double(h, c.center.x);
              hash_double(h, c.center.y);
              hash_double(h, c.radius);
            } else {
              hash_double(h, c.start.x);
              hash_double(h, c.start.y);
              hash_double(h, c.end.x);
              hash_double(h, c.end.y);
              if constexpr (std::is_same_v<T, Arc>) {
                hash_double(h, c.sweep);
                h.add(c.counterclockwise ? 1 : 0);
              }
            }
          },
          curve);
    }
  }
  return h.value;
}

}  // namespace

Vec3 CompiledOp::to_world(Vec2 uv, double h) const {
  return frame.origin + (frame.axis_x * uv.x + frame.axis_y * uv.y) * scale + frame.axis_z * h;
}

Box3 CompiledOp::world_box() const {
  Box3 box = empty_box();
  for (const Vec3 &c : corners(*this)) extend(box, c);
  return box;
}

SolidProgram compile(const CadModel &model, const CompileOptions &options) {
  require_valid(model);
  SolidProgram program;
  program.ops.reserve(model.ops.size());
  for (std::size_t i = 0; i < model.ops.size(); ++i) {
    const SketchExtrude &op = model.ops[i];
    CompiledOp c;
    c.source_index = i;
    c.frame = op.frame;
    c.scale = op.scale;
    c.z_lo = -op.extrude_opposite * op.scale;
    c.z_hi = op.extrude_toward * op.scale;
    c.profile = op.profile;
    for (const Loop &loop : op.profile.loops) c.loop_boxes.push_back(loop_bounds(loop));
    c.boolean = op.boolean;
    if (i == 0 && options.coerce_first_op) c.boolean = BooleanKind::New;
    c.stream = op_fingerprint(op);
    program.ops.push_back(std::move(c));
  }
  return program;
}

SolidProgram isolate(const SolidProgram &program, const std::vector<std::size_t> &ops) {
  SolidProgram out;
  for (const CompiledOp &op : program.ops) {
    if (std::find(ops.begin(), ops.end(), op.source_index) == ops.end()) continue;
    CompiledOp copy = op;
    copy.boolean = BooleanKind::Join;
    out.ops.push_back(std::move(copy));
  }
  if (out.ops.empty()) throw Error(ErrorCode::EmptyGeometry, "no ops selected");
  return out;
}

bool op_contains(const CompiledOp &op, Vec3 p) {
  const Vec3 d = p - op.frame.origin;
  const double h = dot(d, op.frame.axis_z);
  if (h < op.z_lo || h > op.z_hi) return false;
  const Vec2 uv{dot(d, op.frame.axis_x) / op.scale, dot(d, op.frame.axis_y) / op.scale};
  const Box2 &b = op.loop_boxes.front();
  if (uv.x < b.lo.x || uv.x > b.hi.x || uv.y < b.lo.y || uv.y > b.hi.y) return false;
  if (!point_in_loop(op.profile.loops.front(), uv)) return false;
  for (std::size_t k = 1; k < op.profile.loops.size(); ++k) {
    const Box2 &hb = op.loop_boxes[k];
    if (uv.x < hb.lo.x || uv.x > hb.hi.x || uv.y < hb.lo.y || uv.y > hb.hi.y) continue;
    if (point_in_loop(op.profile.loops[k], uv)) return false;
  }
  return true;
}

bool contains(const SolidProgram &program, Vec3 p) {
  bool inside = false;
  for (const CompiledOp &op : program.ops) {
    switch (op.boolean) {
      case BooleanKind::New:
      case BooleanKind::Join:
        if (!inside) inside = op_contains(op, p);
        break;
      case BooleanKind::Cut:
        if (inside) inside = !op_contains(op, p);
        break;
      case BooleanKind::Intersect:
        if (inside) inside = op_contains(op, p);
        break;
    }
  }
  return inside;
}

Box3 bbox(const SolidProgram &program) {
  Box3 box = empty_box();
  bool any = false;
  for (const CompiledOp &op : program.ops) {
    if (op.boolean != BooleanKind::New && op.boolean != BooleanKind::Join) continue;
    for (const Vec3 &c : corners(op)) extend(box, c);
    any = true;
  }
  if (!any) throw Error(ErrorCode::EmptyGeometry, "program adds no material");
  return box;
}

double feature_extent(const SolidProgram &program) {
  std::vector<Vec3> pts;
  for (const CompiledOp &op : program.ops) {
    for (const Vec3 &c : corners(op)) pts.push_back(c);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::max(best, squared_distance(pts[i], pts[j]));
    }
  }
  return std::sqrt(best);
}

}  // namespace cadseq
