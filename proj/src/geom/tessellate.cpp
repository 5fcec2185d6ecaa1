#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>

#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"

namespace cadseq {

namespace {

using Polygon = std::vector<Vec2>;
using Tri2 = std::array<Vec2, 3>;

std::size_t arc_segments(double radius, double sweep, double tol) {
  const double c = 1.0 - tol / radius;
  if (c <= -1.0) return 1;
  const double max_angle = 2.0 * std::acos(c);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(sweep / max_angle - 1e-12)));
}

// Polygon vertex plus the exact surface point and normal in the middle of the
// edge that starts at it (used to classify wall faces).
struct EdgeSample {
  Vec2 vertex;
  Vec2 probe;
  Vec2 normal;
};

// Loop as a polygon in sketch units; chord error in world units stays below
// tol and, when max_len > 0, no edge is longer than max_len.
std::vector<EdgeSample> polygonize(const Loop &loop, double scale, double tol, double max_len) {
  std::vector<EdgeSample> out;
  for (const Curve &curve : loop.curves) {
    std::size_t n = 1;
    if (const auto *c = std::get_if<Circle>(&curve)) {
      n = circle_segments(c->radius * scale, tol);
    } else if (const auto *a = std::get_if<Arc>(&curve)) {
      n = arc_segments(arc_geometry(*a).radius * scale, a->sweep, tol);
    }
    if (max_len > 0) {
      const double chord = norm(curve_point(curve, 1.0 / static_cast<double>(n)) - curve_point(curve, 0.0));
      const double piece = std::max(chord, curve_length(curve) / static_cast<double>(n));
      n *= std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(piece / max_len)));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double t0 = static_cast<double>(i) / static_cast<double>(n);
      const double tm = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      const Vec2 tan = curve_tangent(curve, tm);
      out.push_back({curve_point(curve, t0), curve_point(curve, tm), {tan.y, -tan.x}});
    }
  }
  return out;
}

Polygon vertices_of(const std::vector<EdgeSample> &edges) {
  Polygon out;
  for (const EdgeSample &e : edges) out.push_back(e.vertex);
  return out;
}

double polygon_area(const Polygon &p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * a;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool blocked(Vec2 a, Vec2 b, const std::vector<const Polygon *> &polys) {
  for (const Polygon *poly : polys) {
    for (std::size_t i = 0; i < poly->size(); ++i) {
      const Vec2 c = (*poly)[i], d = (*poly)[(i + 1) % poly->size()];
      if (c == a || c == b || d == a || d == b) continue;
      if (segments_cross(a, b, c, d)) return true;
    }
  }
  return false;
}

// Joins each hole to the outer boundary with a two-way bridge edge.
Polygon bridge_holes(Polygon outer, std::vector<Polygon> holes) {
  std::sort(holes.begin(), holes.end(), [](const Polygon &a, const Polygon &b) {
    auto max_x = [](const Polygon &p) {
      double m = p.front().x;
      for (const Vec2 &v : p) m = std::max(m, v.x);
      return m;
    };
    return max_x(a) > max_x(b);
  });
  for (std::size_t h = 0; h < holes.size(); ++h) {
    const Polygon &hole = holes[h];
    std::size_t mi = 0;
    for (std::size_t i = 1; i < hole.size(); ++i) {
      if (hole[i].x > hole[mi].x) mi = i;
    }
    const Vec2 m = hole[mi];
    std::vector<const Polygon *> polys{&outer};
    for (const Polygon &other : holes) polys.push_back(&other);

    std::vector<std::size_t> order(outer.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return squared_distance({outer[a].x, outer[a].y, 0}, {m.x, m.y, 0}) <
             squared_distance({outer[b].x, outer[b].y, 0}, {m.x, m.y, 0});
    });
    std::size_t pick = order.front();
    for (const std::size_t i : order) {
      if (!blocked(outer[i], m, polys)) {
        pick = i;
        break;
      }
    }
    Polygon merged(outer.begin(), outer.begin() + static_cast<std::ptrdiff_t>(pick) + 1);
    for (std::size_t k = 0; k <= hole.size(); ++k) merged.push_back(hole[(mi + k) % hole.size()]);
    merged.insert(merged.end(), outer.begin() + static_cast<std::ptrdiff_t>(pick), outer.end());
    outer = std::move(merged);
  }
  return outer;
}

bool in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
}

// Ear clipping of a counterclockwise simple polygon (bridges allowed).
std::vector<Tri2> ear_clip(Polygon poly) {
  std::vector<Tri2> out;
  std::vector<std::size_t> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  while (idx.size() > 3) {
    const std::size_t n = idx.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n && !clipped; ++i) {
      const Vec2 a = poly[idx[(i + n - 1) % n]], b = poly[idx[i]], c = poly[idx[(i + 1) % n]];
      if (cross(b - a, c - b) <= 0) continue;
      bool empty = true;
      for (std::size_t j = 0; j < n && empty; ++j) {
        const Vec2 p = poly[idx[j]];
        if (p == a || p == b || p == c) continue;
        if (in_triangle(p, a, b, c)) empty = false;
      }
      if (!empty) continue;
      out.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
    }
    if (clipped) continue;
    // No ear: drop the flattest vertex.
    std::size_t best = 0;
    double best_turn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = poly[idx[(i + n - 1) % n]], b = poly[idx[i]], c = poly[idx[(i + 1) % n]];
      const double turn = std::abs(cross(b - a, c - b));
      if (turn < best_turn) {
        best_turn = turn;
        best = i;
      }
    }
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best));
  }
  if (idx.size() == 3) {
    const Tri2 t{poly[idx[0]], poly[idx[1]], poly[idx[2]]};
    if (cross(t[1] - t[0], t[2] - t[0]) > 0) out.push_back(t);
  }
  return out;
}

void refine(const Tri2 &t, double max_len, int depth, std::vector<Tri2> &out) {
  double longest = 0.0;
  int e = 0;
  for (int i = 0; i < 3; ++i) {
    const double len = norm(t[(i + 1) % 3] - t[i]);
    if (len > longest) {
      longest = len;
      e = i;
    }
  }
  if (longest <= max_len || depth == 0) {
    out.push_back(t);
    return;
  }
  const Vec2 a = t[e], b = t[(e + 1) % 3], c = t[(e + 2) % 3];
  const Vec2 mid = (a + b) * 0.5;
  refine({a, mid, c}, max_len, depth - 1, out);
  refine({mid, b, c}, max_len, depth - 1, out);
}

class MeshBuilder {
 public:
  MeshBuilder(const SolidProgram &program, double eps) : program_(program), eps_(eps) {}

  // Outward direction at a probe on the final boundary, or nothing when the
  // probe is not on it.
  std::optional<Vec3> outward(Vec3 probe, Vec3 normal) const {
    const bool plus = contains(program_, probe + normal * eps_);
    const bool minus = contains(program_, probe - normal * eps_);
    if (plus == minus) return std::nullopt;
    return plus ? -normal : normal;
  }

  void emit(Vec3 a, Vec3 b, Vec3 c, Vec3 out, std::size_t op) {
    const Vec3 n = cross(b - a, c - a);
    if (0.5 * norm(n) < 1e-12) return;
    if (dot(n, out) < 0) std::swap(b, c);
    mesh_.triangles.push_back({index(a), index(b), index(c)});
    mesh_.triangle_op.push_back(op);
  }

  TriMesh take() { return std::move(mesh_); }

 private:
  std::uint32_t index(Vec3 v) {
    const auto key = std::make_tuple(v.x, v.y, v.z);
    const auto it = lookup_.find(key);
    if (it != lookup_.end()) return it->second;
    const auto i = static_cast<std::uint32_t>(mesh_.vertices.size());
    mesh_.vertices.push_back(v);
    lookup_.emplace(key, i);
    return i;
  }

  const SolidProgram &program_;
  double eps_;
  TriMesh mesh_;
  std::map<std::tuple<double, double, double>, std::uint32_t> lookup_;
};

}  // namespace

std::size_t circle_segments(double r, double tol) {
  if (!(r > 0.0) || !(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius and tolerance must be positive");
  const double c = 1.0 - tol / r;
  if (c <= -1.0) return 3;
  return std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(std::numbers::pi / std::acos(c) - 1e-12)));
}

double TriMesh::area() const {
  double total = 0.0;
  for (const auto &t : triangles) {
    total += 0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
  }
  return total;
}

TriMesh tessellate(const SolidProgram &program, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (program.ops.empty()) throw Error(ErrorCode::EmptyGeometry, "program has no ops");
  const double extent = feature_extent(program);
  MeshBuilder builder(program, 1e-4 * extent);
  const bool trim = program.ops.size() > 1;
  const double max_edge = extent / 24.0;

  for (const CompiledOp &op : program.ops) {
    const double max_len = trim ? max_edge / op.scale : 0.0;
    std::vector<Polygon> loops;

    // Walls, classified at the exact surface point of each face.
    const double height = op.z_hi - op.z_lo;
    const std::size_t levels =
        trim ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(height / max_edge))) : 1;
    for (const Loop &loop : op.profile.loops) {
      const std::vector<EdgeSample> edges = polygonize(loop, op.scale, tol, max_len);
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const Vec2 a = edges[i].vertex, b = edges[(i + 1) % edges.size()].vertex;
        const Vec3 normal = op.frame.axis_x * edges[i].normal.x + op.frame.axis_y * edges[i].normal.y;
        for (std::size_t l = 0; l < levels; ++l) {
          const double h0 = op.z_lo + height * static_cast<double>(l) / levels;
          const double h1 = op.z_lo + height * static_cast<double>(l + 1) / levels;
          const auto out = builder.outward(op.to_world(edges[i].probe, 0.5 * (h0 + h1)), normal);
          if (!out) continue;
          const Vec3 a0 = op.to_world(a, h0), b0 = op.to_world(b, h0);
          const Vec3 a1 = op.to_world(a, h1), b1 = op.to_world(b, h1);
          builder.emit(a0, b0, b1, *out, op.source_index);
          builder.emit(a0, b1, a1, *out, op.source_index);
        }
      }
      loops.push_back(vertices_of(trim ? polygonize(loop, op.scale, tol, 0.0) : edges));
    }

    // Caps, classified at triangle centroids.
    Polygon outer = loops.front();
    if (polygon_area(outer) < 0) std::reverse(outer.begin(), outer.end());
    std::vector<Polygon> holes(loops.begin() + 1, loops.end());
    for (Polygon &h : holes) {
      if (polygon_area(h) > 0) std::reverse(h.begin(), h.end());
    }
    std::vector<Tri2> cap;
    for (const Tri2 &t : ear_clip(bridge_holes(outer, holes))) {
      if (trim) {
        refine(t, max_len, 16, cap);
      } else {
        cap.push_back(t);
      }
    }
    for (const double h : {op.z_lo, op.z_hi}) {
      for (const Tri2 &t : cap) {
        const Vec3 a = op.to_world(t[0], h), b = op.to_world(t[1], h), c = op.to_world(t[2], h);
        const auto out = builder.outward((a + b + c) * (1.0 / 3.0), op.frame.axis_z);
        if (out) builder.emit(a, b, c, *out, op.source_index);
      }
    }
  }

  TriMesh mesh = builder.take();
  if (mesh.triangles.empty()) throw Error(ErrorCode::EmptyGeometry, "no surface survives the booleans");
  return mesh;
}

}  // namespace cadseq
