#include <algorithm>
#include <cmath>
#include <random>

#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"
#include "geom_support.hpp"

namespace cadseq {

namespace {

using Rng = std::mt19937_64;

struct Candidate {
  Vec3 point;
  Vec3 normal;
  double weight;
};

double profile_area(const Profile &profile) {
  double area = std::abs(signed_area(profile.loops.front()));
  for (std::size_t k = 1; k < profile.loops.size(); ++k) area -= std::abs(signed_area(profile.loops[k]));
  return std::max(area, 0.0);
}

std::size_t cells_for(double area, double cell) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(area / cell)));
}

// m x k grid with aspect close to width : height.
std::pair<std::size_t, std::size_t> grid_shape(std::size_t count, double width, double height) {
  const double k = std::sqrt(static_cast<double>(count) * height / width);
  const std::size_t rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(k)));
  const std::size_t cols =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(count) / rows)));
  return {cols, rows};
}

void wall_candidates(const CompiledOp &op, const Curve &curve, double cell, Rng &rng,
                     std::vector<Candidate> &out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double length = curve_length(curve) * op.scale;
  const double height = op.z_hi - op.z_lo;
  const double area = length * height;
  if (area <= 0.0) return;
  const auto [cols, rows] = grid_shape(cells_for(area, cell), length, height);
  const double weight = area / static_cast<double>(cols * rows);
  const double dv = unit(rng);
  std::vector<double> row_shift(rows);
  for (double &r : row_shift) r = unit(rng);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t step = 0; step < cols; ++step) {
      const std::size_t i = (j % 2 == 0) ? step : cols - 1 - step;
      const double t = (static_cast<double>(i) + row_shift[j]) / static_cast<double>(cols);
      const double h = op.z_lo + (static_cast<double>(j) + dv) * height / static_cast<double>(rows);
      const Vec2 uv = curve_point(curve, t);
      const Vec2 tan = curve_tangent(curve, t);
      out.push_back({op.to_world(uv, h), op.frame.axis_x * tan.y - op.frame.axis_y * tan.x, weight});
    }
  }
}

void cap_candidates(const CompiledOp &op, double h, Vec3 normal, double cell, Rng &rng,
                    std::vector<Candidate> &out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box2 &b = op.loop_boxes.front();
  const double w = (b.hi.x - b.lo.x), ht = (b.hi.y - b.lo.y);
  const double s2 = op.scale * op.scale;
  const double inside_area = profile_area(op.profile) * s2;
  const double box_area = w * ht * s2;
  if (inside_area <= 0.0 || box_area <= 0.0) return;
  const double target = static_cast<double>(cells_for(inside_area, cell));
  const std::size_t total = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(target * box_area / inside_area)));
  const auto [cols, rows] = grid_shape(total, w, ht);
  const double weight = box_area / static_cast<double>(cols * rows);
  const double dv = unit(rng);
  std::vector<double> row_shift(rows);
  for (double &r : row_shift) r = unit(rng);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t step = 0; step < cols; ++step) {
      const std::size_t i = (j % 2 == 0) ? step : cols - 1 - step;
      const Vec2 uv{b.lo.x + (static_cast<double>(i) + row_shift[j]) * w / static_cast<double>(cols),
                    b.lo.y + (static_cast<double>(j) + dv) * ht / static_cast<double>(rows)};
      if (!point_in_profile(op.profile, uv)) continue;
      out.push_back({op.to_world(uv, h), normal, weight});
    }
  }
}

std::vector<Candidate> op_candidates(const CompiledOp &op, std::size_t n, std::uint64_t seed) {
  Rng rng(detail::splitmix64(seed ^ op.stream));
  double wall_area = 0.0;
  for (const Loop &loop : op.profile.loops) {
    for (const Curve &curve : loop.curves) wall_area += curve_length(curve) * op.scale;
  }
  wall_area *= op.z_hi - op.z_lo;
  const double area = wall_area + 2.0 * profile_area(op.profile) * op.scale * op.scale;
  std::vector<Candidate> out;
  if (area <= 0.0) return out;
  const double cell = area / static_cast<double>(n);
  for (const Loop &loop : op.profile.loops) {
    for (const Curve &curve : loop.curves) wall_candidates(op, curve, cell, rng, out);
  }
  cap_candidates(op, op.z_lo, -op.frame.axis_z, cell, rng, out);
  cap_candidates(op, op.z_hi, op.frame.axis_z, cell, rng, out);
  return out;
}

Vec3 unit(Vec3 v) { return v * (1.0 / norm(v)); }

}  // namespace

SurfaceCandidates boundary_candidates(const SolidProgram &program, std::size_t n,
                                      std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be at least 1");
  SurfaceCandidates out;
  out.seed = seed;
  if (program.ops.empty()) return out;
  const double eps = 1e-4 * feature_extent(program);
  for (const CompiledOp &op : program.ops) {
    for (Candidate &c : op_candidates(op, n, seed)) {
      const Vec3 normal = unit(c.normal);
      const bool plus = contains(program, c.point + normal * eps);
      const bool minus = contains(program, c.point - normal * eps);
      if (plus == minus) continue;
      out.points.push_back(c.point);
      out.normals.push_back(plus ? -normal : normal);
      out.source_op.push_back(op.source_index);
      out.weights.push_back(c.weight);
    }
  }
  return out;
}

SurfacePointCloud resample(const SurfaceCandidates &candidates, std::size_t n,
                           const std::vector<std::size_t> *ops) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be at least 1");
  std::vector<std::size_t> pool;
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.points.size(); ++i) {
    if (ops && std::find(ops->begin(), ops->end(), candidates.source_op[i]) == ops->end()) continue;
    pool.push_back(i);
    total += candidates.weights[i];
  }
  if (pool.empty() || !(total > 0.0)) {
    throw Error(ErrorCode::EmptyGeometry, "no boundary points to sample");
  }

  detail::Fnv tag;
  tag.add(std::string_view("resample"));
  Rng rng(detail::splitmix64(candidates.seed ^ tag.value));
  const double step = total / static_cast<double>(n);
  const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * step;
  double next = offset;

  SurfacePointCloud cloud;
  cloud.seed = candidates.seed;
  cloud.n_requested = n;
  cloud.points.reserve(n);
  double cumulative = 0.0;
  std::size_t k = 0;
  for (const std::size_t i : pool) {
    cumulative += candidates.weights[i];
    while (k < n && next < cumulative) {
      cloud.points.push_back(candidates.points[i]);
      cloud.normals.push_back(candidates.normals[i]);
      cloud.source_op.push_back(candidates.source_op[i]);
      ++k;
      next = offset + step * static_cast<double>(k);
    }
  }
  // Rounding in the running sum can leave the last draws unassigned.
  while (k < n) {
    const std::size_t i = pool.back();
    cloud.points.push_back(candidates.points[i]);
    cloud.normals.push_back(candidates.normals[i]);
    cloud.source_op.push_back(candidates.source_op[i]);
    ++k;
  }
  return cloud;
}

SurfacePointCloud sample_surface(const SolidProgram &program, std::size_t n, std::uint64_t seed) {
  return resample(boundary_candidates(program, n, seed), n);
}

Box3 cloud_bounds(const SurfacePointCloud &cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "point cloud is empty");
  Box3 box{cloud.points.front(), cloud.points.front()};
  for (const Vec3 &p : cloud.points) {
    box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
    box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
  }
  return box;
}

namespace {

SurfacePointCloud apply_box(const SurfacePointCloud &cloud, const Box3 &box) {
  if (!(box.diagonal() > 0.0)) throw Error(ErrorCode::DegenerateExtent, "bounding box has zero diagonal");
  const Vec3 e = box.hi - box.lo;
  const double scale = 2.0 / std::max({e.x, e.y, e.z});
  const Vec3 c = box.center();
  SurfacePointCloud out = cloud;
  for (Vec3 &p : out.points) p = (p - c) * scale;
  return out;
}

}  // namespace

SurfacePointCloud normalize_for_eval(const SurfacePointCloud &cloud) {
  return apply_box(cloud, cloud_bounds(cloud));
}

std::pair<SurfacePointCloud, SurfacePointCloud> normalize_jointly(const SurfacePointCloud &a,
                                                                  const SurfacePointCloud &b) {
  const Box3 ba = cloud_bounds(a), bb = cloud_bounds(b);
  const Box3 joint{{std::min(ba.lo.x, bb.lo.x), std::min(ba.lo.y, bb.lo.y), std::min(ba.lo.z, bb.lo.z)},
                   {std::max(ba.hi.x, bb.hi.x), std::max(ba.hi.y, bb.hi.y), std::max(ba.hi.z, bb.hi.z)}};
  return {apply_box(a, joint), apply_box(b, joint)};
}

}  // namespace cadseq
