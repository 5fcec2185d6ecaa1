#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cadseq/model.hpp"

namespace cadseq {

struct Box3 {
  Vec3 lo;
  Vec3 hi;

  double diagonal() const { return norm(hi - lo); }
  Vec3 center() const { return (lo + hi) * 0.5; }
};

// Compiled form of one sketch-extrude step. World point of sketch point (u, v)
// at height h: origin + scale * (u * axis_x + v * axis_y) + h * axis_z.
struct CompiledOp {
  std::size_t source_index = 0;  // index of the op in the model
  CoordinateFrame frame;
  double scale = 1.0;
  double z_lo = 0.0;  // -extrude_opposite * scale
  double z_hi = 0.0;  // extrude_toward * scale
  Profile profile;
  std::vector<Box2> loop_boxes;
  BooleanKind boolean = BooleanKind::New;
  std::uint64_t stream = 0;  // sampling stream; depends on shape, not placement

  Vec3 to_world(Vec2 uv, double h) const;
  Box3 world_box() const;
};

struct SolidProgram {
  std::vector<CompiledOp> ops;
};

struct CompileOptions {
  // Off: a leading Cut or Intersect acts on the empty solid.
  bool coerce_first_op = true;
};

// Throws InvalidModel.
SolidProgram compile(const CadModel &model, const CompileOptions &options = {});

// Only the listed ops (by source index), all joined. Used to measure a set of
// ops on their own. Throws EmptyGeometry when no listed op exists.
SolidProgram isolate(const SolidProgram &program, const std::vector<std::size_t> &ops);

bool op_contains(const CompiledOp &op, Vec3 p);

// Folds membership over the ops: New and Join add, Cut subtracts, Intersect
// intersects with the running solid.
bool contains(const SolidProgram &program, Vec3 p);

// Union of the world boxes of the ops (encloses the executed solid). Throws
// EmptyGeometry for a program without ops.
Box3 bbox(const SolidProgram &program);

// Largest distance between corners of the op boxes; rotation invariant.
double feature_extent(const SolidProgram &program);

struct SurfacePointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<std::size_t> source_op;
  std::uint64_t seed = 0;
  std::size_t n_requested = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Boundary candidates before resampling; weight is the surface area each
// candidate stands for.
struct SurfaceCandidates {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<std::size_t> source_op;
  std::vector<double> weights;
  std::uint64_t seed = 0;
};

// Candidates on every op's walls and caps that lie on the final boundary.
// Each op draws from its own stream, so identical ops in different models
// produce identical candidates.
SurfaceCandidates boundary_candidates(const SolidProgram &program, std::size_t n,
                                      std::uint64_t seed);

// Systematic area-weighted resampling to exactly n points. When `ops` is set,
// only candidates from those source ops take part. Throws EmptyGeometry when
// nothing is left to draw from.
SurfacePointCloud resample(const SurfaceCandidates &candidates, std::size_t n,
                           const std::vector<std::size_t> *ops = nullptr);

// boundary_candidates + resample. Throws InvalidArgument for n == 0 and
// EmptyGeometry when no candidate survives.
SurfacePointCloud sample_surface(const SolidProgram &program, std::size_t n, std::uint64_t seed);

// Centres on the bounding-box midpoint and scales the largest extent to 2.
// Throws DegenerateExtent for a zero diagonal, EmptyCloud for no points.
SurfacePointCloud normalize_for_eval(const SurfacePointCloud &cloud);

// Same transform for both clouds, taken from their joint bounding box.
std::pair<SurfacePointCloud, SurfacePointCloud> normalize_jointly(const SurfacePointCloud &a,
                                                                  const SurfacePointCloud &b);

Box3 cloud_bounds(const SurfacePointCloud &cloud);

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<std::size_t> triangle_op;

  double area() const;
};

// Polygon segments used for a full circle of world radius r at chord
// tolerance tol (sagitta never exceeds tol).
std::size_t circle_segments(double r, double tol);

// Per-op surface triangles kept where the triangle centroid lies on the final
// boundary, oriented outward. Throws EmptyGeometry.
TriMesh tessellate(const SolidProgram &program, double tol);

std::string to_binary_stl(const TriMesh &mesh);
// {"vertices": [x, y, z, ...], "triangles": [i, j, k, ...], "ops": [...]}
std::string to_mesh_json(const TriMesh &mesh);

}  // namespace cadseq
