#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "cadseq/canonical.hpp"
#include "cadseq/error.hpp"
#include "cadseq/metrics.hpp"

namespace cadseq {

namespace {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using BoostPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using Tree = bgi::rtree<std::pair<BoostPoint, std::size_t>, bgi::rstar<16>>;

double squared(Vec3 a, Vec3 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

// Mean over `from` of the squared distance to the nearest point of `to`.
double mean_nearest(const std::vector<Vec3> &from, const std::vector<Vec3> &to) {
  std::vector<std::pair<BoostPoint, std::size_t>> values;
  values.reserve(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) values.emplace_back(BoostPoint(to[i].x, to[i].y, to[i].z), i);
  const Tree tree(values.begin(), values.end());
  double sum = 0.0;
  std::vector<std::pair<BoostPoint, std::size_t>> hit;
  for (const Vec3 &p : from) {
    hit.clear();
    tree.query(bgi::nearest(BoostPoint(p.x, p.y, p.z), 1), std::back_inserter(hit));
    sum += squared(p, to[hit.front().second]);
  }
  return sum / static_cast<double>(from.size());
}

CdResult make_result(double value) { return {value, value * kCdReportScale}; }

std::vector<std::size_t> present(const std::vector<std::size_t> &ops, std::size_t n_ops) {
  std::vector<std::size_t> out;
  for (const std::size_t i : ops) {
    if (i < n_ops) out.push_back(i);
  }
  return out;
}

SurfacePointCloud edited_cloud(const CadModel &model, const std::vector<std::size_t> &edited, std::size_t n,
                               std::uint64_t seed) {
  const SolidProgram program = compile(model);
  const SurfaceCandidates candidates = boundary_candidates(program, n, seed);
  const std::vector<std::size_t> ops = present(edited, model.ops.size());
  if (ops.empty()) return resample(candidates, n);
  bool retained = false;
  for (const std::size_t op : candidates.source_op) {
    retained = retained || std::find(ops.begin(), ops.end(), op) != ops.end();
  }
  if (retained) return resample(candidates, n, &ops);
  return sample_surface(isolate(program, ops), n, seed);
}

}  // namespace

CdResult chamfer(const std::vector<Vec3> &a, const std::vector<Vec3> &b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyCloud, "chamfer distance needs two non-empty clouds");
  return make_result(mean_nearest(a, b) + mean_nearest(b, a));
}

CdResult chamfer(const SurfacePointCloud &a, const SurfacePointCloud &b) { return chamfer(a.points, b.points); }

CdResult model_chamfer(const CadModel &generated, const CadModel &target, std::size_t n, std::uint64_t seed) {
  const SurfacePointCloud g = normalize_for_eval(sample_surface(compile(canonicalize(generated)), n, seed));
  const SurfacePointCloud t = normalize_for_eval(sample_surface(compile(canonicalize(target)), n, seed));
  return chamfer(g, t);
}

CdResult localized_chamfer(const CadModel &generated, const CadModel &target, const EditScript &script,
                           std::size_t n, std::uint64_t seed) {
  if (script.empty()) throw Error(ErrorCode::EmptyEditSet, "localized chamfer needs a non-empty edit script");
  const CadModel g = canonicalize(generated);
  const CadModel t = canonicalize(target);
  const auto [gn, tn] = normalize_jointly(edited_cloud(g, script.edited_ops_b, n, seed),
                                          edited_cloud(t, script.edited_ops_b, n, seed));
  return chamfer(gn, tn);
}

}  // namespace cadseq
