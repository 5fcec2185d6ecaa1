#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cadseq/canonical.hpp"
#include "cadseq/datagen.hpp"
#include "cadseq/error.hpp"

namespace cadseq {

namespace {

constexpr double kEyeDistance = 2.5;

struct Direction {
  const char *name;
  Vec3 dir;
  Vec3 up;
};

}  // namespace

ViewSpec nine_views(const CadModel &model) {
  const Box3 box = bbox(compile(canonicalize(model)));
  const double diagonal = box.diagonal();
  if (!(diagonal > 0.0)) throw Error(ErrorCode::DegenerateExtent, "model bounding box has zero diagonal");
  const double s = 1.0 / std::sqrt(3.0);
  const Vec3 z_up{0, 0, 1};
  const Vec3 y_up{0, 1, 0};
  const std::array<Direction, 9> directions{{
      {"+x", {1, 0, 0}, z_up},
      {"-x", {-1, 0, 0}, z_up},
      {"+y", {0, 1, 0}, z_up},
      {"-y", {0, -1, 0}, z_up},
      {"+z", {0, 0, 1}, y_up},
      {"-z", {0, 0, -1}, y_up},
      {"+x+y+z", {s, s, s}, z_up},
      {"-x+y+z", {-s, s, s}, z_up},
      {"+x-y+z", {s, -s, s}, z_up},
  }};
  ViewSpec spec;
  spec.box = box;
  const Vec3 c = box.center();
  const double r = kEyeDistance * diagonal;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const Direction &d = directions[i];
    spec.poses[i] = {d.name, {c.x + r * d.dir.x, c.y + r * d.dir.y, c.z + r * d.dir.z}, c, d.up};
  }
  return spec;
}

Split split_indices(std::size_t n, double train, double validation, double test, std::uint64_t seed) {
  if (train < 0 || validation < 0 || test < 0 || std::abs(train + validation + test - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "split fractions must be non-negative and sum to 1");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(train * static_cast<double>(n)));
  const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::floor(validation * static_cast<double>(n))));
  Split split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  for (auto *part : {&split.train, &split.validation, &split.test}) std::sort(part->begin(), part->end());
  return split;
}

}  // namespace cadseq
