#include "cadseq/quantize.hpp"

#include <cmath>
#include <string>

#include "cadseq/error.hpp"
#include "cadseq/validate.hpp"

namespace cadseq {

namespace {

double component(Vec3 v, int dim) { return dim == 0 ? v.x : dim == 1 ? v.y : v.z; }

void check_grid(const QuantizationGrid &grid) {
  if (grid.bits < 2 || grid.bits > 16) {
    throw Error(ErrorCode::InvalidArgument, "quantization bits must lie in [2, 16]");
  }
  for (int d = 0; d < 3; ++d) {
    if (!(component(grid.hi, d) > component(grid.lo, d))) {
      throw Error(ErrorCode::InvalidArgument, "quantization grid needs hi > lo on every axis");
    }
  }
}

class Encoder {
 public:
  Encoder(const QuantizationGrid &grid, std::vector<std::uint32_t> &out)
      : grid_(grid), out_(out) {}

  void put(double value, int dim) {
    const double lo = component(grid_.lo, dim);
    const double hi = component(grid_.hi, dim);
    if (!(value >= lo && value <= hi)) {
      throw Error(ErrorCode::OutOfRange, "coordinate " + std::to_string(value) +
                                             " outside grid axis " + std::to_string(dim));
    }
    out_.push_back(quantize_value(value, grid_, dim));
  }
  void put(Vec2 p) {
    put(p.x, 0);
    put(p.y, 1);
  }

 private:
  const QuantizationGrid &grid_;
  std::vector<std::uint32_t> &out_;
};

class Decoder {
 public:
  Decoder(const QuantizedModel &q) : q_(q) {}

  double get(int dim) {
    if (next_ >= q_.indices.size()) {
      throw Error(ErrorCode::InvalidArgument, "quantized model has too few indices");
    }
    return dequantize_value(q_.indices[next_++], q_.grid, dim);
  }
  Vec2 get2() {
    const double x = get(0);
    return {x, get(1)};
  }

 private:
  const QuantizedModel &q_;
  std::size_t next_ = 0;
};

}  // namespace

double QuantizationGrid::step(int dim) const {
  return (component(hi, dim) - component(lo, dim)) / static_cast<double>(levels());
}

std::uint32_t quantize_value(double value, const QuantizationGrid &grid, int dim) {
  const double lo = component(grid.lo, dim);
  const double hi = component(grid.hi, dim);
  const double t = (value - lo) / (hi - lo) * static_cast<double>(grid.levels());
  const long idx = std::lround(t);
  if (idx < 0) return 0;
  if (idx > static_cast<long>(grid.levels())) return grid.levels();
  return static_cast<std::uint32_t>(idx);
}

double dequantize_value(std::uint32_t index, const QuantizationGrid &grid, int dim) {
  const double lo = component(grid.lo, dim);
  const double hi = component(grid.hi, dim);
  return lo + static_cast<double>(index) * (hi - lo) / static_cast<double>(grid.levels());
}

QuantizedModel quantize(const CadModel &model, const QuantizationGrid &grid) {
  check_grid(grid);
  require_valid(model);
  QuantizedModel out{model, grid, {}};
  Encoder enc(grid, out.indices);
  for (const SketchExtrude &op : model.ops) {
    enc.put(op.frame.origin.x, 0);
    enc.put(op.frame.origin.y, 1);
    enc.put(op.frame.origin.z, 2);
    enc.put(op.extrude_toward, 2);
    enc.put(op.extrude_opposite, 2);
    for (const Loop &loop : op.profile.loops) {
      for (const Curve &curve : loop.curves) {
        if (const auto *circle = std::get_if<Circle>(&curve)) {
          const Vec2 r{circle->radius, circle->radius};
          enc.put(circle->center - r);
          enc.put(circle->center + r);
        } else {
          enc.put(curve_start(curve));
          enc.put(curve_end(curve));
        }
      }
    }
  }
  return out;
}

CadModel dequantize(const QuantizedModel &quantized) {
  CadModel out = quantized.structure;
  Decoder dec(quantized);
  for (SketchExtrude &op : out.ops) {
    op.frame.origin.x = dec.get(0);
    op.frame.origin.y = dec.get(1);
    op.frame.origin.z = dec.get(2);
    op.extrude_toward = dec.get(2);
    op.extrude_opposite = dec.get(2);
    for (Loop &loop : op.profile.loops) {
      for (Curve &curve : loop.curves) {
        if (auto *circle = std::get_if<Circle>(&curve)) {
          const Vec2 lo = dec.get2();
          const Vec2 hi = dec.get2();
          circle->center = (lo + hi) * 0.5;
          circle->radius = 0.25 * ((hi.x - lo.x) + (hi.y - lo.y));
        } else if (auto *line = std::get_if<Line>(&curve)) {
          line->start = dec.get2();
          line->end = dec.get2();
        } else {
          auto &arc = std::get<Arc>(curve);
          arc.start = dec.get2();
          arc.end = dec.get2();
        }
      }
    }
  }
  return out;
}

CadModel snap_to_grid(const CadModel &model, const QuantizationGrid &grid) {
  return dequantize(quantize(model, grid));
}

}  // namespace cadseq
