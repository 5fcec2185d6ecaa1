#pragma once

#include <cstdint>
#include <vector>

#include "cadseq/model.hpp"

namespace cadseq {

// Uniform grid of 2^bits levels per dimension over [lo, hi]. Dimension 0 and 1
// carry x/y coordinates (sketch points and frame origin), dimension 2 carries
// the frame origin z and the extrude distances.
struct QuantizationGrid {
  int bits = 8;
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};

  double step(int dim) const;
  std::uint32_t levels() const { return (std::uint32_t{1} << bits) - 1; }
};

// Structure of the source model plus one level index per quantized slot.
// Circles are quantized through the corners of their bounding square, so the
// recovered radius depends on where the circle sits relative to the grid.
struct QuantizedModel {
  CadModel structure;
  QuantizationGrid grid;
  std::vector<std::uint32_t> indices;
};

std::uint32_t quantize_value(double value, const QuantizationGrid &grid, int dim);
double dequantize_value(std::uint32_t index, const QuantizationGrid &grid, int dim);

// Throws InvalidArgument for a malformed grid, OutOfRange when a coordinate
// leaves the grid box, InvalidModel when the model does not validate.
QuantizedModel quantize(const CadModel &model, const QuantizationGrid &grid);
CadModel dequantize(const QuantizedModel &quantized);

// dequantize(quantize(model, grid)).
CadModel snap_to_grid(const CadModel &model, const QuantizationGrid &grid);

}  // namespace cadseq
