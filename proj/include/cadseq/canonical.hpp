#pragma once

#include "cadseq/model.hpp"

namespace cadseq {

// Rounds to 12 significant digits; -0 becomes 0. Idempotent.
double round_significant(double value);

// Normal form without touching boolean kinds:
//  - numeric fields rounded to 12 significant digits
//  - each curve start snapped to the previous curve end
//  - each loop rotated to start at its lexicographically smallest vertex
//  - holes ordered by (min x, min y) of their bounds
// Precondition: the model validates.
CadModel normalize(const CadModel &model);

// normalize() plus coercion of the first op to New. Throws InvalidModel.
CadModel canonicalize(const CadModel &model);

// Single-op / single-loop variants used by edit payloads.
SketchExtrude normalize_op(const SketchExtrude &op);
Loop normalize_loop(const Loop &loop);

}  // namespace cadseq
