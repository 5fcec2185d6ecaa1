#pragma once

#include <string>
#include <vector>

#include "cadseq/model.hpp"

namespace cadseq {

inline constexpr double kClosureTolerance = 1e-7;
inline constexpr double kFrameTolerance = 1e-9;
inline constexpr double kMinLoopArea = 1e-12;

struct Violation {
  std::string path;  // e.g. "ops[0].profile.loops[1].curves[2]"
  std::string code;  // e.g. "loop_not_closed"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
};

// Total: never throws, reports NaN/inf fields as violations.
ValidationReport validate(const CadModel &model);

// Throws Error{InvalidModel} carrying the first violation.
void require_valid(const CadModel &model);

}  // namespace cadseq
