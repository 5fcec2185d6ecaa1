#pragma once

#include <charconv>
#include <string>

#include "cadseq/edit.hpp"

namespace cadseq::detail {

// Shortest text that reads back to the same double.
inline std::string number_text(double value) {
  if (value == 0.0) value = 0.0;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

// Script taking normalized `a` to `target`, which must already be normalized.
EditScript diff_to(const CadModel &a, const CadModel &target);

}  // namespace cadseq::detail
