#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cadseq/model.hpp"

namespace cadseq {

struct DeleteOp {
  std::size_t op = 0;
  std::optional<SketchExtrude> payload;  // filled by apply; needed to invert

  bool operator==(const DeleteOp &) const = default;
};

struct InsertOp {
  std::size_t op = 0;
  SketchExtrude payload;

  bool operator==(const InsertOp &) const = default;
};

struct DeleteLoop {
  std::size_t op = 0;
  std::size_t loop = 0;
  std::optional<Loop> payload;

  bool operator==(const DeleteLoop &) const = default;
};

struct InsertLoop {
  std::size_t op = 0;
  std::size_t loop = 0;
  Loop payload;

  bool operator==(const InsertLoop &) const = default;
};

using ParamValue = std::variant<double, BooleanKind, bool>;

// path examples: "ops[1].extrude_toward", "ops[0].boolean",
// "ops[0].frame.origin.z", "ops[2].profile.loops[1].curves[0].radius",
// "ops[0].profile.loops[0].curves[3].counterclockwise".
struct ModifyParam {
  std::string path;
  ParamValue old_value;
  ParamValue new_value;

  bool operator==(const ModifyParam &) const = default;
};

using EditAction = std::variant<DeleteOp, InsertOp, DeleteLoop, InsertLoop, ModifyParam>;

struct EditScript {
  std::vector<EditAction> actions;
  std::vector<std::size_t> edited_ops_a;  // deleted or modified ops, source indices
  std::vector<std::size_t> edited_ops_b;  // inserted or modified ops, result indices

  bool empty() const { return actions.empty(); }
  bool operator==(const EditScript &) const = default;
};

std::string to_string(const ParamValue &value);

// Reads and writes one parameter; throws InvalidArgument for a malformed path
// and IndexOutOfBounds when an index does not exist.
ParamValue get_param(const CadModel &model, std::string_view path);
void set_param(CadModel &model, std::string_view path, const ParamValue &value);

// Every addressable parameter path of one op, in a fixed order.
std::vector<std::string> param_paths(const SketchExtrude &op, std::size_t index);

struct ApplyResult {
  CadModel model;
  EditScript completed;  // delete payloads filled in
  EditScript inverse;    // apply(model, inverse) restores normalize(input)
};

// The input is normalized first and the result is validated and normalized.
// The first op's boolean kind is never coerced. Throws IndexOutOfBounds,
// StaleOldValue (also for delete payloads that do not match) and InvalidResult.
// When the script carries no edited sets, `completed` gets them from the
// actions.
ApplyResult apply_detailed(const CadModel &model, const EditScript &script);
CadModel apply(const CadModel &model, const EditScript &script);

// Minimal script under the cost model: op insert/delete 1, loop insert/delete
// 0.5, parameter change 0.1. A changed op is modified when that costs no more
// than deleting and inserting it. apply(a, diff(a, b)) == canonicalize(b).
EditScript diff(const CadModel &a, const CadModel &b);

// Reversed actions, each inverted, with edited sets swapped. Throws
// NonInvertible when a delete carries no payload.
EditScript invert(const EditScript &script);

struct EditPair {
  enum class Kind { Op, Loop };

  Kind kind = Kind::Op;
  std::size_t op = 0;
  std::size_t loop = 0;
  CadModel original;   // canonical
  CadModel reduced;    // canonical
  EditScript deletion;  // original -> reduced
  EditScript addition;  // reduced -> original
};

// One pair per removable op and per hole loop. Removals that leave no
// material, or leave a Cut or Intersect as the first op, are skipped. Throws
// NothingRemovable when the model has a single op with a single loop.
std::vector<EditPair> make_pairs(const CadModel &model);

// Text form, one action per line:
//   delete_op 2 <operation>...</operation>
//   insert_op 0 <operation>...</operation>
//   delete_loop 1 2 <loop>...</loop>
//   insert_loop 1 2 <loop>...</loop>
//   modify ops[0].extrude_toward 1 -> 2
//   edited_a 0 2
//   edited_b 1
// Blank lines and lines starting with '#' are ignored. Throws ParseFailed.
std::string print_script(const EditScript &script);
EditScript parse_script(std::string_view text);

// Structured form used by the service.
std::string script_to_json(const EditScript &script);
EditScript script_from_json(std::string_view text);

}  // namespace cadseq
