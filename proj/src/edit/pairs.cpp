#include "cadseq/canonical.hpp"
#include "cadseq/edit.hpp"
#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/validate.hpp"

namespace cadseq {

namespace {

constexpr std::size_t kProbeSamples = 256;
constexpr std::uint64_t kProbeSeed = 0x5eed;

bool has_material(const CadModel &model) {
  const SolidProgram program = compile(model, {.coerce_first_op = false});
  return !boundary_candidates(program, kProbeSamples, kProbeSeed).points.empty();
}

std::optional<EditPair> make_pair(const CadModel &original, EditScript deletion, EditPair::Kind kind,
                                  std::size_t op, std::size_t loop) {
  CadModel reduced;
  try {
    reduced = apply(original, deletion);
  } catch (const Error &) {
    return std::nullopt;
  }
  if (reduced.ops.empty()) return std::nullopt;
  const BooleanKind first = reduced.ops.front().boolean;
  if (first == BooleanKind::Cut || first == BooleanKind::Intersect) return std::nullopt;
  if (!has_material(reduced)) return std::nullopt;
  if (first != BooleanKind::New) {
    deletion.actions.push_back(ModifyParam{"ops[0].boolean", first, BooleanKind::New});
    if (deletion.edited_ops_b.empty() || deletion.edited_ops_b.front() != 0) {
      deletion.edited_ops_b.insert(deletion.edited_ops_b.begin(), 0);
    }
    // The op now at 0 was op 1 in the original.
    deletion.edited_ops_a.push_back(1);
  }
  ApplyResult applied = apply_detailed(original, deletion);
  EditPair pair;
  pair.kind = kind;
  pair.op = op;
  pair.loop = loop;
  pair.original = original;
  pair.reduced = std::move(applied.model);
  pair.deletion = std::move(applied.completed);
  pair.addition = std::move(applied.inverse);
  return pair;
}

}  // namespace

std::vector<EditPair> make_pairs(const CadModel &model) {
  const CadModel original = canonicalize(model);
  bool removable = original.ops.size() >= 2;
  for (const SketchExtrude &op : original.ops) removable = removable || op.profile.loops.size() >= 2;
  if (!removable) throw Error(ErrorCode::NothingRemovable, "model has a single op with a single loop");

  std::vector<EditPair> pairs;
  for (std::size_t i = 0; i < original.ops.size(); ++i) {
    if (original.ops.size() >= 2) {
      EditScript s;
      s.actions.push_back(DeleteOp{i, original.ops[i]});
      s.edited_ops_a = {i};
      if (auto p = make_pair(original, std::move(s), EditPair::Kind::Op, i, 0)) pairs.push_back(std::move(*p));
    }
    for (std::size_t k = 1; k < original.ops[i].profile.loops.size(); ++k) {
      EditScript s;
      s.actions.push_back(DeleteLoop{i, k, original.ops[i].profile.loops[k]});
      s.edited_ops_a = {i};
      s.edited_ops_b = {i};
      if (auto p = make_pair(original, std::move(s), EditPair::Kind::Loop, i, k)) pairs.push_back(std::move(*p));
    }
  }
  return pairs;
}

}  // namespace cadseq
