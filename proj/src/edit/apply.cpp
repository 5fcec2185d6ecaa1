#include <algorithm>
#include <optional>

#include "cadseq/canonical.hpp"
#include "cadseq/edit.hpp"
#include "cadseq/error.hpp"
#include "cadseq/validate.hpp"
#include "edit_support.hpp"

namespace cadseq {

namespace {

[[noreturn]] void out_of_bounds(const std::string &what) {
  throw Error(ErrorCode::IndexOutOfBounds, what);
}

// Per-position bookkeeping used to derive edited sets from the actions.
struct Tracker {
  std::vector<std::optional<std::size_t>> origin;  // source index, none when inserted
  std::vector<bool> touched;
  std::vector<std::size_t> removed;  // source indices of deleted ops

  explicit Tracker(std::size_t n) : touched(n, false) {
    for (std::size_t i = 0; i < n; ++i) origin.emplace_back(i);
  }
  void erase(std::size_t i) {
    if (origin[i]) removed.push_back(*origin[i]);
    origin.erase(origin.begin() + static_cast<std::ptrdiff_t>(i));
    touched.erase(touched.begin() + static_cast<std::ptrdiff_t>(i));
  }
  void insert(std::size_t i) {
    origin.insert(origin.begin() + static_cast<std::ptrdiff_t>(i), std::nullopt);
    touched.insert(touched.begin() + static_cast<std::ptrdiff_t>(i), true);
  }
  void finish(EditScript &script) const {
    std::vector<std::size_t> a = removed;
    for (std::size_t i = 0; i < origin.size(); ++i) {
      if (!touched[i]) continue;
      script.edited_ops_b.push_back(i);
      if (origin[i]) a.push_back(*origin[i]);
    }
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    script.edited_ops_a = std::move(a);
  }
};

std::size_t path_op(const std::string &path) {
  return static_cast<std::size_t>(std::stoul(path.substr(path.find('[') + 1)));
}

struct Applier {
  CadModel &model;
  Tracker &tracker;

  void operator()(DeleteOp &a) const {
    if (a.op >= model.ops.size()) {
      out_of_bounds("delete_op index " + std::to_string(a.op) + " but the model has " +
                    std::to_string(model.ops.size()) + " ops");
    }
    const SketchExtrude current = model.ops[a.op];
    if (a.payload && normalize_op(*a.payload) != current) {
      throw Error(ErrorCode::StaleOldValue, "delete_op " + std::to_string(a.op) + " payload does not match the model");
    }
    a.payload = current;
    model.ops.erase(model.ops.begin() + static_cast<std::ptrdiff_t>(a.op));
    tracker.erase(a.op);
  }

  void operator()(InsertOp &a) const {
    if (a.op > model.ops.size()) {
      out_of_bounds("insert_op index " + std::to_string(a.op) + " but the model has " +
                    std::to_string(model.ops.size()) + " ops");
    }
    model.ops.insert(model.ops.begin() + static_cast<std::ptrdiff_t>(a.op), a.payload);
    tracker.insert(a.op);
  }

  Profile &profile(std::size_t op, const char *action) const {
    if (op >= model.ops.size()) {
      out_of_bounds(std::string(action) + " op index " + std::to_string(op) + " but the model has " +
                    std::to_string(model.ops.size()) + " ops");
    }
    return model.ops[op].profile;
  }

  void operator()(DeleteLoop &a) const {
    Profile &p = profile(a.op, "delete_loop");
    if (a.loop >= p.loops.size()) {
      out_of_bounds("delete_loop index " + std::to_string(a.loop) + " but op " + std::to_string(a.op) + " has " +
                    std::to_string(p.loops.size()) + " loops");
    }
    const Loop current = p.loops[a.loop];
    if (a.payload && normalize_loop(*a.payload) != current) {
      throw Error(ErrorCode::StaleOldValue, "delete_loop " + std::to_string(a.op) + " " + std::to_string(a.loop) +
                                                " payload does not match the model");
    }
    a.payload = current;
    p.loops.erase(p.loops.begin() + static_cast<std::ptrdiff_t>(a.loop));
    tracker.touched[a.op] = true;
  }

  void operator()(InsertLoop &a) const {
    Profile &p = profile(a.op, "insert_loop");
    if (a.loop > p.loops.size()) {
      out_of_bounds("insert_loop index " + std::to_string(a.loop) + " but op " + std::to_string(a.op) + " has " +
                    std::to_string(p.loops.size()) + " loops");
    }
    p.loops.insert(p.loops.begin() + static_cast<std::ptrdiff_t>(a.loop), a.payload);
    tracker.touched[a.op] = true;
  }

  void operator()(ModifyParam &a) const {
    const ParamValue current = get_param(model, a.path);
    if (current != a.old_value) {
      throw Error(ErrorCode::StaleOldValue, a.path + " is " + to_string(current) + ", script expects " +
                                                to_string(a.old_value));
    }
    set_param(model, a.path, a.new_value);
    tracker.touched[path_op(a.path)] = true;
  }
};

}  // namespace

ApplyResult apply_detailed(const CadModel &model, const EditScript &script) {
  require_valid(model);
  const CadModel start = normalize(model);
  ApplyResult result{start, script, {}};
  Tracker tracker(start.ops.size());
  for (EditAction &action : result.completed.actions) std::visit(Applier{result.model, tracker}, action);
  if (script.edited_ops_a.empty() && script.edited_ops_b.empty()) tracker.finish(result.completed);

  const ValidationReport report = validate(result.model);
  if (!report.ok()) {
    const Violation &v = report.violations.front();
    throw Error(ErrorCode::InvalidResult, v.path + ": " + v.message + " (" + v.code + ")");
  }
  const CadModel normalized = normalize(result.model);
  if (normalized == result.model) {
    result.inverse = invert(result.completed);
  } else {
    result.model = normalized;
    result.inverse = detail::diff_to(normalized, start);
  }
  return result;
}

CadModel apply(const CadModel &model, const EditScript &script) {
  return apply_detailed(model, script).model;
}

EditScript invert(const EditScript &script) {
  EditScript out;
  out.edited_ops_a = script.edited_ops_b;
  out.edited_ops_b = script.edited_ops_a;
  for (auto it = script.actions.rbegin(); it != script.actions.rend(); ++it) {
    out.actions.push_back(std::visit(
        [](const auto &a) -> EditAction {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, DeleteOp>) {
            if (!a.payload) throw Error(ErrorCode::NonInvertible, "delete_op " + std::to_string(a.op) + " has no payload");
            return InsertOp{a.op, *a.payload};
          } else if constexpr (std::is_same_v<T, InsertOp>) {
            return DeleteOp{a.op, a.payload};
          } else if constexpr (std::is_same_v<T, DeleteLoop>) {
            if (!a.payload) {
              throw Error(ErrorCode::NonInvertible,
                          "delete_loop " + std::to_string(a.op) + " " + std::to_string(a.loop) + " has no payload");
            }
            return InsertLoop{a.op, a.loop, *a.payload};
          } else if constexpr (std::is_same_v<T, InsertLoop>) {
            return DeleteLoop{a.op, a.loop, a.payload};
          } else {
            return ModifyParam{a.path, a.new_value, a.old_value};
          }
        },
        *it));
  }
  return out;
}

}  // namespace cadseq
