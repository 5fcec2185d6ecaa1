#include <algorithm>
#include <limits>

#include "cadseq/canonical.hpp"
#include "cadseq/edit.hpp"
#include "cadseq/validate.hpp"
#include "edit_support.hpp"

namespace cadseq {

namespace {

// Costs in tenths: op insert/delete 10, loop insert/delete 5, parameter 1.
constexpr int kOpCost = 10;
constexpr int kLoopCost = 5;
constexpr int kInf = std::numeric_limits<int>::max() / 4;

bool same_structure(const Loop &a, const Loop &b) {
  if (a.curves.size() != b.curves.size()) return false;
  for (std::size_t i = 0; i < a.curves.size(); ++i) {
    if (a.curves[i].index() != b.curves[i].index()) return false;
  }
  return true;
}

int count(bool differs) { return differs ? 1 : 0; }

int vec_diff(Vec2 a, Vec2 b) { return count(a.x != b.x) + count(a.y != b.y); }
int vec_diff(Vec3 a, Vec3 b) { return count(a.x != b.x) + count(a.y != b.y) + count(a.z != b.z); }

int loop_param_diff(const Loop &a, const Loop &b) {
  int n = 0;
  for (std::size_t i = 0; i < a.curves.size(); ++i) {
    n += std::visit(
        [&](const auto &ca) {
          using T = std::decay_t<decltype(ca)>;
          const T &cb = std::get<T>(b.curves[i]);
          if constexpr (std::is_same_v<T, Circle>) {
            return vec_diff(ca.center, cb.center) + count(ca.radius != cb.radius);
          } else if constexpr (std::is_same_v<T, Arc>) {
            return vec_diff(ca.start, cb.start) + vec_diff(ca.end, cb.end) + count(ca.sweep != cb.sweep) +
                   count(ca.counterclockwise != cb.counterclockwise);
          } else {
            return vec_diff(ca.start, cb.start) + vec_diff(ca.end, cb.end);
          }
        },
        a.curves[i]);
  }
  return n;
}

// Pairs (i, j) of an order-preserving alignment; unmatched items are
// deleted (from a) or inserted (from b).
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  std::vector<std::size_t> deleted;
  std::vector<std::size_t> inserted;
  int cost = 0;
};

// Edit-distance alignment. `sub(i, j)` returns the cost of turning a[i] into
// b[j], or kInf; substitution is taken whenever it is not dearer than delete
// plus insert.
template <typename Sub>
Alignment align(std::size_t n, std::size_t m, int unit, Sub sub) {
  std::vector<std::vector<int>> sub_cost(n, std::vector<int>(m, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const int c = sub(i, j);
      if (c <= 2 * unit) sub_cost[i][j] = c;
    }
  }
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, kInf));
  dp[n][m] = 0;
  // Suffix formulation so that backtracking from the front prefers the
  // lowest indices on ties.
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n && j == m) continue;
      int best = kInf;
      if (i < n && j < m && sub_cost[i][j] < kInf) best = std::min(best, sub_cost[i][j] + dp[i + 1][j + 1]);
      if (i < n) best = std::min(best, unit + dp[i + 1][j]);
      if (j < m) best = std::min(best, unit + dp[i][j + 1]);
      dp[i][j] = best;
    }
  }
  Alignment out;
  out.cost = dp[0][0];
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && sub_cost[i][j] < kInf && dp[i][j] == sub_cost[i][j] + dp[i + 1][j + 1]) {
      out.matched.emplace_back(i++, j++);
    } else if (i < n && dp[i][j] == unit + dp[i + 1][j]) {
      out.deleted.push_back(i++);
    } else {
      out.inserted.push_back(j++);
    }
  }
  return out;
}

struct LoopPlan {
  Alignment holes;   // indices relative to loops[1..]
  bool outer_matched = false;
  int cost = 0;
};

LoopPlan plan_loops(const Profile &a, const Profile &b) {
  LoopPlan plan;
  if (same_structure(a.loops[0], b.loops[0])) {
    plan.outer_matched = true;
    plan.cost += loop_param_diff(a.loops[0], b.loops[0]);
  } else {
    plan.cost += 2 * kLoopCost;
  }
  plan.holes = align(a.loops.size() - 1, b.loops.size() - 1, kLoopCost, [&](std::size_t i, std::size_t j) {
    const Loop &la = a.loops[i + 1];
    const Loop &lb = b.loops[j + 1];
    return same_structure(la, lb) ? loop_param_diff(la, lb) : kInf;
  });
  plan.cost += plan.holes.cost;
  return plan;
}

int op_param_diff(const SketchExtrude &a, const SketchExtrude &b) {
  return count(a.boolean != b.boolean) + count(a.scale != b.scale) + count(a.extrude_toward != b.extrude_toward) +
         count(a.extrude_opposite != b.extrude_opposite) + vec_diff(a.frame.origin, b.frame.origin) +
         vec_diff(a.frame.axis_x, b.frame.axis_x) + vec_diff(a.frame.axis_y, b.frame.axis_y) +
         vec_diff(a.frame.axis_z, b.frame.axis_z);
}

}  // namespace

namespace detail {

EditScript diff_to(const CadModel &a, const CadModel &b) {
  const Alignment ops = align(a.ops.size(), b.ops.size(), kOpCost, [&](std::size_t i, std::size_t j) {
    return op_param_diff(a.ops[i], b.ops[j]) + plan_loops(a.ops[i].profile, b.ops[j].profile).cost;
  });

  EditScript script;
  for (auto it = ops.deleted.rbegin(); it != ops.deleted.rend(); ++it) {
    script.actions.push_back(DeleteOp{*it, a.ops[*it]});
  }
  for (const std::size_t j : ops.inserted) script.actions.push_back(InsertOp{j, b.ops[j]});

  // Model after the op-level actions: matched ops still carry a's content.
  CadModel x = b;
  for (const auto &[i, j] : ops.matched) x.ops[j] = a.ops[i];

  std::vector<std::size_t> edited_a(ops.deleted);
  std::vector<std::size_t> edited_b(ops.inserted);
  for (const auto &[i, j] : ops.matched) {
    if (a.ops[i] == b.ops[j]) continue;
    edited_a.push_back(i);
    edited_b.push_back(j);
    const Profile &pa = a.ops[i].profile;
    const Profile &pb = b.ops[j].profile;
    const LoopPlan plan = plan_loops(pa, pb);

    std::vector<std::size_t> loop_deleted, loop_inserted;
    if (!plan.outer_matched) {
      loop_deleted.push_back(0);
      loop_inserted.push_back(0);
    }
    for (const std::size_t k : plan.holes.deleted) loop_deleted.push_back(k + 1);
    for (const std::size_t k : plan.holes.inserted) loop_inserted.push_back(k + 1);
    std::sort(loop_deleted.begin(), loop_deleted.end());
    std::sort(loop_inserted.begin(), loop_inserted.end());
    for (auto it = loop_deleted.rbegin(); it != loop_deleted.rend(); ++it) {
      script.actions.push_back(DeleteLoop{j, *it, pa.loops[*it]});
    }
    for (const std::size_t k : loop_inserted) script.actions.push_back(InsertLoop{j, k, pb.loops[k]});

    Profile &px = x.ops[j].profile;
    px = pb;
    if (plan.outer_matched) px.loops[0] = pa.loops[0];
    for (const auto &[ka, kb] : plan.holes.matched) px.loops[kb + 1] = pa.loops[ka + 1];

    for (const std::string &path : param_paths(b.ops[j], j)) {
      const ParamValue from = get_param(x, path);
      const ParamValue to = get_param(b, path);
      if (from != to) script.actions.push_back(ModifyParam{path, from, to});
    }
  }
  std::sort(edited_a.begin(), edited_a.end());
  std::sort(edited_b.begin(), edited_b.end());
  script.edited_ops_a = std::move(edited_a);
  script.edited_ops_b = std::move(edited_b);
  return script;
}

}  // namespace detail

EditScript diff(const CadModel &a, const CadModel &b) {
  require_valid(a);
  return detail::diff_to(normalize(a), canonicalize(b));
}

}  // namespace cadseq
