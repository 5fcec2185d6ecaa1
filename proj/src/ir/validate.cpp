#include "cadseq/validate.hpp"

#include <cmath>
#include <numbers>

#include "cadseq/error.hpp"

namespace cadseq {

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport &report) : report_(report) {}

  void add(std::string path, std::string code, std::string message) {
    report_.violations.push_back({std::move(path), std::move(code), std::move(message)});
  }

  bool finite(const std::string &path, double v) {
    if (std::isfinite(v)) return true;
    add(path, "non_finite", "value is not finite");
    return false;
  }

  bool finite(const std::string &path, Vec2 v) {
    if (is_finite(v)) return true;
    add(path, "non_finite", "point has a non-finite coordinate");
    return false;
  }

  bool finite(const std::string &path, Vec3 v) {
    if (is_finite(v)) return true;
    add(path, "non_finite", "vector has a non-finite component");
    return false;
  }

  void frame(const std::string &path, const CoordinateFrame &f) {
    bool ok = finite(path + ".origin", f.origin);
    ok = finite(path + ".axis_x", f.axis_x) && ok;
    ok = finite(path + ".axis_y", f.axis_y) && ok;
    ok = finite(path + ".axis_z", f.axis_z) && ok;
    if (!ok) return;
    const Vec3 axes[3] = {f.axis_x, f.axis_y, f.axis_z};
    bool orthonormal = true;
    for (int i = 0; i < 3; ++i) {
      if (!(std::abs(norm(axes[i]) - 1.0) <= kFrameTolerance)) orthonormal = false;
      for (int j = i + 1; j < 3; ++j) {
        if (!(std::abs(dot(axes[i], axes[j])) <= kFrameTolerance)) orthonormal = false;
      }
    }
    if (!orthonormal) {
      add(path, "frame_not_orthonormal", "frame axes are not orthonormal within 1e-9");
      return;
    }
    if (!(dot(cross(f.axis_x, f.axis_y), f.axis_z) > 0.0)) {
      add(path, "frame_left_handed", "frame is not right-handed");
    }
  }

  // Returns true when every curve is individually well formed.
  bool curve(const std::string &path, const Curve &c) {
    if (const auto *line = std::get_if<Line>(&c)) {
      if (!finite(path + ".start", line->start) || !finite(path + ".end", line->end)) return false;
      if (!(norm(line->end - line->start) > 1e-12)) {
        add(path, "degenerate_line", "line start equals end");
        return false;
      }
      return true;
    }
    if (const auto *arc = std::get_if<Arc>(&c)) {
      bool ok = finite(path + ".start", arc->start);
      ok = finite(path + ".end", arc->end) && ok;
      ok = finite(path + ".sweep", arc->sweep) && ok;
      if (!ok) return false;
      if (!(arc->sweep > 0.0 && arc->sweep < 2.0 * std::numbers::pi)) {
        add(path + ".sweep", "sweep_out_of_range", "arc sweep must lie in (0, 2*pi)");
        return false;
      }
      if (!(norm(arc->end - arc->start) > 1e-12)) {
        add(path, "degenerate_arc", "arc start equals end");
        return false;
      }
      const ArcGeometry g = arc_geometry(*arc);
      if (!is_finite(g.center) || !std::isfinite(g.radius)) {
        add(path, "degenerate_arc", "arc center or radius is not finite");
        return false;
      }
      return true;
    }
    const auto &circle = std::get<Circle>(c);
    bool ok = finite(path + ".center", circle.center);
    ok = finite(path + ".radius", circle.radius) && ok;
    if (!ok) return false;
    if (!(circle.radius > 0.0)) {
      add(path + ".radius", "non_positive_radius", "circle radius must be positive");
      return false;
    }
    return true;
  }

  // Returns true when the loop is closed and non-degenerate.
  bool loop(const std::string &path, const Loop &l) {
    if (l.curves.empty()) {
      add(path, "empty_loop", "loop has no curves");
      return false;
    }
    bool curves_ok = true;
    std::size_t circles = 0;
    for (std::size_t k = 0; k < l.curves.size(); ++k) {
      curves_ok = curve(path + ".curves[" + std::to_string(k) + "]", l.curves[k]) && curves_ok;
      if (std::holds_alternative<Circle>(l.curves[k])) ++circles;
    }
    if (circles > 0 && l.curves.size() != 1) {
      add(path, "mixed_circle", "a circle must be the only curve of its loop");
      return false;
    }
    if (circles == 0 && l.curves.size() < 2) {
      add(path, "too_few_curves", "a loop of lines and arcs needs at least two curves");
      return false;
    }
    if (!curves_ok) return false;
    if (circles == 0) {
      const std::size_t n = l.curves.size();
      for (std::size_t k = 0; k < n; ++k) {
        const Vec2 end = curve_end(l.curves[k]);
        const Vec2 next = curve_start(l.curves[(k + 1) % n]);
        if (!(norm(next - end) <= kClosureTolerance)) {
          add(path, "loop_not_closed",
              "curve " + std::to_string(k) + " ends away from the start of curve " +
                  std::to_string((k + 1) % n));
          return false;
        }
      }
    }
    const double area = std::abs(signed_area(l));
    if (!(area > kMinLoopArea)) {
      add(path, "degenerate_loop", "loop encloses no area");
      return false;
    }
    return true;
  }

  void profile(const std::string &path, const Profile &p) {
    if (p.loops.empty()) {
      add(path, "empty_profile", "profile has no loops");
      return;
    }
    std::vector<bool> ok(p.loops.size());
    for (std::size_t j = 0; j < p.loops.size(); ++j) {
      ok[j] = loop(path + ".loops[" + std::to_string(j) + "]", p.loops[j]);
    }
    if (!ok[0]) return;
    const Loop &outer = p.loops[0];
    const double outer_area = std::abs(signed_area(outer));
    for (std::size_t j = 1; j < p.loops.size(); ++j) {
      if (!ok[j]) continue;
      const std::string hole_path = path + ".loops[" + std::to_string(j) + "]";
      const Loop &hole = p.loops[j];
      if (!(std::abs(signed_area(hole)) < outer_area)) {
        add(hole_path, "hole_exceeds_outer", "hole encloses at least the outer loop's area");
        continue;
      }
      for (const Vec2 v : hole_vertices(hole)) {
        if (!point_in_loop(outer, v)) {
          add(hole_path, "hole_outside_outer", "hole vertex lies outside the outer loop");
          break;
        }
      }
    }
  }

 private:
  static std::vector<Vec2> hole_vertices(const Loop &hole) {
    std::vector<Vec2> out;
    if (const auto *circle = std::get_if<Circle>(&hole.curves.front())) {
      const double r = circle->radius;
      out = {circle->center + Vec2{r, 0}, circle->center + Vec2{0, r},
             circle->center - Vec2{r, 0}, circle->center - Vec2{0, r}};
      return out;
    }
    for (const Curve &c : hole.curves) out.push_back(curve_start(c));
    return out;
  }

  ValidationReport &report_;
};

}  // namespace

bool ValidationReport::has(std::string_view code) const {
  for (const Violation &v : violations) {
    if (v.code == code) return true;
  }
  return false;
}

ValidationReport validate(const CadModel &model) {
  ValidationReport report;
  Checker check(report);
  for (std::size_t i = 0; i < model.ops.size(); ++i) {
    const SketchExtrude &op = model.ops[i];
    const std::string path = "ops[" + std::to_string(i) + "]";
    check.frame(path + ".frame", op.frame);
    const bool toward_ok = check.finite(path + ".extrude_toward", op.extrude_toward);
    const bool opposite_ok = check.finite(path + ".extrude_opposite", op.extrude_opposite);
    if (toward_ok && op.extrude_toward < 0.0) {
      check.add(path + ".extrude_toward", "negative_extent", "extrude distance must be >= 0");
    }
    if (opposite_ok && op.extrude_opposite < 0.0) {
      check.add(path + ".extrude_opposite", "negative_extent", "extrude distance must be >= 0");
    }
    if (toward_ok && opposite_ok && !(op.extrude_toward + op.extrude_opposite > 0.0)) {
      check.add(path, "degenerate_extrude", "total extrusion length must be positive");
    }
    if (check.finite(path + ".scale", op.scale) && !(op.scale > 0.0)) {
      check.add(path + ".scale", "non_positive_scale", "sketch scale must be positive");
    }
    check.profile(path + ".profile", op.profile);
  }
  return report;
}

void require_valid(const CadModel &model) {
  const ValidationReport report = validate(model);
  if (!report.ok()) {
    const Violation &v = report.violations.front();
    throw Error(ErrorCode::InvalidModel, v.path + ": " + v.message + " (" + v.code + ")");
  }
}

}  // namespace cadseq
