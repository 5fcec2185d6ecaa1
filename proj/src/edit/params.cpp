#include <charconv>

#include "cadseq/edit.hpp"
#include "cadseq/error.hpp"
#include "edit_support.hpp"

namespace cadseq {

namespace {

using Ref = std::variant<double *, BooleanKind *, bool *>;

class PathReader {
 public:
  explicit PathReader(std::string_view path) : path_(path), rest_(path) {}

  // Consumes `name` followed by '.' or end.
  bool field(std::string_view name) {
    if (rest_.substr(0, name.size()) != name) return false;
    const std::string_view after = rest_.substr(name.size());
    if (!after.empty() && after.front() != '.' && after.front() != '[') return false;
    rest_ = after;
    return true;
  }

  std::size_t index() {
    if (rest_.empty() || rest_.front() != '[') bad();
    const std::size_t close = rest_.find(']');
    if (close == std::string_view::npos || close == 1) bad();
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(rest_.data() + 1, rest_.data() + close, value);
    if (ec != std::errc() || ptr != rest_.data() + close) bad();
    rest_.remove_prefix(close + 1);
    return value;
  }

  void dot() {
    if (rest_.empty() || rest_.front() != '.') bad();
    rest_.remove_prefix(1);
  }

  void end() {
    if (!rest_.empty()) bad();
  }

  [[noreturn]] void bad() const {
    throw Error(ErrorCode::InvalidArgument, "malformed parameter path '" + std::string(path_) + "'");
  }

  [[noreturn]] void out_of_bounds(std::string_view what, std::size_t i) const {
    throw Error(ErrorCode::IndexOutOfBounds, std::string(what) + " index " + std::to_string(i) +
                                                 " out of bounds in '" + std::string(path_) + "'");
  }

 private:
  std::string_view path_;
  std::string_view rest_;
};

Ref vec_component(PathReader &r, Vec3 &v) {
  r.dot();
  if (r.field("x")) return &v.x;
  if (r.field("y")) return &v.y;
  if (r.field("z")) return &v.z;
  r.bad();
}

Ref vec_component(PathReader &r, Vec2 &v) {
  r.dot();
  if (r.field("x")) return &v.x;
  if (r.field("y")) return &v.y;
  r.bad();
}

Ref curve_field(PathReader &r, Curve &curve) {
  r.dot();
  if (auto *c = std::get_if<Circle>(&curve)) {
    if (r.field("center")) return vec_component(r, c->center);
    if (r.field("radius")) return &c->radius;
    r.bad();
  }
  if (auto *l = std::get_if<Line>(&curve)) {
    if (r.field("start")) return vec_component(r, l->start);
    if (r.field("end")) return vec_component(r, l->end);
    r.bad();
  }
  auto &a = std::get<Arc>(curve);
  if (r.field("start")) return vec_component(r, a.start);
  if (r.field("end")) return vec_component(r, a.end);
  if (r.field("sweep")) return &a.sweep;
  if (r.field("counterclockwise")) return &a.counterclockwise;
  r.bad();
}

Ref resolve(CadModel &model, std::string_view path) {
  PathReader r(path);
  if (!r.field("ops")) r.bad();
  const std::size_t oi = r.index();
  if (oi >= model.ops.size()) r.out_of_bounds("op", oi);
  SketchExtrude &op = model.ops[oi];
  r.dot();
  Ref ref;
  if (r.field("boolean")) {
    ref = &op.boolean;
  } else if (r.field("scale")) {
    ref = &op.scale;
  } else if (r.field("extrude_toward")) {
    ref = &op.extrude_toward;
  } else if (r.field("extrude_opposite")) {
    ref = &op.extrude_opposite;
  } else if (r.field("frame")) {
    r.dot();
    if (r.field("origin")) {
      ref = vec_component(r, op.frame.origin);
    } else if (r.field("axis_x")) {
      ref = vec_component(r, op.frame.axis_x);
    } else if (r.field("axis_y")) {
      ref = vec_component(r, op.frame.axis_y);
    } else if (r.field("axis_z")) {
      ref = vec_component(r, op.frame.axis_z);
    } else {
      r.bad();
    }
  } else if (r.field("profile")) {
    r.dot();
    if (!r.field("loops")) r.bad();
    const std::size_t li = r.index();
    if (li >= op.profile.loops.size()) r.out_of_bounds("loop", li);
    Loop &loop = op.profile.loops[li];
    r.dot();
    if (!r.field("curves")) r.bad();
    const std::size_t ci = r.index();
    if (ci >= loop.curves.size()) r.out_of_bounds("curve", ci);
    ref = curve_field(r, loop.curves[ci]);
  } else {
    r.bad();
  }
  r.end();
  return ref;
}

void add_vec(std::vector<std::string> &out, const std::string &prefix, int dims) {
  out.push_back(prefix + ".x");
  out.push_back(prefix + ".y");
  if (dims == 3) out.push_back(prefix + ".z");
}

}  // namespace

std::string to_string(const ParamValue &value) {
  if (const auto *d = std::get_if<double>(&value)) return detail::number_text(*d);
  if (const auto *k = std::get_if<BooleanKind>(&value)) return std::string(to_string(*k));
  return std::get<bool>(value) ? "true" : "false";
}

ParamValue get_param(const CadModel &model, std::string_view path) {
  const Ref ref = resolve(const_cast<CadModel &>(model), path);
  return std::visit([](auto *p) -> ParamValue { return *p; }, ref);
}

void set_param(CadModel &model, std::string_view path, const ParamValue &value) {
  const Ref ref = resolve(model, path);
  std::visit(
      [&](auto *p) {
        using T = std::remove_pointer_t<decltype(p)>;
        const T *v = std::get_if<T>(&value);
        if (!v) {
          throw Error(ErrorCode::InvalidArgument,
                      "value " + to_string(value) + " has the wrong type for '" + std::string(path) + "'");
        }
        *p = *v;
      },
      ref);
}

std::vector<std::string> param_paths(const SketchExtrude &op, std::size_t index) {
  const std::string base = "ops[" + std::to_string(index) + "]";
  std::vector<std::string> out{base + ".boolean", base + ".scale", base + ".extrude_toward",
                               base + ".extrude_opposite"};
  for (const char *axis : {"origin", "axis_x", "axis_y", "axis_z"}) {
    add_vec(out, base + ".frame." + axis, 3);
  }
  for (std::size_t li = 0; li < op.profile.loops.size(); ++li) {
    const Loop &loop = op.profile.loops[li];
    for (std::size_t ci = 0; ci < loop.curves.size(); ++ci) {
      const std::string p = base + ".profile.loops[" + std::to_string(li) + "].curves[" + std::to_string(ci) + "]";
      if (std::holds_alternative<Circle>(loop.curves[ci])) {
        add_vec(out, p + ".center", 2);
        out.push_back(p + ".radius");
        continue;
      }
      add_vec(out, p + ".start", 2);
      add_vec(out, p + ".end", 2);
      if (std::holds_alternative<Arc>(loop.curves[ci])) {
        out.push_back(p + ".sweep");
        out.push_back(p + ".counterclockwise");
      }
    }
  }
  return out;
}

}  // namespace cadseq
