#include "random_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cadseq/validate.hpp"

namespace cadseq::testing {

namespace {

constexpr double kPi = std::numbers::pi;

struct Shaper {
  const RandomModelOptions &options;
  double q(double v) const { return options.short_numbers ? std::round(v * 1000.0) / 1000.0 : v; }
  Vec2 q(Vec2 v) const { return {q(v.x), q(v.y)}; }
};

bool coin(Rng &rng, double p = 0.5) { return uniform(rng, 0.0, 1.0) < p; }

int pick(Rng &rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Loop polygon(const std::vector<Vec2> &pts) {
  Loop loop;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    loop.curves.push_back(Line{pts[i], pts[(i + 1) % pts.size()]});
  }
  return loop;
}

Loop reversed(const Loop &loop) {
  Loop out;
  for (auto it = loop.curves.rbegin(); it != loop.curves.rend(); ++it) {
    if (const auto *l = std::get_if<Line>(&*it)) {
      out.curves.push_back(Line{l->end, l->start});
    } else if (const auto *a = std::get_if<Arc>(&*it)) {
      out.curves.push_back(Arc{a->end, a->start, a->sweep, !a->counterclockwise});
    } else {
      out.curves.push_back(*it);
    }
  }
  return out;
}

// Outer loop plus the centre and radius of a disk safely inside it.
struct Outer {
  Loop loop;
  Vec2 center;
  double inner_radius;
};

Outer random_outer(Rng &rng, const Shaper &s) {
  const Vec2 c = s.q(Vec2{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)});
  const int shape = pick(rng, 0, 2);
  if (shape == 0) {
    const double hw = s.q(uniform(rng, 0.3, 1.0));
    const double hh = s.q(uniform(rng, 0.3, 1.0));
    const Vec2 p0{s.q(c.x - hw), s.q(c.y - hh)};
    const Vec2 p1{s.q(c.x + hw), s.q(c.y - hh)};
    const Vec2 p2{s.q(c.x + hw), s.q(c.y + hh)};
    const Vec2 p3{s.q(c.x - hw), s.q(c.y + hh)};
    Loop loop = polygon({p0, p1, p2, p3});
    double inner = std::min(hw, hh);
    if (s.options.arcs && coin(rng, 0.6)) {
      // Right edge bulges outward.
      loop.curves[1] = Arc{p1, p2, s.q(uniform(rng, 0.3, 2.8)), true};
      if (coin(rng)) {
        // Top edge dents inward; the hole disk shrinks by the sagitta.
        const double sweep = s.q(uniform(rng, 0.2, 1.0));
        const double chord = 2.0 * hw;
        const double r = chord / (2.0 * std::sin(sweep / 2.0));
        const double sagitta = r * (1.0 - std::cos(sweep / 2.0));
        loop.curves[2] = Arc{p2, p3, sweep, false};
        inner = std::min(hw, hh - sagitta);
      }
    }
    return {loop, c, inner * 0.95};
  }
  if (shape == 1) {
    const int n = pick(rng, 3, 6);
    const double radius = uniform(rng, 0.5, 1.2);
    // Jittered angles keep every gap below pi so the centre stays inside.
    const double phase = uniform(rng, 0.0, 2.0 * kPi);
    std::vector<Vec2> pts;
    double max_gap = 0.0;
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) {
      angles.push_back(phase + 2.0 * kPi * (i + uniform(rng, -0.2, 0.2)) / n);
    }
    for (int i = 0; i < n; ++i) {
      const double next = i + 1 < n ? angles[i + 1] : angles[0] + 2.0 * kPi;
      max_gap = std::max(max_gap, next - angles[i]);
      pts.push_back(s.q(Vec2{c.x + radius * std::cos(angles[i]), c.y + radius * std::sin(angles[i])}));
    }
    Loop loop = polygon(pts);
    if (coin(rng, 0.3)) loop = reversed(loop);
    return {loop, c, radius * std::cos(max_gap / 2.0) * 0.9};
  }
  const double radius = s.q(uniform(rng, 0.3, 1.2));
  Loop loop;
  loop.curves.push_back(Circle{c, radius});
  return {loop, c, radius * 0.95};
}

Loop hole_at(Rng &rng, const Shaper &s, Vec2 center, double radius) {
  if (coin(rng, 0.7)) {
    Loop loop;
    loop.curves.push_back(Circle{s.q(center), s.q(radius)});
    return loop;
  }
  const double h = radius * 0.7;
  return polygon({s.q(Vec2{center.x - h, center.y - h}), s.q(Vec2{center.x + h, center.y - h}),
                  s.q(Vec2{center.x + h, center.y + h}), s.q(Vec2{center.x - h, center.y + h})});
}

}  // namespace

double uniform(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

CoordinateFrame random_frame(Rng &rng, const RandomModelOptions &options) {
  const Shaper s{options};
  CoordinateFrame f;
  f.origin = {s.q(uniform(rng, -0.5, 0.5)), s.q(uniform(rng, -0.5, 0.5)),
              s.q(uniform(rng, -0.5, 0.5))};
  if (options.rotated_frames && !options.short_numbers && coin(rng)) {
    std::normal_distribution<double> normal;
    double w = normal(rng), x = normal(rng), y = normal(rng), z = normal(rng);
    const double len = std::sqrt(w * w + x * x + y * y + z * z);
    w /= len;
    x /= len;
    y /= len;
    z /= len;
    f.axis_x = {1 - 2 * (y * y + z * z), 2 * (x * y + w * z), 2 * (x * z - w * y)};
    f.axis_y = {2 * (x * y - w * z), 1 - 2 * (x * x + z * z), 2 * (y * z + w * x)};
    f.axis_z = cross(f.axis_x, f.axis_y);
    return f;
  }
  static const CoordinateFrame kAxisFrames[] = {
      {{}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  {{}, {1, 0, 0}, {0, -1, 0}, {0, 0, -1}},
      {{}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}},  {{}, {0, -1, 0}, {0, 0, 1}, {-1, 0, 0}},
      {{}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  {{}, {1, 0, 0}, {0, 0, 1}, {0, -1, 0}},
  };
  const CoordinateFrame &axes = kAxisFrames[pick(rng, 0, 5)];
  f.axis_x = axes.axis_x;
  f.axis_y = axes.axis_y;
  f.axis_z = axes.axis_z;
  return f;
}

Profile random_profile(Rng &rng, const RandomModelOptions &options) {
  const Shaper s{options};
  Outer outer = random_outer(rng, s);
  Profile profile;
  profile.loops.push_back(outer.loop);
  if (!options.holes || outer.inner_radius <= 0.05) return profile;
  const int holes = pick(rng, 0, 2);
  const double rho = outer.inner_radius;
  if (holes == 1) {
    const double a = uniform(rng, 0.0, 2.0 * kPi);
    const double d = uniform(rng, 0.0, 0.4 * rho);
    const Vec2 c{outer.center.x + d * std::cos(a), outer.center.y + d * std::sin(a)};
    profile.loops.push_back(hole_at(rng, s, c, uniform(rng, 0.15, 0.5) * rho));
  } else if (holes == 2) {
    const double a = uniform(rng, 0.0, kPi);
    const Vec2 off{0.5 * rho * std::cos(a), 0.5 * rho * std::sin(a)};
    profile.loops.push_back(hole_at(rng, s, outer.center + off, uniform(rng, 0.1, 0.4) * rho));
    profile.loops.push_back(hole_at(rng, s, outer.center - off, uniform(rng, 0.1, 0.4) * rho));
  }
  return profile;
}

SketchExtrude random_op(Rng &rng, const RandomModelOptions &options) {
  const Shaper s{options};
  SketchExtrude op;
  op.frame = random_frame(rng, options);
  op.profile = random_profile(rng, options);
  op.extrude_toward = s.q(uniform(rng, 0.2, 1.2));
  op.extrude_opposite =
      options.opposite_extents && coin(rng) ? s.q(uniform(rng, 0.1, 0.6)) : 0.0;
  op.scale = coin(rng) ? 1.0 : s.q(uniform(rng, 0.5, 1.5));
  if (options.any_boolean) {
    op.boolean = static_cast<BooleanKind>(pick(rng, 0, 3));
  } else {
    op.boolean = coin(rng) ? BooleanKind::Join : BooleanKind::Cut;
  }
  return op;
}

CadModel random_model(Rng &rng, const RandomModelOptions &options) {
  CadModel model;
  const int n = pick(rng, options.min_ops, options.max_ops);
  for (int i = 0; i < n; ++i) model.ops.push_back(random_op(rng, options));
  if (!model.ops.empty()) {
    model.ops[0].boolean = coin(rng, 0.8) ? BooleanKind::New : BooleanKind::Join;
  }
  if (coin(rng, 0.3)) model.source = "sample-" + std::to_string(pick(rng, 0, 99999));
  return model;
}

CadModel mutate(const CadModel &model, Rng &rng) {
  RandomModelOptions options;
  for (int attempt = 0; attempt < 50; ++attempt) {
    CadModel m = model;
    const int changes = pick(rng, 1, 3);
    for (int c = 0; c < changes; ++c) {
      const std::size_t i = static_cast<std::size_t>(pick(rng, 0, static_cast<int>(m.ops.size()) - 1));
      SketchExtrude &op = m.ops[i];
      switch (pick(rng, 0, 9)) {
        case 0: op.extrude_toward *= uniform(rng, 0.5, 2.0); break;
        case 1: op.frame.origin.x += uniform(rng, -0.3, 0.3); break;
        case 2: op.scale *= uniform(rng, 0.8, 1.25); break;
        case 3:
          if (m.ops.size() > 1) m.ops.erase(m.ops.begin() + static_cast<long>(i));
          break;
        case 4:
          m.ops.insert(m.ops.begin() + pick(rng, 0, static_cast<int>(m.ops.size())),
                       random_op(rng, options));
          break;
        case 5:
          if (op.profile.loops.size() > 1) {
            op.profile.loops.erase(op.profile.loops.begin() +
                                   pick(rng, 1, static_cast<int>(op.profile.loops.size()) - 1));
          }
          break;
        case 6: op.profile = random_profile(rng, options); break;
        case 7: op.boolean = static_cast<BooleanKind>(pick(rng, 0, 3)); break;
        case 8:
          for (Loop &loop : op.profile.loops) {
            if (auto *circle = std::get_if<Circle>(&loop.curves.front())) {
              circle->radius *= uniform(rng, 0.9, 1.0);
              break;
            }
          }
          break;
        default: op.extrude_opposite += uniform(rng, 0.0, 0.3); break;
      }
    }
    if (validate(m).ok()) return m;
  }
  return model;
}

Loop rect_loop(double x0, double y0, double x1, double y1) {
  return polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Loop circle_loop(double cx, double cy, double r) {
  Loop loop;
  loop.curves.push_back(Circle{{cx, cy}, r});
  return loop;
}

SketchExtrude box_op(double x0, double y0, double z0, double x1, double y1, double z1,
                     BooleanKind kind) {
  SketchExtrude op;
  op.frame.origin = {0.0, 0.0, z0};
  op.profile.loops.push_back(rect_loop(x0, y0, x1, y1));
  op.extrude_toward = z1 - z0;
  op.boolean = kind;
  return op;
}

CadModel unit_cube() {
  CadModel m;
  m.ops.push_back(box_op(0, 0, 0, 1, 1, 1));
  return m;
}

}  // namespace cadseq::testing
