// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Tolerances and time budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cadseq/canonical.hpp"
#include "cadseq/datagen.hpp"
#include "cadseq/edit.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/metrics.hpp"
#include "cadseq/quantize.hpp"
#include "cadseq/repr.hpp"
#include "cadseq/reward.hpp"
#include "cadseq/validate.hpp"
#include "oracles.hpp"
#include "random_model.hpp"

namespace {

using namespace cadseq;
using testing::box_op;
using testing::circle_loop;
using testing::Rng;
using testing::unit_cube;

constexpr double kAlpha = 5.0;
constexpr double kBeta = 0.01;
constexpr double kExpTolerance = 1e-12;
constexpr double kChamferTolerance = 1e-12;
constexpr double kMinVoxelAgreement = 0.999;
constexpr double kMixTolerance = 0.02;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string &why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Check = std::function<Outcome()>;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Criterion {
  const char *name;
  double budget_seconds;
  Check check;
};

// ---------------------------------------------------------------- reward

Outcome reward_fidelity() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  Outcome out;
  RewardConfig cfg;
  cfg.alpha = kAlpha;
  cfg.beta = kBeta;
  Rng rng(1);
  std::uniform_real_distribution<double> cd(0.0, 2.0);
  std::uniform_real_distribution<double> len(0.0, 400.0);
  std::bernoulli_distribution coin(0.8);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const bool format_ok = coin(rng);
    const bool exec_ok = coin(rng);
    const double d = t % 10 == 0 ? 0.0 : cd(rng);
    const double l = std::floor(len(rng));
    const RewardBreakdown b = compose(format_ok, exec_ok, d, l, cfg);
    if (b.total != b.r_chamfer + b.r_format + b.r_exec + b.r_length) out.fail("total is not the sum of the terms");
    if (b.r_length != -kBeta * l) out.fail("length term differs from -beta * L");
    if (!format_ok) {
      if (b.r_format != -0.2 || b.r_exec != 0.0 || b.r_chamfer != 0.0) out.fail("format failure terms");
      continue;
    }
    if (!exec_ok) {
      if (b.r_format != 0.0 || b.r_exec != -0.1 || b.r_chamfer != 0.0) out.fail("exec failure terms");
      continue;
    }
    const Big expected = boost::multiprecision::exp(-Big(kAlpha) * Big(d));
    const double err = static_cast<double>(boost::multiprecision::abs(Big(b.r_chamfer) - expected));
    worst = std::max(worst, err);
    if (err > kExpTolerance) out.fail("r_chamfer off the exponential by " + num(err));
    if (d == 0.0 && b.r_chamfer != 1.0) out.fail("d_cd = 0 does not give r_chamfer = 1");
  }
  const RewardBreakdown exact = score(print(unit_cube(), ReprKind::Dsl), unit_cube(), std::nullopt, std::nullopt, cfg);
  if (exact.r_chamfer != 1.0) out.fail("exact match scores r_chamfer " + num(exact.r_chamfer));
  if (out.pass) out.detail = "worst exp error " + num(worst);
  return out;
}

Outcome penalty_constants() {
  Outcome out;
  RewardConfig cfg;
  for (const ReprKind kind : kAllReprKinds) {
    for (const std::string &text : {std::string(), std::string("not a model {"), print(unit_cube(), kind).substr(0, 7)}) {
      const RewardBreakdown b = score(text, unit_cube(), std::nullopt, std::nullopt, cfg);
      if (b.r_format != -0.2 || b.r_exec != 0.0 || b.r_chamfer != 0.0) {
        out.fail("malformed " + std::string(to_string(kind)) + " text scores r_format " + num(b.r_format));
      }
    }
  }
  CadModel hollowed = unit_cube();
  hollowed.ops.push_back(box_op(-1, -1, -1, 2, 2, 2, BooleanKind::Cut));
  for (const CadModel &m : {CadModel{}, hollowed}) {
    for (const ReprKind kind : kAllReprKinds) {
      cfg.kind = kind;
      const RewardBreakdown b = score(print(m, kind), unit_cube(), std::nullopt, std::nullopt, cfg);
      if (b.r_format != 0.0 || b.r_exec != -0.1 || b.r_chamfer != 0.0) {
        out.fail("inexecutable " + std::string(to_string(kind)) + " text scores r_exec " + num(b.r_exec));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- repr

Outcome round_trip() {
  Outcome out;
  Rng rng(7);
  std::size_t failures = 0;
  for (int t = 0; t < 1000; ++t) {
    const CadModel m = testing::random_model(rng);
    const CadModel expected = canonicalize(m);
    for (const ReprKind from : kAllReprKinds) {
      const std::string text = print(m, from);
      const ParseOutcome back = parse(text, from);
      if (!back.ok() || back.model() != expected) {
        ++failures;
        continue;
      }
      for (const ReprKind to : kAllReprKinds) {
        if (to == from) continue;
        try {
          if (parse_or_throw(convert(text, from, to), to) != expected) ++failures;
        } catch (const Error &) {
          ++failures;
        }
      }
    }
  }
  if (failures) out.fail(std::to_string(failures) + " failures");
  else out.detail = "4000 round trips, 12000 conversions";
  return out;
}

// ---------------------------------------------------------------- geometry

Outcome geometry_oracle() {
  Outcome out;
  Rng rng(2024);
  const testing::RandomModelOptions options{.min_ops = 2, .max_ops = 4};
  constexpr int kRes = 64;
  std::size_t total = 0, disagreements = 0, interior = 0;
  for (int model_index = 0; model_index < 50; ++model_index) {
    const CadModel m = testing::random_model(rng, options);
    const SolidProgram p = compile(m);
    const auto ops = testing::oracle::build(m);
    Box3 box = bbox(p);
    const Vec3 pad = (box.hi - box.lo) * 0.05;
    box.lo = box.lo - pad;
    box.hi = box.hi + pad;
    const Vec3 cell = (box.hi - box.lo) * (1.0 / kRes);
    auto center = [&](int i, int j, int k) {
      return Vec3{box.lo.x + (i + 0.5) * cell.x, box.lo.y + (j + 0.5) * cell.y, box.lo.z + (k + 0.5) * cell.z};
    };
    std::vector<char> raster(kRes * kRes * kRes);
    auto at = [&](int i, int j, int k) { return raster[(i * kRes + j) * kRes + k]; };
    for (int i = 0; i < kRes; ++i) {
      for (int j = 0; j < kRes; ++j) {
        for (int k = 0; k < kRes; ++k) raster[(i * kRes + j) * kRes + k] = testing::oracle::inside(ops, center(i, j, k));
      }
    }
    for (int i = 0; i < kRes; ++i) {
      for (int j = 0; j < kRes; ++j) {
        for (int k = 0; k < kRes; ++k) {
          ++total;
          if (contains(p, center(i, j, k)) == static_cast<bool>(at(i, j, k))) continue;
          ++disagreements;
          bool mixed = false;
          for (int di = -1; di <= 1 && !mixed; ++di) {
            for (int dj = -1; dj <= 1 && !mixed; ++dj) {
              for (int dk = -1; dk <= 1 && !mixed; ++dk) {
                const int a = std::clamp(i + di, 0, kRes - 1), b = std::clamp(j + dj, 0, kRes - 1),
                          c = std::clamp(k + dk, 0, kRes - 1);
                mixed = at(a, b, c) != at(i, j, k);
              }
            }
          }
          if (!mixed) ++interior;
        }
      }
    }
  }
  const double agreement = 1.0 - static_cast<double>(disagreements) / static_cast<double>(total);
  out.detail = std::to_string(disagreements) + " of " + std::to_string(total) + " voxels disagree";
  if (agreement < kMinVoxelAgreement) out.fail(out.detail);
  if (interior) out.fail(std::to_string(interior) + " disagreements away from the boundary");
  return out;
}

// ---------------------------------------------------------------- metrics

std::vector<Vec3> random_cloud(Rng &rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> out(n);
  for (Vec3 &p : out) p = {u(rng), u(rng), u(rng)};
  return out;
}

Outcome chamfer_exactness() {
  Outcome out;
  Rng rng(2);
  std::uniform_int_distribution<std::size_t> size(1, 512);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::vector<Vec3> a = random_cloud(rng, size(rng));
    const std::vector<Vec3> b = random_cloud(rng, size(rng));
    const double fast = chamfer(a, b).value;
    const double err = std::abs(fast - testing::brute_chamfer(a, b));
    worst = std::max(worst, err);
    if (err > kChamferTolerance) out.fail("pair " + std::to_string(t) + " off by " + num(err));
    if (chamfer(a, a).value != 0.0) out.fail("CD(a, a) != 0");
    if (chamfer(b, a).value != fast) out.fail("CD not symmetric");
  }
  if (out.pass) out.detail = "worst error " + num(worst);
  return out;
}

CadModel two_posts(double post1_height, double post2_size) {
  CadModel m;
  m.ops.push_back(box_op(0, 0, 0, 2, 2, 1));
  m.ops.push_back(box_op(0, 0, 1, 0.5, 0.5, 1 + post1_height, BooleanKind::Join));
  m.ops.push_back(box_op(1.5 - post2_size, 1.5 - post2_size, 1, 1.5, 1.5, 1 + post2_size, BooleanKind::Join));
  return m;
}

Outcome localized_semantics() {
  Outcome out;
  // The reference edit grows post 2; the generated model gets post 2 right
  // and post 1 wrong.
  const CadModel current = two_posts(1.0, 0.25);
  const CadModel target = two_posts(1.0, 0.5);
  const CadModel generated = two_posts(1.5, 0.5);
  const EditScript script = diff(current, target);
  if (script.edited_ops_b != std::vector<std::size_t>{2}) out.fail("reference edit does not touch op 2 alone");
  const double local = localized_chamfer(generated, target, script, 2048, 0).value;
  const double full = model_chamfer(generated, target, 2048, 0).value;
  out.detail = "localized " + num(local) + ", full " + num(full);
  if (local != 0.0 || !(full > 0.0)) out.fail(out.detail);
  return out;
}

// ---------------------------------------------------------------- edit

Outcome edit_algebra() {
  Outcome out;
  Rng rng(500);
  std::size_t failures = 0, coerced = 0;
  for (int t = 0; t < 500; ++t) {
    const CadModel raw = testing::random_model(rng);
    const CadModel b = testing::mutate(raw, rng);
    try {
      // The inverse identity is stated on canonical models; undo on a raw
      // model must restore its normal form, first op kind included.
      const CadModel a = canonicalize(raw);
      const EditScript s = diff(a, b);
      const CadModel applied = apply(a, s);
      if (applied != canonicalize(b)) ++failures;
      if (apply(applied, invert(s)) != a) ++failures;
      const EditScript r = diff(raw, b);
      const CadModel applied_raw = apply(raw, r);
      if (applied_raw != canonicalize(b)) ++failures;
      const CadModel back = apply(applied_raw, invert(r));
      if (back != normalize(raw) || canonicalize(back) != a) ++failures;
      if (normalize(raw) != a) ++coerced;
    } catch (const Error &) {
      ++failures;
    }
  }
  out.detail = std::to_string(coerced) + " raw models with a non-New first op";
  if (failures) out.fail(std::to_string(failures) + " failures");
  return out;
}

// ---------------------------------------------------------------- quantization

Outcome quantization_demo() {
  Outcome out;
  const QuantizationGrid grid{.bits = 8, .lo = {-2, -2, -2}, .hi = {2, 2, 2}};
  const double h = grid.step(0);
  const double r = 10.25 * h;
  const double level = grid.lo.x + 100 * h;
  CadModel m;
  SketchExtrude plate = box_op(-1.5, -1.5, 0, 1.5, 1.5, 1);
  plate.profile.loops.push_back(circle_loop(level, level, r));
  plate.profile.loops.push_back(circle_loop(level + 60.5 * h, level + 60.5 * h, r));
  m.ops.push_back(plate);
  if (!validate(m).ok()) {
    out.fail("construction does not validate");
    return out;
  }
  const CadModel snapped = snap_to_grid(m, grid);
  const double ra = std::get<Circle>(snapped.ops[0].profile.loops[1].curves[0]).radius;
  const double rb = std::get<Circle>(snapped.ops[0].profile.loops[2].curves[0]).radius;
  if (ra == rb) out.fail("equal radii survive quantization");
  const CadModel raw = parse_or_throw(print(m, ReprKind::Json), ReprKind::Json);
  const double cd_raw = model_chamfer(raw, m, 2048, 0).value;
  const double cd_snapped = model_chamfer(snapped, m, 2048, 0).value;
  out.detail = "radii " + num(ra / h) + "h / " + num(rb / h) + "h, CD quantized " +
               num(cd_snapped) + ", raw " + num(cd_raw);
  if (cd_raw != 0.0 || !(cd_snapped > 0.0)) out.fail(out.detail);
  return out;
}

// ---------------------------------------------------------------- batch

Outcome batch_throughput() {
  Outcome out;
  Rng rng(256);
  const testing::RandomModelOptions single{.min_ops = 1, .max_ops = 1};
  std::vector<ScoreItem> items;
  while (items.size() < 256) {
    const CadModel target = testing::random_model(rng, single);
    try {
      (void)sample_surface(compile(target), 16, 0);
    } catch (const Error &) {
      continue;
    }
    const CadModel generated = items.size() % 4 == 0 ? target : testing::mutate(target, rng);
    items.push_back({print(generated, ReprKind::Dsl), target, std::nullopt, std::nullopt, items.size()});
  }
  const RewardConfig cfg;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<BatchEntry> batch = score_batch(items, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!batch[i].breakdown || *batch[i].breakdown != score(items[i], cfg)) ++mismatches;
  }
  out.detail = "batch " + num(seconds) + " s";
  if (mismatches) out.fail(std::to_string(mismatches) + " entries differ from sequential scoring");
  if (seconds >= 10.0) out.fail(out.detail);
  return out;
}

// ---------------------------------------------------------------- corpus

Outcome corpus_integrity() {
  Outcome out;
  Rng rng(77);
  std::vector<CadModel> models;
  for (int i = 0; i < 100; ++i) models.push_back(testing::random_model(rng));
  CorpusOptions options;
  options.mix = EditMix{0.4, 0.3, 0.3};
  options.seed = 3;
  const CorpusReport report = build_editing_corpus(models, nullptr, options);
  std::size_t bad = 0;
  for (const InstructionRecord &rec : report.records) {
    if (!rec.current || !rec.script) {
      ++bad;
      continue;
    }
    try {
      if (apply(*rec.current, *rec.script) != rec.target) ++bad;
    } catch (const Error &) {
      ++bad;
    }
  }
  const double add = report.proportion(EditType::Addition);
  const double del = report.proportion(EditType::Deletion);
  const double mod = report.proportion(EditType::Modification);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu records, mix %.3f/%.3f/%.3f", report.records.size(), add, del, mod);
  out.detail = buf;
  if (report.records.empty()) out.fail("no records");
  if (bad) out.fail(std::to_string(bad) + " records fail apply(current, script) = target");
  if (std::abs(add - 0.4) > kMixTolerance || std::abs(del - 0.3) > kMixTolerance ||
      std::abs(mod - 0.3) > kMixTolerance) {
    out.fail(out.detail);
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"reward-formula-fidelity", 5, reward_fidelity},
      {"penalty-constants", 0, penalty_constants},
      {"round-trip-suite", 60, round_trip},
      {"geometry-oracle", 300, geometry_oracle},
      {"chamfer-exactness", 30, chamfer_exactness},
      {"localized-cd-semantics", 0, localized_semantics},
      {"edit-algebra", 60, edit_algebra},
      {"quantization-demo", 0, quantization_demo},
      {"batch-throughput", 10, batch_throughput},
      {"corpus-integrity", 0, corpus_integrity},
  };
  int failed = 0;
  for (const Criterion &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception &e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && seconds >= c.budget_seconds) {
      outcome.fail("took " + num(seconds) + " s, budget " + num(c.budget_seconds) + " s");
    }
    std::printf("%s %-26s %8.2fs  %s\n", outcome.pass ? "PASS" : "FAIL", c.name, seconds, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
