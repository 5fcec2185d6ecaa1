#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cadseq/canonical.hpp"
#include "cadseq/error.hpp"
#include "cadseq/metrics.hpp"
#include "random_model.hpp"

namespace cadseq {
namespace {

using testing::box_op;
using testing::circle_loop;
using testing::Rng;
using testing::unit_cube;

// O(n^2) reference: sum of both mean squared nearest distances.
double brute_chamfer(const std::vector<Vec3> &a, const std::vector<Vec3> &b) {
  auto one_way = [](const std::vector<Vec3> &from, const std::vector<Vec3> &to) {
    double sum = 0.0;
    for (const Vec3 &p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3 &q : to) {
        const double d = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) + (p.z - q.z) * (p.z - q.z);
        best = std::min(best, d);
      }
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return one_way(a, b) + one_way(b, a);
}

std::vector<Vec3> random_cloud(Rng &rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> out(n);
  for (Vec3 &p : out) p = {u(rng), u(rng), u(rng)};
  return out;
}

CadModel cube_with_hole(double r) {
  CadModel m = unit_cube();
  m.ops[0].profile.loops.push_back(circle_loop(0.5, 0.5, r));
  return m;
}

// ---------------------------------------------------------------- chamfer

TEST(Chamfer, SinglePointPair) {
  const CdResult r = chamfer(std::vector<Vec3>{{0, 0, 0}}, std::vector<Vec3>{{1, 0, 0}});
  EXPECT_EQ(r.value, 2.0);
  EXPECT_EQ(r.scaled, 2000.0);
}

TEST(Chamfer, IdenticalCloudsGiveZero) {
  Rng rng(1);
  const std::vector<Vec3> a = random_cloud(rng, 300);
  EXPECT_EQ(chamfer(a, a).value, 0.0);
}

TEST(Chamfer, MatchesBruteForce) {
  Rng rng(2);
  std::uniform_int_distribution<std::size_t> size(1, 512);
  for (int t = 0; t < 100; ++t) {
    const std::vector<Vec3> a = random_cloud(rng, size(rng));
    const std::vector<Vec3> b = random_cloud(rng, size(rng));
    EXPECT_NEAR(chamfer(a, b).value, brute_chamfer(a, b), 1e-12);
  }
}

TEST(Chamfer, MatchesBruteForceWithDuplicatesAndTies) {
  // Lattice points produce many equidistant neighbours.
  std::vector<Vec3> a, b;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      a.push_back({i * 0.5, j * 0.5, 0});
      a.push_back({i * 0.5, j * 0.5, 0});
      b.push_back({i * 0.5 + 0.25, j * 0.5 + 0.25, 0});
    }
  }
  EXPECT_NEAR(chamfer(a, b).value, brute_chamfer(a, b), 1e-12);
}

TEST(Chamfer, SymmetricExactly) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const std::vector<Vec3> a = random_cloud(rng, 200 + t);
    const std::vector<Vec3> b = random_cloud(rng, 150);
    EXPECT_EQ(chamfer(a, b).value, chamfer(b, a).value);
  }
}

TEST(Chamfer, RigidTransformInvariance) {
  Rng rng(4);
  const std::vector<Vec3> a = random_cloud(rng, 400);
  const std::vector<Vec3> b = random_cloud(rng, 380);
  // Rotation about (1, 2, 2)/3 by 0.7 rad followed by a translation.
  const Vec3 k{1.0 / 3, 2.0 / 3, 2.0 / 3};
  const double c = std::cos(0.7), s = std::sin(0.7);
  auto move = [&](std::vector<Vec3> pts) {
    for (Vec3 &p : pts) {
      const double kd = k.x * p.x + k.y * p.y + k.z * p.z;
      const Vec3 kx{k.y * p.z - k.z * p.y, k.z * p.x - k.x * p.z, k.x * p.y - k.y * p.x};
      p = {p.x * c + kx.x * s + k.x * kd * (1 - c) + 3.0, p.y * c + kx.y * s + k.y * kd * (1 - c) - 2.0,
           p.z * c + kx.z * s + k.z * kd * (1 - c) + 0.5};
    }
    return pts;
  };
  EXPECT_NEAR(chamfer(move(a), move(b)).value, chamfer(a, b).value, 1e-9);
}

TEST(Chamfer, EmptyCloudRejected) {
  const std::vector<Vec3> a{{0, 0, 0}};
  for (const auto &[x, y] : {std::pair{a, std::vector<Vec3>{}}, std::pair{std::vector<Vec3>{}, a}}) {
    try {
      chamfer(x, y);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::EmptyCloud);
    }
  }
}

// ---------------------------------------------------------------- model chamfer

TEST(ModelChamfer, SameModelIsZero) {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const CadModel m = testing::random_model(rng, {});
    try {
      EXPECT_EQ(model_chamfer(m, m, 512, 9).value, 0.0);
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::EmptyGeometry);
    }
  }
}

TEST(ModelChamfer, IgnoresSerializationOrder) {
  CadModel a = cube_with_hole(0.2);
  CadModel b = a;
  auto &curves = b.ops[0].profile.loops[0].curves;
  std::rotate(curves.begin(), curves.begin() + 1, curves.end());
  EXPECT_EQ(model_chamfer(a, b, 512, 3).value, 0.0);
}

TEST(ModelChamfer, GrowsWithDifference) {
  const CadModel base = cube_with_hole(0.1);
  const double small = model_chamfer(base, cube_with_hole(0.12), 2048, 1).value;
  const double large = model_chamfer(base, cube_with_hole(0.3), 2048, 1).value;
  EXPECT_GT(large, small);
}

// ---------------------------------------------------------------- localized

// Base plate with two posts; the posts never touch each other.
CadModel two_posts(double post1_height, double post2_size) {
  CadModel m;
  m.ops.push_back(box_op(0, 0, 0, 2, 2, 1));
  m.ops.push_back(box_op(0, 0, 1, 0.5, 0.5, 1 + post1_height, BooleanKind::Join));
  m.ops.push_back(box_op(1.5 - post2_size, 1.5 - post2_size, 1, 1.5, 1.5, 1 + post2_size, BooleanKind::Join));
  return m;
}

TEST(LocalizedChamfer, EqualModelsGiveZero) {
  const CadModel current = two_posts(1.0, 0.25);
  const CadModel target = two_posts(1.0, 0.5);
  const EditScript script = diff(current, target);
  ASSERT_EQ(script.edited_ops_b, std::vector<std::size_t>{2});
  EXPECT_EQ(localized_chamfer(target, target, script, 1024, 7).value, 0.0);
}

TEST(LocalizedChamfer, IgnoresUneditedOps) {
  const CadModel current = two_posts(1.0, 0.25);
  const CadModel target = two_posts(1.0, 0.5);
  const CadModel generated = two_posts(1.5, 0.5);  // wrong in op 1 only
  const EditScript script = diff(current, target);
  EXPECT_EQ(localized_chamfer(generated, target, script, 1024, 7).value, 0.0);
  EXPECT_GT(model_chamfer(generated, target, 1024, 7).value, 0.0);
}

TEST(LocalizedChamfer, SeesErrorsInEditedOps) {
  const CadModel current = two_posts(1.0, 0.25);
  const CadModel target = two_posts(1.0, 0.5);
  const CadModel generated = two_posts(1.0, 0.4);
  EXPECT_GT(localized_chamfer(generated, target, diff(current, target), 1024, 7).value, 0.0);
}

TEST(LocalizedChamfer, SingleOpMatchesFullWhenBoundsAgree) {
  // Same outer box, so joint and separate normalization coincide.
  const CadModel current = cube_with_hole(0.2);
  const CadModel target = cube_with_hole(0.3);
  const CadModel generated = cube_with_hole(0.25);
  const EditScript script = diff(current, target);
  EXPECT_NEAR(localized_chamfer(generated, target, script, 1024, 11).value,
              model_chamfer(generated, target, 1024, 11).value, 1e-15);
}

TEST(LocalizedChamfer, HiddenEditFallsBackToIsolatedOp) {
  CadModel target = unit_cube();
  target.ops.push_back(box_op(0.25, 0.25, 0.25, 0.75, 0.75, 0.75, BooleanKind::Join));
  CadModel current = unit_cube();
  const EditScript script = diff(current, target);
  ASSERT_EQ(script.edited_ops_b, std::vector<std::size_t>{1});
  CadModel generated = unit_cube();
  generated.ops.push_back(box_op(0.25, 0.25, 0.25, 0.75, 0.75, 0.5, BooleanKind::Join));
  // Oracle: the edited ops compiled alone.
  const SurfacePointCloud g = sample_surface(isolate(compile(generated), {1}), 1024, 5);
  const SurfacePointCloud t = sample_surface(isolate(compile(target), {1}), 1024, 5);
  const auto [gn, tn] = normalize_jointly(g, t);
  EXPECT_EQ(localized_chamfer(generated, target, script, 1024, 5).value, chamfer(gn, tn).value);
  EXPECT_GT(chamfer(gn, tn).value, 0.0);
}

TEST(LocalizedChamfer, EmptyScriptRejected) {
  try {
    localized_chamfer(unit_cube(), unit_cube(), EditScript{}, 256, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyEditSet);
  }
}

TEST(LocalizedChamfer, DeletionOnlyScriptUsesWholeModels) {
  const CadModel current = two_posts(1.0, 0.5);
  CadModel target = current;
  target.ops.pop_back();
  const EditScript script = diff(current, target);
  ASSERT_TRUE(script.edited_ops_b.empty());
  EXPECT_EQ(localized_chamfer(target, target, script, 512, 1).value, 0.0);
  const SurfacePointCloud g = sample_surface(compile(current), 512, 1);
  const SurfacePointCloud t = sample_surface(compile(target), 512, 1);
  const auto [gn, tn] = normalize_jointly(g, t);
  EXPECT_EQ(localized_chamfer(current, target, script, 512, 1).value, chamfer(gn, tn).value);
}

// ---------------------------------------------------------------- batch evaluation

EvalItem item(std::string text, CadModel target) {
  EvalItem it;
  it.generated = std::move(text);
  it.target = std::move(target);
  return it;
}

TEST(EvaluateBatch, ExactOutputsAreValid) {
  std::vector<EvalItem> items;
  for (const CadModel &m : {unit_cube(), cube_with_hole(0.2)}) items.push_back(item(print(m, ReprKind::Dsl), m));
  const EvalReport r = evaluate_batch(items, ReprKind::Dsl, 512, 1);
  EXPECT_EQ(r.summary.invalidity_ratio, 0.0);
  EXPECT_EQ(r.summary.mean_cd, 0.0);
  EXPECT_EQ(r.summary.median_cd, 0.0);
}

TEST(EvaluateBatch, OneUnparsableOfTwo) {
  const std::vector<EvalItem> items{item(print(unit_cube(), ReprKind::Dsl), unit_cube()),
                                    item("extrude(", unit_cube())};
  const EvalReport r = evaluate_batch(items, ReprKind::Dsl, 256, 1);
  EXPECT_EQ(r.summary.n_total, 2u);
  EXPECT_EQ(r.summary.n_invalid, 1u);
  EXPECT_EQ(r.summary.invalidity_ratio, 0.5);
  EXPECT_EQ(r.records[1].failure, EvalFailure::Parse);
}

TEST(EvaluateBatch, FailureStages) {
  std::string open_loop = print(unit_cube(), ReprKind::Dsl);
  const std::size_t pos = open_loop.find("line from 0 0 to 1 0");
  ASSERT_NE(pos, std::string::npos) << open_loop;
  open_loop.replace(pos, 20, "line from 0 0 to 0.5 0");
  const std::vector<EvalItem> items{item("op", unit_cube()), item(open_loop, unit_cube()),
                                    item(print(CadModel{}, ReprKind::Dsl), unit_cube())};
  const EvalReport r = evaluate_batch(items, ReprKind::Dsl, 256, 1);
  EXPECT_EQ(r.records[0].failure, EvalFailure::Parse);
  EXPECT_EQ(r.records[1].failure, EvalFailure::Validate) << r.records[1].message;
  EXPECT_EQ(r.records[2].failure, EvalFailure::EmptyGeometry) << r.records[2].message;
  EXPECT_EQ(r.summary.invalidity_ratio, 1.0);
  EXPECT_FALSE(r.summary.mean_cd.has_value());
}

TEST(EvaluateBatch, MatchesItemwiseRecomputation) {
  Rng rng(17);
  std::vector<EvalItem> items;
  for (int t = 0; t < 24; ++t) {
    const CadModel target = testing::random_model(rng, {});
    if (t % 4 == 0) {
      items.push_back(item("garbage " + std::to_string(t), target));
    } else {
      items.push_back(item(print(testing::mutate(target, rng), ReprKind::Gpl), target));
    }
  }
  const EvalReport r = evaluate_batch(items, ReprKind::Gpl, 512, 4, 3);
  std::size_t invalid = 0;
  std::vector<double> cds;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const ParseOutcome parsed = parse(items[i].generated, ReprKind::Gpl);
    std::optional<double> cd;
    if (parsed) {
      try {
        const SurfacePointCloud g = normalize_for_eval(sample_surface(compile(parsed.model()), 512, 4));
        const SurfacePointCloud t =
            normalize_for_eval(sample_surface(compile(canonicalize(items[i].target)), 512, 4));
        cd = brute_chamfer(g.points, t.points);
      } catch (const Error &) {
      }
    }
    EXPECT_EQ(r.records[i].valid(), cd.has_value()) << i;
    if (!cd) {
      ++invalid;
      continue;
    }
    EXPECT_NEAR(r.records[i].cd->value, *cd, 1e-12);
    cds.push_back(*cd);
  }
  EXPECT_EQ(r.summary.n_invalid, invalid);
  EXPECT_DOUBLE_EQ(r.summary.invalidity_ratio, static_cast<double>(invalid) / items.size());
  double mean = 0;
  for (const double v : cds) mean += v;
  mean /= cds.size();
  EXPECT_NEAR(*r.summary.mean_cd, mean, 1e-12);
  std::sort(cds.begin(), cds.end());
  const double median = cds.size() % 2 ? cds[cds.size() / 2] : (cds[cds.size() / 2 - 1] + cds[cds.size() / 2]) / 2;
  EXPECT_NEAR(*r.summary.median_cd, median, 1e-12);
}

TEST(EvaluateBatch, CountingIsOrderIndependent) {
  Rng rng(23);
  std::vector<EvalItem> items;
  for (int t = 0; t < 12; ++t) {
    const CadModel target = testing::random_model(rng, {});
    items.push_back(item(t % 3 == 0 ? "x" : print(target, ReprKind::StructuredText), target));
  }
  const EvalSummary a = evaluate_batch(items, ReprKind::StructuredText, 256, 1).summary;
  std::reverse(items.begin(), items.end());
  const EvalSummary b = evaluate_batch(items, ReprKind::StructuredText, 256, 1, 1).summary;
  EXPECT_EQ(a.n_invalid, b.n_invalid);
  EXPECT_EQ(a.invalidity_ratio, b.invalidity_ratio);
  EXPECT_EQ(a.median_cd, b.median_cd);
}

TEST(EvaluateBatch, EmptyBatch) {
  const EvalReport r = evaluate_batch({}, ReprKind::Dsl, 256, 1);
  EXPECT_EQ(r.summary.n_total, 0u);
  EXPECT_EQ(r.summary.invalidity_ratio, 0.0);
}

// ---------------------------------------------------------------- manifest

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("cadseq_manifest_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  void write(const std::string &name, const std::string &text) { std::ofstream(dir_ / name) << text; }

  std::filesystem::path dir_;
};

TEST_F(ManifestTest, TwoPairsOneBad) {
  write("target.cad.json", print(unit_cube(), ReprKind::Json));
  write("good.dsl", print(unit_cube(), ReprKind::Dsl));
  write("bad.dsl", "not a model");
  write("manifest.txt", "# generated target\ngood.dsl target.cad.json\n\nbad.dsl\ttarget.cad.json\n");
  const std::vector<EvalItem> items = read_manifest(dir_ / "manifest.txt");
  ASSERT_EQ(items.size(), 2u);
  const EvalReport r = evaluate_batch(items, ReprKind::Dsl, 256, 1);
  EXPECT_EQ(r.summary.invalidity_ratio, 0.5);
  const std::string jsonl = eval_report_to_jsonl(r);
  std::istringstream lines(jsonl);
  std::vector<nlohmann::json> records;
  for (std::string line; std::getline(lines, line);) records.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0]["generated"], "good.dsl");
  EXPECT_EQ(records[0]["cd"], 0.0);
  EXPECT_EQ(records[1]["failure"], "parse");
  EXPECT_EQ(records[2]["type"], "summary");
  EXPECT_EQ(records[2]["invalidity_ratio"], 0.5);
}

TEST_F(ManifestTest, MissingGeneratedFileIsInvalidEntry) {
  write("target.cad.json", print(unit_cube(), ReprKind::Json));
  write("manifest.txt", "missing.dsl target.cad.json\n");
  const EvalReport r = evaluate_batch(read_manifest(dir_ / "manifest.txt"), ReprKind::Dsl, 256, 1);
  EXPECT_EQ(r.summary.n_invalid, 1u);
}

TEST_F(ManifestTest, Errors) {
  write("manifest.txt", "only_one_field\n");
  EXPECT_THROW(read_manifest(dir_ / "manifest.txt"), Error);
  write("manifest.txt", "a.dsl missing.cad.json\n");
  try {
    read_manifest(dir_ / "manifest.txt");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidTarget);
  }
  EXPECT_THROW(read_manifest(dir_ / "nope.txt"), Error);
}

}  // namespace
}  // namespace cadseq
