#include <atomic>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cadseq/canonical.hpp"
#include "cadseq/datagen.hpp"
#include "cadseq/error.hpp"
#include "random_model.hpp"

namespace cadseq {
namespace {

using testing::box_op;
using testing::circle_loop;
using testing::Rng;
using testing::unit_cube;

template <typename F>
ErrorCode error_of(F f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

std::vector<std::string> numbers_in(const std::string &text) {
  static const std::regex number(R"(-?[0-9]+(\.[0-9]+)?(e[-+]?[0-9]+)?)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

CadModel two_step() {
  CadModel m = unit_cube();
  m.ops.push_back(box_op(0.25, 0.25, 1, 0.75, 0.75, 1.5, BooleanKind::Join));
  return m;
}

std::string read_text(const std::string &path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------- templates

TEST(Template, UnitSquareMentionsEveryParameter) {
  CadModel m = unit_cube();
  m.ops[0].extrude_toward = 0.75;
  const std::string text = template_quantitative(m);
  for (const char *corner : {"(0, 0)", "(1, 0)", "(1, 1)", "(0, 1)"}) {
    EXPECT_NE(text.find(corner), std::string::npos) << corner;
  }
  EXPECT_NE(text.find("extruding 0.75 along the normal"), std::string::npos) << text;
  // One sentence per primitive.
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(Template, RoundTripsThroughCompanionGrammar) {
  Rng rng(40);
  for (int t = 0; t < 300; ++t) {
    CadModel m = testing::random_model(rng, {});
    m.source.reset();
    EXPECT_EQ(parse_quantitative(template_quantitative(m)), canonicalize(m)) << template_quantitative(m);
  }
  EXPECT_EQ(parse_quantitative(template_quantitative(CadModel{})), CadModel{});
}

TEST(Template, OneRadiusChangeIsOneNumber) {
  CadModel a = unit_cube();
  a.ops[0].profile.loops.push_back(circle_loop(0.5, 0.5, 0.2));
  CadModel b = a;
  std::get<Circle>(b.ops[0].profile.loops[1].curves[0]).radius = 0.3;
  const std::vector<std::string> na = numbers_in(template_quantitative(a));
  const std::vector<std::string> nb = numbers_in(template_quantitative(b));
  ASSERT_EQ(na.size(), nb.size());
  int differing = 0;
  for (std::size_t i = 0; i < na.size(); ++i) differing += na[i] != nb[i];
  EXPECT_EQ(differing, 1);
}

TEST(Template, ByteStable) {
  const CadModel m = two_step();
  EXPECT_EQ(template_quantitative(m), template_quantitative(m));
  EXPECT_EQ(template_quantitative(m), read_text(CADSEQ_GOLDEN_DIR "/two_step.template.txt"));
}

TEST(Template, ParseErrorsNameTheLine) {
  for (const auto &[text, line] : std::vector<std::pair<std::string, std::string>>{
           {"Hello.\n", "line 1"},
           {"Start the outer boundary with a line from (0, 0) to (1, 0).\n", "line 1"},
           {template_quantitative(unit_cube()) + "Continue with a spline.\n", "line 6"},
           {"", "no steps"},
       }) {
    try {
      parse_quantitative(text);
      ADD_FAILURE() << text;
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseFailed);
      EXPECT_NE(std::string(e.what()).find(line), std::string::npos) << e.what();
    }
  }
}

TEST(Template, EditSentences) {
  CadModel current = two_step();
  current.ops[0].profile.loops.push_back(circle_loop(0.5, 0.5, 0.1));
  CadModel target = current;
  target.ops[0].extrude_toward = 2;
  target.ops[0].profile.loops.pop_back();
  target.ops.push_back(box_op(0, 0, 2, 0.2, 0.2, 2.5, BooleanKind::Cut));
  const std::string text = template_edit(diff(current, target));
  EXPECT_NE(text.find("Insert a new step 3."), std::string::npos) << text;
  EXPECT_NE(text.find("Step 3 cuts material"), std::string::npos) << text;
  EXPECT_NE(text.find("Remove hole 1 of step 1."), std::string::npos) << text;
  EXPECT_NE(text.find("Change the extrusion along the normal of step 1 from 1 to 2."), std::string::npos) << text;
}

// ---------------------------------------------------------------- views

TEST(Views, UnitCubeConvention) {
  const ViewSpec v = nine_views(unit_cube());
  const Vec3 c{0.5, 0.5, 0.5};
  const double r = 2.5 * std::sqrt(3.0);
  std::set<std::string> names;
  for (std::size_t i = 0; i < 9; ++i) {
    const CameraPose &p = v.poses[i];
    names.insert(p.name);
    EXPECT_EQ(p.look_at.x, c.x);
    EXPECT_EQ(p.look_at.z, c.z);
    const double dx = p.eye.x - c.x, dy = p.eye.y - c.y, dz = p.eye.z - c.z;
    EXPECT_NEAR(std::sqrt(dx * dx + dy * dy + dz * dz), r, 1e-12);
    const bool outside = p.eye.x < 0 || p.eye.x > 1 || p.eye.y < 0 || p.eye.y > 1 || p.eye.z < 0 || p.eye.z > 1;
    EXPECT_TRUE(outside);
    if (i < 6) {
      // Axis views: exactly one coordinate leaves the centre.
      const int off = (std::abs(dx) > 1e-12) + (std::abs(dy) > 1e-12) + (std::abs(dz) > 1e-12);
      EXPECT_EQ(off, 1) << p.name;
    }
  }
  EXPECT_EQ(names.size(), 9u);
  EXPECT_EQ(v.poses[0].eye.x, 0.5 + r);
}

TEST(Views, TranslateWithTheModel) {
  CadModel moved = two_step();
  for (auto &op : moved.ops) op.frame.origin = {op.frame.origin.x + 3, op.frame.origin.y - 1, op.frame.origin.z + 2};
  const ViewSpec a = nine_views(two_step());
  const ViewSpec b = nine_views(moved);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(b.poses[i].eye.x - a.poses[i].eye.x, 3, 1e-12);
    EXPECT_NEAR(b.poses[i].eye.y - a.poses[i].eye.y, -1, 1e-12);
    EXPECT_NEAR(b.poses[i].look_at.z - a.poses[i].look_at.z, 2, 1e-12);
    EXPECT_EQ(b.poses[i].up, a.poses[i].up);
  }
}

TEST(Views, EmptyModelRejected) { EXPECT_EQ(error_of([] { nine_views(CadModel{}); }), ErrorCode::EmptyGeometry); }

// ---------------------------------------------------------------- clients

TEST(ScriptedClient, CannedResponses) {
  ScriptedClient client;
  client.add(model_hash(unit_cube()), "a plain cube");
  EXPECT_EQ(request_qualitative(unit_cube(), client), "a plain cube");
  EXPECT_EQ(error_of([&] { request_qualitative(two_step(), client); }), ErrorCode::MalformedResponse);
  client.add(pair_hash(unit_cube(), two_step()), "put a block on top");
  EXPECT_EQ(request_qualitative(unit_cube(), two_step(), client), "put a block on top");
  client.add(model_hash(two_step()), "  \n");
  EXPECT_EQ(error_of([&] { request_qualitative(two_step(), client); }), ErrorCode::MalformedResponse);
}

TEST(ScriptedClient, HashIgnoresSerializationDetails) {
  CadModel rotated = unit_cube();
  auto &curves = rotated.ops[0].profile.loops[0].curves;
  std::rotate(curves.begin(), curves.begin() + 2, curves.end());
  EXPECT_EQ(model_hash(rotated), model_hash(unit_cube()));
  EXPECT_NE(model_hash(two_step()), model_hash(unit_cube()));
  EXPECT_NE(pair_hash(unit_cube(), two_step()), pair_hash(two_step(), unit_cube()));
}

class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server &server() { return server_; }
  std::string url(const std::string &path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpClientConfig config_for(const std::string &url, int timeout_ms = 2000, int retries = 0) {
  HttpClientConfig cfg;
  cfg.endpoint = url;
  cfg.api_key = "secret";
  cfg.timeout = std::chrono::milliseconds(timeout_ms);
  cfg.retries = retries;
  return cfg;
}

TEST(HttpClient, ReturnsCompletionVerbatim) {
  LocalServer local;
  std::string seen_auth, seen_tag;
  bool had_views = false;
  local.server().Post("/complete", [&](const httplib::Request &req, httplib::Response &res) {
    seen_auth = req.get_header_value("Authorization");
    const auto body = nlohmann::json::parse(req.body);
    seen_tag = body["tag"];
    had_views = body["views"]["poses"].size() == 9;
    res.set_content(R"({"text": "  A cube, unit sized.\n"})", "application/json");
  });
  HttpCompletionClient client(config_for(local.url("/complete")));
  EXPECT_EQ(request_qualitative(unit_cube(), client), "  A cube, unit sized.\n");
  EXPECT_EQ(seen_auth, "Bearer secret");
  EXPECT_EQ(seen_tag, "qualitative_generation");
  EXPECT_TRUE(had_views);
}

TEST(HttpClient, MalformedResponses) {
  LocalServer local;
  local.server().Post("/not-json", [](const httplib::Request &, httplib::Response &res) {
    res.set_content("hello", "text/plain");
  });
  local.server().Post("/no-text", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"answer": 1})", "application/json");
  });
  local.server().Post("/bad-request", [](const httplib::Request &, httplib::Response &res) { res.status = 400; });
  for (const char *path : {"/not-json", "/no-text", "/bad-request"}) {
    HttpCompletionClient client(config_for(local.url(path)));
    EXPECT_EQ(error_of([&] { request_qualitative(unit_cube(), client); }), ErrorCode::MalformedResponse) << path;
  }
}

TEST(HttpClient, RetriesServerErrors) {
  LocalServer local;
  std::atomic<int> calls{0};
  local.server().Post("/flaky", [&](const httplib::Request &, httplib::Response &res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"text": "ok"})", "application/json");
  });
  HttpCompletionClient client(config_for(local.url("/flaky"), 2000, 1));
  EXPECT_EQ(request_qualitative(unit_cube(), client), "ok");
  EXPECT_EQ(calls.load(), 2);
  HttpCompletionClient no_retry(config_for(local.url("/missing"), 2000, 0));
  EXPECT_EQ(error_of([&] { request_qualitative(unit_cube(), no_retry); }), ErrorCode::MalformedResponse);
}

TEST(HttpClient, Timeout) {
  LocalServer local;
  local.server().Post("/slow", [](const httplib::Request &, httplib::Response &res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content(R"({"text": "late"})", "application/json");
  });
  HttpCompletionClient client(config_for(local.url("/slow"), 150, 0));
  EXPECT_EQ(error_of([&] { request_qualitative(unit_cube(), client); }), ErrorCode::ClientTimeout);
}

TEST(HttpClient, Unavailable) {
  int port = 0;
  {
    LocalServer local;  // grab a free port, then close it
    port = std::stoi(local.url("").substr(std::string("http://127.0.0.1:").size()));
  }
  HttpCompletionClient client(config_for("http://127.0.0.1:" + std::to_string(port) + "/x", 500, 1));
  EXPECT_EQ(error_of([&] { request_qualitative(unit_cube(), client); }), ErrorCode::ClientUnavailable);
  EXPECT_EQ(error_of([] { HttpCompletionClient(HttpClientConfig{}); }), ErrorCode::ClientUnavailable);
  EXPECT_EQ(error_of([] { HttpCompletionClient(config_for("https://example.invalid/")); }),
            ErrorCode::ClientUnavailable);
}

TEST(HttpClient, ConfigFromEnvironment) {
  const auto path = std::filesystem::temp_directory_path() / "cadseq_client_config.json";
  std::ofstream(path) << R"({"timeout_ms": 1234, "retries": 5})";
  setenv("CADSEQ_MODEL_ENDPOINT", "http://localhost:9/complete", 1);
  setenv("CADSEQ_MODEL_KEY", "k", 1);
  const HttpClientConfig cfg = HttpClientConfig::from_env(path);
  unsetenv("CADSEQ_MODEL_ENDPOINT");
  unsetenv("CADSEQ_MODEL_KEY");
  std::filesystem::remove(path);
  EXPECT_EQ(cfg.endpoint, "http://localhost:9/complete");
  EXPECT_EQ(cfg.api_key, "k");
  EXPECT_EQ(cfg.timeout, std::chrono::milliseconds(1234));
  EXPECT_EQ(cfg.retries, 5);
}

class CountingClient : public CompletionClient {
 public:
  std::string complete(const CompletionRequest &) override {
    const int now = ++in_flight;
    int seen = max_seen.load();
    while (now > seen && !max_seen.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight;
    return "text";
  }
  std::atomic<int> in_flight{0};
  std::atomic<int> max_seen{0};
};

TEST(BoundedClient, CapsConcurrency) {
  CountingClient inner;
  BoundedClient bounded(inner, 2);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int k = 0; k < 5; ++k) bounded.complete({});
    });
  }
  for (auto &t : threads) t.join();
  EXPECT_LE(inner.max_seen.load(), 2);
  EXPECT_GE(inner.max_seen.load(), 1);
}

// ---------------------------------------------------------------- corpus

void expect_records_apply(const CorpusReport &report) {
  for (const InstructionRecord &r : report.records) {
    ASSERT_TRUE(r.current && r.script);
    EXPECT_EQ(apply(*r.current, *r.script), r.target);
    EXPECT_EQ(r.target, canonicalize(r.target));
  }
}

TEST(Corpus, TwoOpModelCounts) {
  const CorpusReport report = build_editing_corpus({two_step()}, nullptr, {});
  EXPECT_GE(report.deletions, 2u);
  EXPECT_GE(report.additions, 2u);
  EXPECT_EQ(report.modifications, 1u);
  expect_records_apply(report);
  for (const InstructionRecord &r : report.records) {
    EXPECT_EQ(r.task, Task::Editing);
    EXPECT_EQ(r.modality, Modality::Quantitative);
    EXPECT_EQ(r.text, template_edit(*r.script));
  }
}

std::vector<CadModel> synthetic_models(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CadModel> models;
  for (std::size_t i = 0; i < n; ++i) models.push_back(testing::random_model(rng, {.min_ops = 1, .max_ops = 4}));
  return models;
}

TEST(Corpus, RealizesRequestedMix) {
  CorpusOptions options;
  options.mix = EditMix{0.4, 0.3, 0.3};
  options.seed = 3;
  const CorpusReport report = build_editing_corpus(synthetic_models(100, 77), nullptr, options);
  ASSERT_GT(report.records.size(), 100u);
  EXPECT_NEAR(report.proportion(EditType::Addition), 0.4, 0.02);
  EXPECT_NEAR(report.proportion(EditType::Deletion), 0.3, 0.02);
  EXPECT_NEAR(report.proportion(EditType::Modification), 0.3, 0.02);
  expect_records_apply(report);
}

TEST(Corpus, DeterministicAndThreadIndependent) {
  const std::vector<CadModel> models = synthetic_models(20, 5);
  CorpusOptions a;
  a.seed = 11;
  a.threads = 1;
  CorpusOptions b = a;
  b.threads = 3;
  EXPECT_EQ(build_editing_corpus(models, nullptr, a).records, build_editing_corpus(models, nullptr, b).records);
  a.mix = EditMix{};
  b.mix = EditMix{};
  EXPECT_EQ(build_editing_corpus(models, nullptr, a).records, build_editing_corpus(models, nullptr, b).records);
}

TEST(Corpus, QualitativeTwinsAndFailures) {
  const std::vector<CadModel> models{two_step(), unit_cube()};
  const CorpusReport plain = build_editing_corpus(models, nullptr, {});
  ScriptedClient client;
  std::size_t registered = 0;
  for (const InstructionRecord &r : plain.records) {
    if (r.edit_type == EditType::Deletion) {
      client.add(pair_hash(*r.current, r.target), "remove something");
      ++registered;
    }
  }
  const CorpusReport report = build_editing_corpus(models, &client, {});
  std::size_t qualitative = 0;
  for (const InstructionRecord &r : report.records) {
    if (r.modality == Modality::Qualitative) {
      ++qualitative;
      EXPECT_EQ(r.text, "remove something");
      EXPECT_EQ(r.edit_type, EditType::Deletion);
    }
  }
  EXPECT_EQ(qualitative, registered);
  // Unregistered pairs and the unit cube (nothing removable) are logged failures.
  EXPECT_FALSE(report.failures.empty());
  expect_records_apply(report);
}

TEST(Corpus, RejectsBadMix) {
  CorpusOptions options;
  options.mix = EditMix{0.5, 0.5, 0.5};
  EXPECT_EQ(error_of([&] { build_editing_corpus({two_step()}, nullptr, options); }), ErrorCode::InvalidArgument);
}

TEST(Corpus, ModificationsChangeOneParameter) {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const CadModel m = testing::random_model(rng, {});
    const auto mod = synthesize_modification(m, t);
    if (!mod) continue;
    ASSERT_EQ(mod->first.actions.size(), 1u);
    EXPECT_TRUE(std::holds_alternative<ModifyParam>(mod->first.actions[0]));
    EXPECT_EQ(apply(canonicalize(m), mod->first), mod->second);
  }
}

TEST(Corpus, RecordsRoundTripThroughJson) {
  const CorpusReport report = build_editing_corpus({two_step()}, nullptr, {});
  for (const ReprKind kind : kAllReprKinds) {
    const std::string jsonl = corpus_to_jsonl(report.records, kind);
    std::istringstream in(jsonl);
    std::size_t i = 0;
    for (std::string line; std::getline(in, line); ++i) EXPECT_EQ(record_from_json(line), report.records[i]);
    EXPECT_EQ(i, report.records.size());
  }
  EXPECT_EQ(error_of([] { record_from_json("{}"); }), ErrorCode::ParseFailed);
}

TEST(Corpus, GenerationRecords) {
  ScriptedClient client;
  client.add(model_hash(unit_cube()), "a cube");
  const CorpusReport report = build_generation_corpus({unit_cube(), two_step()}, &client);
  ASSERT_EQ(report.records.size(), 3u);
  EXPECT_EQ(report.records[0].task, Task::Generation);
  EXPECT_FALSE(report.records[0].current.has_value());
  EXPECT_EQ(report.records[1].text, "a cube");
  EXPECT_EQ(report.failures.size(), 1u);
}

// ---------------------------------------------------------------- SCoT

TEST(Scot, AcceptsWrittenTraces) {
  const CorpusReport report = build_editing_corpus(synthetic_models(15, 9), nullptr, {});
  ASSERT_FALSE(report.records.empty());
  for (const InstructionRecord &r : report.records) {
    const ScotResult result = validate_scot(write_scot(r), *r.current);
    EXPECT_TRUE(result.ok()) << write_scot(r) << (result.violations.empty() ? "" : result.violations[0].message);
    if (result.ok()) EXPECT_EQ(result.trace->script, *r.script);
  }
}

TEST(Scot, GoldenTrace) {
  const std::string golden = read_text(CADSEQ_GOLDEN_DIR "/two_step.scot.txt");
  CadModel current = two_step();
  const ScotResult result = validate_scot(golden, current);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.trace->script.actions.size(), 1u);
  InstructionRecord r;
  r.task = Task::Editing;
  r.current = current;
  CadModel target = current;
  target.ops[1].extrude_toward = 1;
  r.target = canonicalize(target);
  r.script = diff(current, target);
  r.text = template_edit(*r.script);
  EXPECT_EQ(write_scot(r), golden);
}

std::string trace_with(const std::string &position, const std::string &analysis = "<operation> </operation>") {
  return "<intent_understanding>Make it taller.</intent_understanding>\n"
         "<modeling_analysis>" + analysis + "</modeling_analysis>\n"
         "<parameter_computation>toward 1 -> 2</parameter_computation>\n"
         "<position_identification>\n" + position + "</position_identification>\n";
}

bool has_violation(const ScotResult &r, const std::string &section, const std::string &code) {
  for (const ScotViolation &v : r.violations) {
    if (v.section == section && v.code == code) return true;
  }
  return false;
}

TEST(Scot, MissingSectionIsNamed) {
  const std::string trace =
      "<intent_understanding>x</intent_understanding><modeling_analysis>y</modeling_analysis>"
      "<position_identification>modify ops[0].scale 1 -> 2\n</position_identification>";
  const ScotResult r = validate_scot(trace, unit_cube());
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_violation(r, "parameter_computation", "missing_section"));
}

TEST(Scot, IndexBeyondModel) {
  const ScotResult r = validate_scot(trace_with("modify ops[2].scale 1 -> 2\nedited_a 2\nedited_b 2\n"), unit_cube());
  EXPECT_TRUE(has_violation(r, "position_identification", "index_out_of_range"));
  const ScotResult ok = validate_scot(trace_with("modify ops[0].scale 1 -> 2\nedited_a 0\nedited_b 0\n"), unit_cube());
  EXPECT_TRUE(ok.ok());
}

TEST(Scot, OtherViolations) {
  const std::string good_position = "modify ops[0].scale 1 -> 2\n";
  EXPECT_TRUE(has_violation(validate_scot(trace_with(good_position, "<widget></widget>"), unit_cube()),
                            "modeling_analysis", "unknown_marker"));
  EXPECT_TRUE(has_violation(validate_scot(trace_with(good_position, "<operation><frame></operation>"), unit_cube()),
                            "modeling_analysis", "unbalanced_markers"));
  EXPECT_TRUE(has_violation(validate_scot(trace_with("frobnicate\n"), unit_cube()), "position_identification",
                            "script_parse"));
  EXPECT_TRUE(has_violation(validate_scot(trace_with("modify ops[0].scale 3 -> 2\n"), unit_cube()),
                            "position_identification", "stale_value"));
  EXPECT_TRUE(has_violation(validate_scot(trace_with("# nothing\n"), unit_cube()), "position_identification",
                            "empty_script"));
  const std::string swapped =
      "<modeling_analysis>a</modeling_analysis><intent_understanding>b</intent_understanding>"
      "<parameter_computation>c</parameter_computation><position_identification>" + good_position +
      "</position_identification>";
  EXPECT_TRUE(has_violation(validate_scot(swapped, unit_cube()), "modeling_analysis", "section_order"));
  const std::string twice = trace_with(good_position) + "<intent_understanding>again</intent_understanding>";
  EXPECT_TRUE(has_violation(validate_scot(twice, unit_cube()), "intent_understanding", "duplicate_section"));
  EXPECT_TRUE(has_violation(validate_scot("<intent_understanding>", unit_cube()), "intent_understanding",
                            "unclosed_section"));
}

TEST(Scot, NeverThrowsOnGarbage) {
  Rng rng(2);
  std::uniform_int_distribution<int> byte(0, 255);
  const std::string base = trace_with("modify ops[0].scale 1 -> 2\n");
  for (int t = 0; t < 300; ++t) {
    std::string text = base;
    for (int k = 0; k < 5; ++k) text[rng() % text.size()] = static_cast<char>(byte(rng));
    EXPECT_NO_THROW(validate_scot(text, unit_cube()));
  }
}

// ---------------------------------------------------------------- split

TEST(Split, FractionsAndCoverage) {
  const Split s = split_indices(1000, 0.9, 0.05, 0.05, 4);
  EXPECT_EQ(s.train.size(), 900u);
  EXPECT_EQ(s.validation.size(), 50u);
  EXPECT_EQ(s.test.size(), 50u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 1000u);
  const Split again = split_indices(1000, 0.9, 0.05, 0.05, 4);
  EXPECT_EQ(again.test, s.test);
  EXPECT_NE(split_indices(1000, 0.9, 0.05, 0.05, 5).test, s.test);
  EXPECT_EQ(error_of([] { split_indices(10, 0.9, 0.2, 0.0, 1); }), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace cadseq
