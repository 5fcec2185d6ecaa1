#include <charconv>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cadseq/datagen.hpp"
#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/metrics.hpp"
#include "cadseq/repr.hpp"
#include "cadseq/reward.hpp"
#include "cadseq/service.hpp"

namespace {

using namespace cadseq;
using nlohmann::json;

// Bad input detected after parsing; exits with the usage code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string &path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string &path, const std::string &data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << data;
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
}

ReprKind kind_or(const std::string &name, const std::string &path) {
  if (!name.empty()) {
    const auto k = repr_from_string(name);
    if (!k) throw UsageError("unknown representation \"" + name + "\" (json, dsl, st, gpl)");
    return *k;
  }
  const auto k = repr_from_path(path);
  if (!k) throw UsageError("cannot infer the representation of " + path + "; pass --from");
  return *k;
}

CadModel read_model(const std::string &path, const std::string &kind = "") {
  return parse_or_throw(read_input(path), kind_or(kind, path));
}

EditScript read_script(const std::string &path) {
  const std::string text = read_input(path);
  return path.size() > 5 && path.ends_with(".json") ? script_from_json(text) : parse_script(text);
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

const CLI::Validator kReprName = CLI::IsMember({"json", "dsl", "st", "gpl"});
const CLI::Validator kInputFile = CLI::Validator(
    [](std::string &path) { return path == "-" ? std::string() : CLI::ExistingFile(path); }, "FILE|-");

struct Options {
  std::string input, second, third, output, from, to, kind = "dsl";
  std::uint64_t seed = 0;
  std::size_t n_points = 2048, threads = 0, modifications = 1;
  bool records = false, qualitative = false;
  double alpha = 5.0, beta = 0.01, cd_scale = 1.0, tolerance = 1e-3;
  std::string length_unit = "primitives", format = "json", mix, client_config, config, host, session_dir;
  int port = -1;
  std::vector<std::string> inputs;
  std::size_t count = 0;
  double train = 0.9, validation = 0.05, test = 0.05;
};

int run_convert(const Options &o) {
  const CadModel m = read_model(o.input, o.from);
  write_output(o.output, print(m, kind_or(o.to, "")));
  return 0;
}

int run_validate(const Options &o) {
  const ParseOutcome outcome = parse(read_input(o.input), kind_or(o.from, o.input));
  if (o.records) {
    json j{{"valid", outcome.ok()}, {"error", nullptr}};
    if (!outcome.ok()) {
      const ParseError &e = outcome.error();
      j["error"] = {{"kind", std::string(to_string(e.kind))}, {"line", e.line}, {"column", e.column},
                    {"message", e.message}};
    }
    std::cout << j.dump() << '\n';
  } else if (outcome.ok()) {
    std::cout << "valid\n";
  }
  if (!outcome.ok()) {
    std::cerr << o.input << ": " << outcome.error().describe() << '\n';
    return 1;
  }
  return 0;
}

int run_eval(const Options &o) {
  const EvalReport report =
      evaluate_batch(read_manifest(o.input), kind_or(o.kind, ""), o.n_points, o.seed, o.threads);
  if (o.records) {
    std::cout << eval_report_to_jsonl(report);
    return 0;
  }
  const EvalSummary &s = report.summary;
  std::cout << "items " << s.n_total << "\ninvalid " << s.n_invalid << "\ninvalidity_ratio "
            << num(s.invalidity_ratio) << '\n';
  std::cout << "mean_cd " << (s.mean_cd ? num(*s.mean_cd) + " (x1e3 " + num(*s.mean_cd * kCdReportScale) + ")" : "n/a")
            << '\n';
  std::cout << "median_cd "
            << (s.median_cd ? num(*s.median_cd) + " (x1e3 " + num(*s.median_cd * kCdReportScale) + ")" : "n/a")
            << '\n';
  return 0;
}

int run_reward(const Options &o) {
  RewardConfig cfg;
  cfg.alpha = o.alpha;
  cfg.beta = o.beta;
  cfg.cd_scale = o.cd_scale;
  cfg.n_points = o.n_points;
  cfg.seed = o.seed;
  cfg.kind = kind_or(o.kind, "");
  cfg.length_unit = *length_unit_from_string(o.length_unit);
  check_config(cfg);
  const std::vector<BatchEntry> entries = score_batch(read_reward_manifest(o.input), cfg, o.threads);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const BatchEntry &e = entries[k];
    if (!e.breakdown) std::cerr << "entry " << k << ": " << to_string(*e.error) << ": " << e.message << '\n';
    if (o.records) {
      std::cout << batch_entry_to_json(e) << '\n';
    } else if (e.breakdown) {
      const RewardBreakdown &b = *e.breakdown;
      std::cout << k << " total=" << num(b.total) << " chamfer=" << num(b.r_chamfer) << " format=" << num(b.r_format)
                << " exec=" << num(b.r_exec) << " length=" << num(b.r_length) << '\n';
    } else {
      std::cout << k << " error=" << to_string(*e.error) << '\n';
    }
  }
  return 0;
}

int run_edit_apply(const Options &o) {
  const CadModel m = read_model(o.input, o.from);
  const ApplyResult r = apply_detailed(m, read_script(o.second));
  const ReprKind out = o.to.empty() ? kind_or(o.from, o.input) : kind_or(o.to, "");
  if (o.records) {
    std::cout << json{{"model", {{"kind", std::string(to_string(out))}, {"text", print(r.model, out)}}},
                      {"script", json::parse(script_to_json(r.completed))},
                      {"inverse", json::parse(script_to_json(r.inverse))}}
                     .dump()
              << '\n';
    return 0;
  }
  write_output(o.output, print(r.model, out));
  return 0;
}

int run_edit_diff(const Options &o) {
  const EditScript s = diff(read_model(o.input, o.from), read_model(o.second, o.from));
  write_output(o.output, o.records ? script_to_json(s) + "\n" : print_script(s));
  return 0;
}

int run_edit_invert(const Options &o) {
  const EditScript s = invert(read_script(o.input));
  write_output(o.output, o.records ? script_to_json(s) + "\n" : print_script(s));
  return 0;
}

int run_pairs(const Options &o) {
  const CadModel m = read_model(o.input, o.from);
  std::vector<InstructionRecord> records;
  for (const EditPair &p : make_pairs(m)) {
    for (const bool deletion : {true, false}) {
      InstructionRecord r;
      r.task = Task::Editing;
      r.edit_type = deletion ? EditType::Deletion : EditType::Addition;
      r.current = deletion ? p.original : p.reduced;
      r.target = deletion ? p.reduced : p.original;
      r.script = deletion ? p.deletion : p.addition;
      r.text = template_edit(*r.script);
      records.push_back(std::move(r));
    }
  }
  if (o.records) {
    write_output(o.output, corpus_to_jsonl(records, kind_or(o.kind, "")));
  } else {
    std::string out;
    for (const InstructionRecord &r : records) out += std::string(to_string(*r.edit_type)) + ": " + r.text;
    write_output(o.output, out);
  }
  return 0;
}

std::unique_ptr<CompletionClient> make_client(const Options &o) {
  if (!o.qualitative) return nullptr;
  const std::optional<std::filesystem::path> cfg =
      o.client_config.empty() ? std::nullopt : std::optional<std::filesystem::path>(o.client_config);
  return std::make_unique<HttpCompletionClient>(HttpClientConfig::from_env(cfg));
}

EditMix parse_mix(const std::string &text) {
  EditMix mix;
  char comma1 = 0, comma2 = 0;
  std::istringstream in(text);
  if (!(in >> mix.addition >> comma1 >> mix.deletion >> comma2 >> mix.modification) || comma1 != ',' ||
      comma2 != ',') {
    throw UsageError("--mix expects three comma-separated fractions, e.g. 0.4,0.3,0.3");
  }
  return mix;
}

int run_corpus(const Options &o) {
  std::vector<CadModel> models;
  for (const std::string &path : o.inputs) models.push_back(read_model(path, o.from));
  CorpusOptions options;
  if (!o.mix.empty()) options.mix = parse_mix(o.mix);
  options.modifications_per_model = o.modifications;
  options.seed = o.seed;
  options.threads = o.threads;
  const auto client = make_client(o);
  const CorpusReport report = build_editing_corpus(models, client.get(), options);
  write_output(o.output, corpus_to_jsonl(report.records, kind_or(o.kind, "")));
  std::cerr << "records " << report.records.size() << " additions " << report.additions << " deletions "
            << report.deletions << " modifications " << report.modifications << " failures "
            << report.failures.size() << '\n';
  for (const CorpusFailure &f : report.failures) std::cerr << "model " << f.model << ": " << f.message << '\n';
  return 0;
}

int run_scot_check(const Options &o) {
  const ScotResult result = validate_scot(read_input(o.input), read_model(o.second, o.from));
  if (o.records) {
    json violations = json::array();
    for (const ScotViolation &v : result.violations) {
      violations.push_back({{"section", v.section}, {"code", v.code}, {"message", v.message}});
    }
    json j{{"ok", result.ok()}, {"violations", violations}};
    if (result.ok()) j["script"] = json::parse(script_to_json(result.trace->script));
    std::cout << j.dump() << '\n';
  } else if (result.ok()) {
    std::cout << "ok\n";
  }
  for (const ScotViolation &v : result.violations) {
    std::cerr << v.section << ": " << v.code << ": " << v.message << '\n';
  }
  return result.ok() ? 0 : 1;
}

int run_template(const Options &o) {
  write_output(o.output, template_quantitative(read_model(o.input, o.from)));
  return 0;
}

int run_split(const Options &o) {
  const Split s = split_indices(o.count, o.train, o.validation, o.test, o.seed);
  std::cout << json{{"train", s.train}, {"validation", s.validation}, {"test", s.test}}.dump() << '\n';
  return 0;
}

int run_mesh(const Options &o) {
  const TriMesh mesh = tessellate(compile(read_model(o.input, o.from)), o.tolerance);
  write_output(o.output, o.format == "stl" ? to_binary_stl(mesh) : to_mesh_json(mesh) + "\n");
  return 0;
}

int run_serve(const Options &o) {
  ServiceConfig cfg = o.config.empty() ? ServiceConfig{} : ServiceConfig::from_json(read_input(o.config));
  if (!o.host.empty()) cfg.host = o.host;
  if (o.port >= 0) cfg.port = o.port;
  if (!o.session_dir.empty()) cfg.session_dir = o.session_dir;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(cfg);
  HttpServer server(service);
  if (!server.bind(cfg.host, cfg.port)) {
    throw Error(ErrorCode::InvalidArgument, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  }
  std::cout << "listening on http://" << cfg.host << ":" << server.bound_port() << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {}, shutting down", sig);
    server.stop();
  });
  server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  Options o;
  CLI::App app{"Sketch-extrude CAD sequence toolkit: conversion, evaluation, rewards, edits and data generation."};
  app.name("cadseq");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", "cadseq 1.0.0");
  app.get_formatter()->column_width(34);
  std::function<int()> action;

  auto input = [&](CLI::App *sub, const char *help = "input file or - for stdin") {
    sub->add_option("input", o.input, help)->required()->check(kInputFile);
  };
  auto from = [&](CLI::App *sub) {
    sub->add_option("--from", o.from, "input representation (default: from the file extension)")->check(kReprName);
  };
  auto output = [&](CLI::App *sub) { sub->add_option("-o,--output", o.output, "output file (default: stdout)"); };
  auto records = [&](CLI::App *sub) { sub->add_flag("--records", o.records, "emit machine-readable JSON records"); };
  auto seed = [&](CLI::App *sub) { sub->add_option("--seed", o.seed, "sampling seed (required)")->required(); };
  auto threads = [&](CLI::App *sub) { sub->add_option("--threads", o.threads, "worker threads (0: all cores)"); };

  auto *convert = app.add_subcommand("convert", "convert a model between representations");
  input(convert);
  from(convert);
  convert->add_option("--to", o.to, "output representation")->required()->check(kReprName);
  output(convert);
  convert->callback([&] { action = [&] { return run_convert(o); }; });

  auto *validate = app.add_subcommand("validate", "parse and validate a model");
  input(validate);
  from(validate);
  records(validate);
  validate->callback([&] { action = [&] { return run_validate(o); }; });

  auto *eval = app.add_subcommand("eval", "chamfer distance and invalidity ratio over a manifest");
  input(eval, "manifest: one '<generated> <target>' pair per line");
  seed(eval);
  eval->add_option("--n-points", o.n_points, "surface samples per model")->check(CLI::PositiveNumber);
  eval->add_option("--kind", o.kind, "representation of the generated files")->check(kReprName);
  threads(eval);
  records(eval);
  eval->callback([&] { action = [&] { return run_eval(o); }; });

  auto *reward = app.add_subcommand("reward", "reward breakdown for each manifest entry");
  input(reward, "manifest: '<generated> <target> [<current> [<script>]]' per line");
  seed(reward);
  reward->add_option("--alpha", o.alpha, "chamfer decay rate");
  reward->add_option("--beta", o.beta, "length penalty weight");
  reward->add_option("--length-unit", o.length_unit, "primitives or characters")
      ->check(CLI::IsMember({"primitives", "characters"}));
  reward->add_option("--cd-scale", o.cd_scale, "factor applied to the chamfer distance before the decay");
  reward->add_option("--n-points", o.n_points, "surface samples per model")->check(CLI::PositiveNumber);
  reward->add_option("--kind", o.kind, "representation of the generated files")->check(kReprName);
  threads(reward);
  records(reward);
  reward->callback([&] { action = [&] { return run_reward(o); }; });

  auto *edit = app.add_subcommand("edit", "apply, diff and invert edit scripts");
  edit->require_subcommand(1);
  auto *apply_cmd = edit->add_subcommand("apply", "apply a script to a model");
  input(apply_cmd, "model file");
  apply_cmd->add_option("script", o.second, "script file (.json: structured form)")->required()->check(kInputFile);
  from(apply_cmd);
  apply_cmd->add_option("--to", o.to, "output representation (default: input's)")->check(kReprName);
  output(apply_cmd);
  records(apply_cmd);
  apply_cmd->callback([&] { action = [&] { return run_edit_apply(o); }; });
  auto *diff_cmd = edit->add_subcommand("diff", "minimal script turning the first model into the second");
  input(diff_cmd, "source model");
  diff_cmd->add_option("target", o.second, "target model")->required()->check(kInputFile);
  from(diff_cmd);
  output(diff_cmd);
  records(diff_cmd);
  diff_cmd->callback([&] { action = [&] { return run_edit_diff(o); }; });
  auto *invert_cmd = edit->add_subcommand("invert", "invert a completed script");
  input(invert_cmd, "script file (.json: structured form)");
  output(invert_cmd);
  records(invert_cmd);
  invert_cmd->callback([&] { action = [&] { return run_edit_invert(o); }; });

  auto *datagen = app.add_subcommand("datagen", "training data generation");
  datagen->require_subcommand(1);
  auto *pairs = datagen->add_subcommand("pairs", "deletion and addition records for one model");
  input(pairs, "model file");
  from(pairs);
  pairs->add_option("--kind", o.kind, "representation of models in records")->check(kReprName);
  output(pairs);
  records(pairs);
  pairs->callback([&] { action = [&] { return run_pairs(o); }; });
  auto *corpus = datagen->add_subcommand("corpus", "editing corpus over many models (JSON lines)");
  corpus->add_option("models", o.inputs, "model files")->required()->check(CLI::ExistingFile);
  from(corpus);
  seed(corpus);
  corpus->add_option("--mix", o.mix, "addition,deletion,modification fractions, e.g. 0.4,0.3,0.3");
  corpus->add_option("--modifications", o.modifications, "modification records per model without --mix");
  corpus->add_option("--kind", o.kind, "representation of models in records")->check(kReprName);
  corpus->add_flag("--qualitative", o.qualitative, "add qualitative twins through the external model endpoint");
  corpus->add_option("--client-config", o.client_config, "JSON file with timeout_ms and retries")
      ->check(CLI::ExistingFile);
  threads(corpus);
  output(corpus);
  corpus->callback([&] { action = [&] { return run_corpus(o); }; });
  auto *scot = datagen->add_subcommand("scot-check", "validate a structured reasoning trace");
  input(scot, "trace file");
  scot->add_option("current", o.second, "model the trace edits")->required()->check(kInputFile);
  from(scot);
  records(scot);
  scot->callback([&] { action = [&] { return run_scot_check(o); }; });
  auto *templ = datagen->add_subcommand("template", "quantitative instruction for a model");
  input(templ, "model file");
  from(templ);
  output(templ);
  templ->callback([&] { action = [&] { return run_template(o); }; });
  auto *split = datagen->add_subcommand("split", "seeded train/validation/test index split");
  split->add_option("count", o.count, "number of items")->required();
  seed(split);
  split->add_option("--train", o.train, "train fraction");
  split->add_option("--validation", o.validation, "validation fraction");
  split->add_option("--test", o.test, "test fraction");
  split->callback([&] { action = [&] { return run_split(o); }; });

  auto *mesh = app.add_subcommand("mesh", "export a triangle mesh");
  input(mesh, "model file");
  from(mesh);
  mesh->add_option("--format", o.format, "json or stl")->check(CLI::IsMember({"json", "stl"}));
  mesh->add_option("--tolerance", o.tolerance, "chord tolerance")->check(CLI::PositiveNumber);
  output(mesh);
  mesh->callback([&] { action = [&] { return run_mesh(o); }; });

  auto *serve = app.add_subcommand("serve", "start the HTTP service");
  serve->add_option("--config", o.config, "service JSON config")->check(CLI::ExistingFile);
  serve->add_option("--host", o.host, "listen address");
  serve->add_option("--port", o.port, "listen port (0: any free port)")->check(CLI::Range(0, 65535));
  serve->add_option("--session-dir", o.session_dir, "directory for session logs");
  serve->callback([&] { action = [&] { return run_serve(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
