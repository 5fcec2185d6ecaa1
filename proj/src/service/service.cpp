#include "cadseq/service.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/metrics.hpp"

namespace cadseq {

using nlohmann::json;

namespace {

// Failure raised inside a handler, already carrying its HTTP status.
struct HttpFailure {
  int status;
  std::string code;
  std::string message;
  json extra = json::object();
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw HttpFailure{status, std::move(code), std::move(message)};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::StaleOldValue:
      return 409;
    case ErrorCode::MalformedResponse:
      return 502;
    case ErrorCode::ClientUnavailable:
    case ErrorCode::ClientTimeout:
      return 503;
    default:
      return 400;
  }
}

Response json_response(int status, const json &body) { return {status, body.dump(), "application/json"}; }

Response failure_response(const HttpFailure &f) {
  json body{{"error", {{"code", f.code}, {"message", f.message}}}};
  for (const auto &[k, v] : f.extra.items()) body[k] = v;
  return json_response(f.status, body);
}

json parse_body(std::string_view body) {
  json j = json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) fail(400, "MalformedBody", "request body is not valid JSON");
  if (!j.is_object()) fail(400, "MalformedBody", "request body must be a JSON object");
  return j;
}

const json &field(const json &j, const char *name) {
  const auto it = j.find(name);
  if (it == j.end()) fail(400, "MalformedBody", std::string("missing field \"") + name + "\"");
  return *it;
}

std::string string_field(const json &j, const char *name) {
  const json &v = field(j, name);
  if (!v.is_string()) fail(400, "MalformedBody", std::string("field \"") + name + "\" must be a string");
  return v.get<std::string>();
}

ReprKind kind_value(const json &v, const char *name) {
  if (!v.is_string()) fail(400, "MalformedBody", std::string("field \"") + name + "\" must be a representation name");
  const auto kind = repr_from_string(v.get<std::string>());
  if (!kind) fail(400, "MalformedBody", "unknown representation \"" + v.get<std::string>() + "\"");
  return *kind;
}

ReprKind kind_field(const json &j, const char *name, ReprKind fallback) {
  return j.contains(name) ? kind_value(j[name], name) : fallback;
}

template <typename T>
T number_field(const json &j, const char *name, T fallback) {
  if (!j.contains(name)) return fallback;
  const json &v = j[name];
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) fail(400, "MalformedBody", std::string("field \"") + name + "\" must be a number");
  } else {
    if (!v.is_number_unsigned()) {
      fail(400, "MalformedBody", std::string("field \"") + name + "\" must be a non-negative integer");
    }
  }
  return v.get<T>();
}

// {"kind": "dsl", "text": "..."}
CadModel model_value(const json &v, const char *name) {
  if (!v.is_object()) fail(400, "MalformedBody", std::string("field \"") + name + "\" must be a model payload");
  return parse_or_throw(string_field(v, "text"), kind_value(field(v, "kind"), "kind"));
}

CadModel model_field(const json &j, const char *name) { return model_value(field(j, name), name); }

std::optional<CadModel> optional_model(const json &j, const char *name) {
  if (!j.contains(name) || j[name].is_null()) return std::nullopt;
  return model_value(j[name], name);
}

json model_payload(const CadModel &model, ReprKind kind) {
  return json{{"kind", std::string(to_string(kind))}, {"text", print(model, kind)}};
}

// "script" holds the structured form, "script_text" the line form.
std::optional<EditScript> optional_script(const json &j) {
  if (j.contains("script") && !j["script"].is_null()) {
    if (!j["script"].is_object()) fail(400, "MalformedBody", "field \"script\" must be an object");
    return script_from_json(j["script"].dump());
  }
  if (j.contains("script_text") && !j["script_text"].is_null()) return parse_script(string_field(j, "script_text"));
  return std::nullopt;
}

EditScript script_field(const json &j) {
  auto script = optional_script(j);
  if (!script) fail(400, "MalformedBody", "missing field \"script\" or \"script_text\"");
  return *script;
}

json script_json(const EditScript &script) { return json::parse(script_to_json(script)); }

RewardConfig reward_config(const json &j, const RewardConfig &defaults) {
  RewardConfig cfg = defaults;
  if (!j.contains("config") || j["config"].is_null()) return cfg;
  const json &c = j["config"];
  if (!c.is_object()) fail(400, "MalformedBody", "field \"config\" must be an object");
  cfg.alpha = number_field(c, "alpha", cfg.alpha);
  cfg.beta = number_field(c, "beta", cfg.beta);
  cfg.cd_scale = number_field(c, "cd_scale", cfg.cd_scale);
  cfg.n_points = number_field<std::size_t>(c, "n_points", cfg.n_points);
  cfg.seed = number_field<std::uint64_t>(c, "seed", cfg.seed);
  cfg.kind = kind_field(c, "kind", cfg.kind);
  if (c.contains("length_unit")) {
    const auto unit = c["length_unit"].is_string() ? length_unit_from_string(c["length_unit"].get<std::string>())
                                                   : std::nullopt;
    if (!unit) fail(400, "MalformedBody", "unknown length unit");
    cfg.length_unit = *unit;
  }
  check_config(cfg);
  return cfg;
}

ScoreItem score_item(const json &j, std::optional<std::uint64_t> default_episode) {
  ScoreItem item;
  item.generated = string_field(j, "generated");
  try {
    item.target = model_field(j, "target");
    item.current = optional_model(j, "current");
  } catch (const Error &e) {
    throw Error(ErrorCode::InvalidTarget, e.what());
  }
  item.script = optional_script(j);
  item.episode = j.contains("episode") ? std::optional(number_field<std::uint64_t>(j, "episode", 0)) : default_episode;
  return item;
}

json mesh_value(const CadModel &model, double tol) {
  if (model.ops.empty()) return nullptr;
  try {
    return json::parse(to_mesh_json(tessellate(compile(model), tol)));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::EmptyGeometry) return nullptr;
    throw;
  }
}

json edited_flags(const CadModel &model, const EditScript &script) {
  std::vector<bool> flags(model.ops.size(), false);
  for (const std::size_t i : script.edited_ops_b) {
    if (i < flags.size()) flags[i] = true;
  }
  return flags;
}

json session_json(const Session &s) {
  json history = json::array();
  for (const HistoryEntry &h : s.history) {
    history.push_back({{"instruction", h.instruction}, {"script", script_json(h.script)}});
  }
  return json{{"id", s.id},
              {"backend", std::string(to_string(s.backend))},
              {"kind", std::string(to_string(s.kind))},
              {"model", model_payload(s.current, s.kind)},
              {"history", history},
              {"undo_depth", s.undo_stack.size()}};
}

std::string session_id(std::uint64_t n) {
  std::string digits = std::to_string(n);
  return "s" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

// Stateless endpoints.

Response do_convert(const json &j) {
  const CadModel model = model_field(j, "model");
  return json_response(200, {{"model", model_payload(model, kind_value(field(j, "to"), "to"))}});
}

Response do_validate(const json &j) {
  const json &payload = field(j, "model");
  if (!payload.is_object()) fail(400, "MalformedBody", "field \"model\" must be a model payload");
  const ParseOutcome outcome = parse(string_field(payload, "text"), kind_value(field(payload, "kind"), "kind"));
  if (outcome.ok()) return json_response(200, {{"valid", true}, {"error", nullptr}});
  const ParseError &e = outcome.error();
  return json_response(200, {{"valid", false},
                             {"error",
                              {{"kind", std::string(to_string(e.kind))},
                               {"line", e.line},
                               {"column", e.column},
                               {"message", e.message}}}});
}

Response do_chamfer(const json &j, const ServiceConfig &config) {
  const CadModel generated = model_field(j, "generated");
  const CadModel target = model_field(j, "target");
  const std::size_t n = number_field<std::size_t>(j, "n_points", config.reward.n_points);
  const std::uint64_t seed = number_field<std::uint64_t>(j, "seed", config.reward.seed);
  if (n == 0) fail(400, "MalformedBody", "n_points must be positive");
  const auto script = optional_script(j);
  const CdResult cd = script ? localized_chamfer(generated, target, *script, n, seed)
                             : model_chamfer(generated, target, n, seed);
  return json_response(200, {{"cd", cd.value}, {"cd_scaled", cd.scaled}, {"localized", script.has_value()}});
}

Response do_reward(const json &j, const ServiceConfig &config) {
  const RewardConfig cfg = reward_config(j, config.reward);
  return {200, breakdown_to_json(score(score_item(j, std::nullopt), cfg)), "application/json"};
}

Response do_reward_batch(const json &j, const ServiceConfig &config) {
  const RewardConfig cfg = reward_config(j, config.reward);
  const json &items = field(j, "items");
  if (!items.is_array()) fail(400, "MalformedBody", "field \"items\" must be an array");
  // Per-item body errors become inline error records, like target errors.
  std::vector<ScoreItem> scored;
  std::vector<std::optional<BatchEntry>> early(items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    try {
      if (!items[k].is_object()) fail(400, "MalformedBody", "item must be an object");
      scored.push_back(score_item(items[k], k));
    } catch (const Error &e) {
      early[k] = BatchEntry{std::nullopt, e.code(), e.what()};
    } catch (const HttpFailure &f) {
      early[k] = BatchEntry{std::nullopt, ErrorCode::InvalidArgument, f.message};
    }
  }
  const std::vector<BatchEntry> results = score_batch(scored, cfg, config.threads);
  std::string out;
  std::size_t next = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    out += batch_entry_to_json(early[k] ? *early[k] : results[next++]);
    out += '\n';
  }
  return {200, out, "application/x-ndjson"};
}

Response do_eval(const json &j, const ServiceConfig &config) {
  const ReprKind kind = kind_field(j, "kind", config.default_kind);
  const std::size_t n = number_field<std::size_t>(j, "n_points", config.reward.n_points);
  const std::uint64_t seed = number_field<std::uint64_t>(j, "seed", config.reward.seed);
  if (n == 0) fail(400, "MalformedBody", "n_points must be positive");
  const json &items = field(j, "items");
  if (!items.is_array()) fail(400, "MalformedBody", "field \"items\" must be an array");
  std::vector<EvalItem> eval_items;
  for (const json &item : items) {
    if (!item.is_object()) fail(400, "MalformedBody", "item must be an object");
    EvalItem e;
    e.generated = string_field(item, "generated");
    try {
      e.target = model_field(item, "target");
    } catch (const Error &err) {
      throw Error(ErrorCode::InvalidTarget, err.what());
    }
    if (item.contains("generated_label")) e.generated_label = string_field(item, "generated_label");
    if (item.contains("target_label")) e.target_label = string_field(item, "target_label");
    eval_items.push_back(std::move(e));
  }
  return {200, eval_report_to_jsonl(evaluate_batch(eval_items, kind, n, seed, config.threads)),
          "application/x-ndjson"};
}

Response do_edit_apply(const json &j, const ServiceConfig &config) {
  const json &payload = field(j, "model");
  const CadModel model = model_field(j, "model");
  const ReprKind out_kind = kind_field(j, "to", payload.is_object() && payload.contains("kind")
                                                     ? kind_value(payload["kind"], "kind")
                                                     : config.default_kind);
  const ApplyResult r = apply_detailed(model, script_field(j));
  return json_response(200, {{"model", model_payload(r.model, out_kind)},
                             {"script", script_json(r.completed)},
                             {"inverse", script_json(r.inverse)},
                             {"edited", edited_flags(r.model, r.completed)}});
}

Response do_edit_diff(const json &j) {
  const EditScript s = diff(model_field(j, "a"), model_field(j, "b"));
  return json_response(200, {{"script", script_json(s)}, {"script_text", print_script(s)}});
}

Response do_edit_invert(const json &j) {
  const EditScript s = invert(script_field(j));
  return json_response(200, {{"script", script_json(s)}, {"script_text", print_script(s)}});
}

Response do_mesh(const json &j, const ServiceConfig &config) {
  const CadModel model = model_field(j, "model");
  const double tol = number_field(j, "tolerance", config.mesh_tolerance);
  if (!(tol > 0)) fail(400, "MalformedBody", "tolerance must be positive");
  const std::string format = j.contains("format") ? string_field(j, "format") : "json";
  const TriMesh mesh = tessellate(compile(model), tol);
  if (format == "json") return {200, to_mesh_json(mesh), "application/json"};
  if (format == "stl") return {200, to_binary_stl(mesh), "application/octet-stream"};
  fail(400, "MalformedBody", "unknown mesh format \"" + format + "\"");
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Scripted:
      return "scripted";
    case BackendKind::ManualEdit:
      return "manual";
    case BackendKind::ExternalModel:
      return "external";
  }
  return "manual";
}

std::optional<BackendKind> backend_from_string(std::string_view name) {
  for (const BackendKind k : {BackendKind::Scripted, BackendKind::ManualEdit, BackendKind::ExternalModel}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

ServiceConfig ServiceConfig::from_json(std::string_view text) {
  ServiceConfig cfg;
  try {
    const json j = parse_body(text);
    if (j.contains("host")) cfg.host = string_field(j, "host");
    cfg.port = static_cast<int>(number_field<std::uint64_t>(j, "port", static_cast<std::uint64_t>(cfg.port)));
    cfg.default_kind = kind_field(j, "default_kind", cfg.default_kind);
    cfg.reward = reward_config(json{{"config", j.contains("reward") ? j["reward"] : json::object()}}, cfg.reward);
    if (j.contains("backend")) {
      const auto b = backend_from_string(string_field(j, "backend"));
      if (!b) fail(400, "MalformedBody", "unknown backend");
      cfg.default_backend = *b;
    }
    cfg.mesh_tolerance = number_field(j, "mesh_tolerance", cfg.mesh_tolerance);
    cfg.threads = number_field<std::size_t>(j, "threads", cfg.threads);
    if (j.contains("session_dir")) cfg.session_dir = string_field(j, "session_dir");
    if (j.contains("scripted")) {
      if (!j["scripted"].is_object()) fail(400, "MalformedBody", "\"scripted\" must be an object");
      for (const auto &[instruction, script] : j["scripted"].items()) {
        cfg.scripted[instruction] = script_from_json(script.dump());
      }
    }
    if (cfg.default_backend == BackendKind::ExternalModel) {
      cfg.client = std::make_shared<HttpCompletionClient>(HttpClientConfig::from_env());
    }
  } catch (const HttpFailure &f) {
    throw Error(ErrorCode::InvalidArgument, "service config: " + f.message);
  } catch (const Error &e) {
    if (e.code() == ErrorCode::ClientUnavailable) throw;
    throw Error(ErrorCode::InvalidArgument, std::string("service config: ") + e.what());
  }
  return cfg;
}

CadModel Session::replay() const {
  CadModel model;
  for (const HistoryEntry &h : history) model = apply(model, h.script);
  return model;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.session_dir) load_sessions();
}

std::optional<Session> Service::session(const std::string &id) const {
  const auto slot = find(id);
  if (!slot) return std::nullopt;
  std::lock_guard lock(slot->writer);
  return slot->session;
}

std::shared_ptr<Service::Slot> Service::find(const std::string &id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void Service::append_log(const Session &session, const std::string &line) const {
  if (!config_.session_dir) return;
  std::ofstream out(*config_.session_dir / (session.id + ".jsonl"), std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) spdlog::error("session {}: cannot append to log", session.id);
}

void Service::load_sessions() {
  std::error_code ec;
  std::filesystem::create_directories(*config_.session_dir, ec);
  std::vector<std::filesystem::path> logs;
  for (const auto &entry : std::filesystem::directory_iterator(*config_.session_dir, ec)) {
    if (entry.path().extension() == ".jsonl") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto &path : logs) {
    std::ifstream in(path);
    auto slot = std::make_shared<Slot>();
    Session &s = slot->session;
    try {
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = json::parse(line);
        const std::string event = j.at("event");
        if (line_no == 1) {
          if (event != "create") throw Error(ErrorCode::ParseFailed, "log does not start with a create event");
          s.id = j.at("id");
          s.backend = backend_from_string(j.at("backend").get<std::string>()).value();
          s.kind = repr_from_string(j.at("kind").get<std::string>()).value();
        } else if (event == "turn") {
          const ApplyResult r = apply_detailed(s.current, script_from_json(j.at("script").dump()));
          s.history.push_back({j.at("instruction"), r.completed, r.model});
          s.undo_stack.push_back(r.inverse);
          s.current = r.model;
        } else if (event == "undo") {
          if (s.history.empty()) throw Error(ErrorCode::ParseFailed, "undo with empty history");
          s.current = apply(s.current, s.undo_stack.back());
          s.history.pop_back();
          s.undo_stack.pop_back();
        } else {
          throw Error(ErrorCode::ParseFailed, "unknown event \"" + event + "\" on line " + std::to_string(line_no));
        }
      }
      if (s.id.empty()) continue;
    } catch (const std::exception &e) {
      spdlog::warn("skipping session log {}: {}", path.string(), e.what());
      continue;
    }
    if (s.id.size() > 1 && s.id[0] == 's') {
      const std::uint64_t n = std::strtoull(s.id.c_str() + 1, nullptr, 10);
      if (n >= next_id_) next_id_ = n + 1;
    }
    sessions_[s.id] = slot;
  }
  if (!sessions_.empty()) spdlog::info("restored {} sessions from {}", sessions_.size(), config_.session_dir->string());
}

Response Service::create_session(std::string_view body) {
  const json j = body.empty() ? json::object() : parse_body(body);
  auto slot = std::make_shared<Slot>();
  Session &s = slot->session;
  s.backend = config_.default_backend;
  if (j.contains("backend")) {
    const auto b = backend_from_string(string_field(j, "backend"));
    if (!b) fail(400, "MalformedBody", "unknown backend");
    s.backend = *b;
  }
  s.kind = kind_field(j, "kind", config_.default_kind);
  {
    std::unique_lock lock(sessions_mutex_);
    s.id = session_id(next_id_++);
    sessions_[s.id] = slot;
  }
  append_log(s, json{{"event", "create"},
                     {"id", s.id},
                     {"backend", std::string(to_string(s.backend))},
                     {"kind", std::string(to_string(s.kind))}}
                    .dump());
  return json_response(201, session_json(s));
}

EditScript Service::resolve(const Session &session, const std::string &instruction, std::string_view body) {
  const json j = parse_body(body);
  switch (session.backend) {
    case BackendKind::ManualEdit:
      return script_field(j);
    case BackendKind::Scripted: {
      const auto it = config_.scripted.find(instruction);
      if (it == config_.scripted.end()) fail(400, "UnknownInstruction", "no scripted edit for \"" + instruction + "\"");
      return it->second;
    }
    case BackendKind::ExternalModel: {
      if (!config_.client) throw Error(ErrorCode::ClientUnavailable, "no external model client configured");
      CompletionRequest request;
      request.tag = "scot_editing";
      request.inputs = "Current model:\n" + print(session.current, ReprKind::StructuredText) + "\nInstruction:\n" +
                       instruction + "\n";
      if (!session.current.ops.empty()) {
        try {
          request.views = nine_views(session.current);
        } catch (const Error &) {
        }
      }
      std::ostringstream key;
      key << model_hash(session.current) << ':' << std::hex << fnv1a(instruction);
      request.key = key.str();
      const std::string trace = config_.client->complete(request);
      const ScotResult result = validate_scot(trace, session.current);
      if (!result.ok()) {
        HttpFailure f{422, "ScotRejected", "reasoning trace rejected"};
        f.extra["violations"] = json::array();
        for (const ScotViolation &v : result.violations) {
          f.extra["violations"].push_back({{"section", v.section}, {"code", v.code}, {"message", v.message}});
        }
        throw f;
      }
      return result.trace->script;
    }
  }
  fail(500, "Internal", "unknown backend");
}

Response Service::turn(const std::string &id, std::string_view body) {
  const auto slot = find(id);
  if (!slot) fail(404, "UnknownSession", "no session \"" + id + "\"");
  std::unique_lock lock(slot->writer, std::try_to_lock);
  if (!lock.owns_lock()) fail(409, "SessionBusy", "session \"" + id + "\" is processing another request");
  Session &s = slot->session;
  const json j = parse_body(body);
  const std::string instruction = j.contains("instruction") ? string_field(j, "instruction") : std::string();
  const auto target = optional_model(j, "target");
  const RewardConfig cfg = reward_config(j, config_.reward);
  const EditScript script = resolve(s, instruction, body);
  const ApplyResult r = apply_detailed(s.current, script);

  json reward = nullptr;
  if (target) {
    const std::uint64_t episode = number_field<std::uint64_t>(j, "episode", s.history.size());
    reward = json::parse(breakdown_to_json(score(print(r.model, cfg.kind), *target, s.current, r.completed, cfg, episode)));
  }
  json result{{"turn", s.history.size() + 1},
              {"instruction", instruction},
              {"script", script_json(r.completed)},
              {"script_text", print_script(r.completed)},
              {"model", model_payload(r.model, s.kind)},
              {"mesh", mesh_value(r.model, config_.mesh_tolerance)},
              {"edited", edited_flags(r.model, r.completed)},
              {"reward", reward}};

  s.history.push_back({instruction, r.completed, r.model});
  s.undo_stack.push_back(r.inverse);
  s.current = r.model;
  append_log(s, json{{"event", "turn"}, {"instruction", instruction}, {"script", script_json(r.completed)}}.dump());
  return json_response(200, result);
}

Response Service::undo(const std::string &id) {
  const auto slot = find(id);
  if (!slot) fail(404, "UnknownSession", "no session \"" + id + "\"");
  std::unique_lock lock(slot->writer, std::try_to_lock);
  if (!lock.owns_lock()) fail(409, "SessionBusy", "session \"" + id + "\" is processing another request");
  Session &s = slot->session;
  if (s.history.empty()) fail(409, "NothingToUndo", "session \"" + id + "\" has no turns to undo");
  const ApplyResult r = apply_detailed(s.current, s.undo_stack.back());
  s.history.pop_back();
  s.undo_stack.pop_back();
  s.current = r.model;
  append_log(s, json{{"event", "undo"}}.dump());
  return json_response(200, {{"turn", s.history.size()},
                             {"instruction", "undo"},
                             {"script", script_json(r.completed)},
                             {"script_text", print_script(r.completed)},
                             {"model", model_payload(r.model, s.kind)},
                             {"mesh", mesh_value(r.model, config_.mesh_tolerance)},
                             {"edited", edited_flags(r.model, r.completed)},
                             {"reward", nullptr}});
}

Response Service::get_session(const std::string &id) const {
  const auto snapshot = session(id);
  if (!snapshot) fail(404, "UnknownSession", "no session \"" + id + "\"");
  return json_response(200, session_json(*snapshot));
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  static const std::regex session_route(R"(/session/([A-Za-z0-9_-]{1,64})(/turn|/undo)?)");
  const std::string p(path);
  try {
    std::smatch m;
    if (std::regex_match(p, m, session_route)) {
      const std::string id = m[1];
      const std::string action = m[2];
      if (action.empty()) {
        if (method != "GET") fail(405, "MethodNotAllowed", "use GET");
        return get_session(id);
      }
      if (method != "POST") fail(405, "MethodNotAllowed", "use POST");
      return action == "/turn" ? turn(id, body) : undo(id);
    }
    using Handler = Response (*)(const json &, const ServiceConfig &);
    static const std::map<std::string, Handler, std::less<>> routes{
        {"/convert", [](const json &j, const ServiceConfig &) { return do_convert(j); }},
        {"/validate", [](const json &j, const ServiceConfig &) { return do_validate(j); }},
        {"/chamfer", do_chamfer},
        {"/reward", do_reward},
        {"/reward/batch", do_reward_batch},
        {"/eval", do_eval},
        {"/edit/apply", do_edit_apply},
        {"/edit/diff", [](const json &j, const ServiceConfig &) { return do_edit_diff(j); }},
        {"/edit/invert", [](const json &j, const ServiceConfig &) { return do_edit_invert(j); }},
        {"/mesh", do_mesh},
    };
    if (p == "/session") {
      if (method != "POST") fail(405, "MethodNotAllowed", "use POST");
      return create_session(body);
    }
    const auto route = routes.find(p);
    if (route == routes.end()) fail(404, "UnknownRoute", "no endpoint " + p);
    if (method != "POST") fail(405, "MethodNotAllowed", "use POST");
    return route->second(parse_body(body), config_);
  } catch (const HttpFailure &f) {
    return failure_response(f);
  } catch (const Error &e) {
    return failure_response({status_for(e.code()), std::string(to_string(e.code())), e.what()});
  } catch (const json::exception &e) {
    return failure_response({400, "MalformedBody", e.what()});
  } catch (const std::exception &e) {
    spdlog::error("{} {}: {}", method, path, e.what());
    return failure_response({500, "Internal", e.what()});
  }
}

}  // namespace cadseq
